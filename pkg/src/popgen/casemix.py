"""
Case-mix ingestion, synthesis and splitting.
"""

from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from ..config import MissingValueError, ParseError, SchemaError, logger
from ..seeding import generator
from .schemas import (
    BernoulliMarginal,
    CaseMix,
    ColumnSpec,
    EmpiricalMarginal,
    MarginalSpec,
    NormalMarginal,
)

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


MISSING_TOKENS = {"", "NA", "N/A", "NaN", "nan", "NULL", "null", "."}


def _numeric_column(raw: pd.Series, column: str) -> np.ndarray:
    """Parse one text column, reporting the first bad cell by 1-based data row."""
    text = raw.str.strip()
    missing = text.isin(MISSING_TOKENS)
    if missing.any():
        row = int(np.flatnonzero(missing.to_numpy())[0]) + 1
        raise MissingValueError(
            f"Missing value in column '{column}' at row {row}; missing data is not supported",
            row=row,
            column=column,
        )
    values = pd.to_numeric(text, errors="coerce")
    bad = values.isna().to_numpy()
    if bad.any():
        row = int(np.flatnonzero(bad)[0]) + 1
        raise ParseError(
            f"Non-numeric value '{text.iloc[row - 1]}' in column '{column}' at row {row}",
            row=row,
            column=column,
        )
    return values.to_numpy(dtype=float)


def _check_kinds(columns: Sequence[ColumnSpec], rows: np.ndarray) -> None:
    for j, spec in enumerate(columns):
        if spec.kind == "continuous":
            continue
        bad = ~np.isin(rows[:, j], (0.0, 1.0))
        if bad.any():
            row = int(np.flatnonzero(bad)[0]) + 1
            raise SchemaError(
                f"Column '{spec.name}' is declared {spec.kind} but row {row} "
                f"holds {rows[row - 1, j]!r}",
                row=row,
                column=spec.name,
            )

    by_categorical: dict[str, list[int]] = {}
    for j, spec in enumerate(columns):
        if spec.kind == "dummy":
            by_categorical.setdefault(spec.categorical, []).append(j)
    for categorical, indices in by_categorical.items():
        overlap = rows[:, indices].sum(axis=1) > 1
        if overlap.any():
            row = int(np.flatnonzero(overlap)[0]) + 1
            raise SchemaError(
                f"Dummies of '{categorical}' are not mutually exclusive at row {row}",
                row=row,
                column=categorical,
            )


def ingest_casemix(
    file_path: str | Path,
    schema: Sequence[ColumnSpec],
    subgroup: str | None = None,
) -> CaseMix:
    """Read a CSV case-mix and validate it against the declared columns.

    Transformations declared on a column (e.g. log) are applied here so the
    returned matrix holds final design columns. Row order is preserved.
    """
    path = Path(file_path)
    if not path.exists():
        raise SchemaError(f"Case-mix file not found: {path}")

    frame = pd.read_csv(path, encoding="utf-8", dtype=str, keep_default_na=False)
    header = set(frame.columns)

    columns = []
    for spec in schema:
        source = spec.source or spec.name
        if source not in header:
            raise SchemaError(f"Column '{source}' declared in schema is missing from {path.name}",
                              column=source)
        values = _numeric_column(frame[source], source)
        if spec.transform == "log":
            non_positive = values <= 0
            if non_positive.any():
                row = int(np.flatnonzero(non_positive)[0]) + 1
                raise ParseError(
                    f"Log transform of column '{source}' needs positive values (row {row})",
                    row=row,
                    column=source,
                )
            values = np.log(values)
        columns.append(values)

    rows = np.column_stack(columns) if columns else np.empty((len(frame), 0))
    _check_kinds(schema, rows)

    groups = None
    if subgroup is not None:
        if subgroup not in header:
            raise SchemaError(f"Subgroup column '{subgroup}' is missing from {path.name}",
                              column=subgroup)
        labels = frame[subgroup].str.strip()
        empty = labels.isin(MISSING_TOKENS)
        if empty.any():
            row = int(np.flatnonzero(empty.to_numpy())[0]) + 1
            raise MissingValueError(
                f"Missing subgroup label at row {row}", row=row, column=subgroup
            )
        groups = labels.to_numpy(dtype=object)

    casemix = CaseMix(columns=tuple(schema), rows=rows, subgroup=subgroup, groups=groups)
    logger.info("Case-mix ingested", path=str(path), rows=casemix.n_rows, columns=casemix.n_columns)
    return casemix


def noise_columns(count: int) -> list[ColumnSpec]:
    return [ColumnSpec(name=f"noise_{k}") for k in range(1, count + 1)]


def append_noise(casemix: CaseMix, count: int, rng_seed: int) -> CaseMix:
    """Append independent standard-normal columns noise_1..noise_count."""
    if count == 0:
        return casemix
    rng = generator(rng_seed)
    values = rng.standard_normal((casemix.n_rows, count))
    return casemix.with_columns(noise_columns(count), values)


def synthesize_casemix(spec: MarginalSpec, n_rows: int, rng_seed: int) -> CaseMix:
    """Draw every column independently from its marginal distribution."""
    if n_rows < 1:
        raise SchemaError("n_rows must be >= 1")

    rng = generator(rng_seed)
    columns = []
    values = []
    for name, marginal in spec.columns.items():
        if isinstance(marginal, NormalMarginal):
            values.append(rng.normal(marginal.mean, marginal.sd, n_rows))
            columns.append(ColumnSpec(name=name))
        elif isinstance(marginal, BernoulliMarginal):
            values.append((rng.random(n_rows) < marginal.prob).astype(float))
            columns.append(ColumnSpec(name=name, kind="binary"))
        elif isinstance(marginal, EmpiricalMarginal):
            pool = np.asarray(marginal.values, dtype=float)
            values.append(rng.choice(pool, size=n_rows, replace=True))
            columns.append(ColumnSpec(name=name, kind=marginal.kind))
        else:
            raise SchemaError(f"Unsupported marginal for column '{name}'")

    for spec_column in noise_columns(spec.noise_extra):
        values.append(rng.standard_normal(n_rows))
        columns.append(spec_column)

    rows = np.column_stack(values) if values else np.empty((n_rows, 0))
    return CaseMix(columns=tuple(columns), rows=rows)


def split_casemix(casemix: CaseMix, target_rows: int, rng_seed: int) -> tuple[CaseMix, CaseMix]:
    """Split once into disjoint (target population, development source) parts."""
    if not 0 < target_rows < casemix.n_rows:
        raise SchemaError(
            f"Cannot reserve {target_rows} target rows from a case-mix of {casemix.n_rows}"
        )
    order = generator(rng_seed).permutation(casemix.n_rows)
    target = casemix.take(np.sort(order[:target_rows]))
    source = casemix.take(np.sort(order[target_rows:]))
    logger.debug("Case-mix split", target_rows=target.n_rows, source_rows=source.n_rows)
    return target, source
