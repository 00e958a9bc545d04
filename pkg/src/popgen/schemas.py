"""
Case-mix, reference model and population records.
"""

from typing import Literal

import numpy as np
from msgspec import Struct

from ..config import AlignmentError, SchemaError

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


ColumnKind = Literal["continuous", "binary", "dummy"]


class ColumnSpec(Struct, frozen=True):
    """Declaration of one design column."""

    name: str
    kind: ColumnKind = "continuous"
    # Parent categorical of a dummy column
    categorical: str | None = None
    # Column in the source file, defaults to name
    source: str | None = None
    transform: Literal["identity", "log"] = "identity"

    def __post_init__(self):
        if self.kind == "dummy" and not self.categorical:
            raise SchemaError(f"Dummy column '{self.name}' needs its categorical name")


class CaseMix(Struct, frozen=True):
    """Immutable matrix of design columns, one row per individual."""

    columns: tuple[ColumnSpec, ...]
    rows: np.ndarray
    subgroup: str | None = None
    groups: np.ndarray | None = None

    def __post_init__(self):
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.columns):
            raise SchemaError(
                f"Case-mix rows have shape {self.rows.shape}, "
                f"expected {len(self.columns)} columns"
            )
        if self.groups is not None and len(self.groups) != self.rows.shape[0]:
            raise SchemaError("Subgroup labels must have one entry per row")
        self.rows.setflags(write=False)

    @property
    def names(self) -> list[str]:
        return [column.name for column in self.columns]

    @property
    def n_rows(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n_columns(self) -> int:
        return int(self.rows.shape[1])

    def take(self, indices: np.ndarray) -> "CaseMix":
        """Row subset in the given order."""
        indices = np.asarray(indices, dtype=np.int64)
        return CaseMix(
            columns=self.columns,
            rows=np.ascontiguousarray(self.rows[indices]),
            subgroup=self.subgroup,
            groups=None if self.groups is None else self.groups[indices],
        )

    def aligned_rows(self, names: list[str]) -> np.ndarray:
        """Rows with columns reordered to match names."""
        own = self.names
        if own == list(names):
            return self.rows
        if sorted(own) != sorted(names):
            missing = sorted(set(names) - set(own))
            extra = sorted(set(own) - set(names))
            raise AlignmentError(
                f"Column mismatch: missing {missing or 'none'}, unexpected {extra or 'none'}"
            )
        order = [own.index(name) for name in names]
        return self.rows[:, order]

    def with_columns(self, columns: list[ColumnSpec], values: np.ndarray) -> "CaseMix":
        """Copy with extra columns appended on the right."""
        values = np.asarray(values, dtype=float).reshape(self.n_rows, len(columns))
        return CaseMix(
            columns=self.columns + tuple(columns),
            rows=np.hstack([self.rows, values]),
            subgroup=self.subgroup,
            groups=self.groups,
        )


class NormalMarginal(Struct, frozen=True, tag="normal"):
    mean: float = 0.0
    sd: float = 1.0


class BernoulliMarginal(Struct, frozen=True, tag="bernoulli"):
    prob: float = 0.5


class EmpiricalMarginal(Struct, frozen=True, tag="empirical"):
    """Resampling distribution over a column of a supplied dataset."""

    values: tuple[float, ...] = ()
    kind: ColumnKind = "continuous"


Marginal = NormalMarginal | BernoulliMarginal | EmpiricalMarginal


class MarginalSpec(Struct, frozen=True):
    """Independent per-column distributions for synthesising a case-mix."""

    columns: dict[str, Marginal]
    noise_extra: int = 0

    def __post_init__(self):
        for name, marginal in self.columns.items():
            if isinstance(marginal, NormalMarginal) and not marginal.sd > 0:
                raise SchemaError(f"Column '{name}': sd must be > 0", column=name)
            if isinstance(marginal, BernoulliMarginal) and not 0 < marginal.prob < 1:
                raise SchemaError(f"Column '{name}': prob must be in (0, 1)", column=name)
            if isinstance(marginal, EmpiricalMarginal) and len(marginal.values) == 0:
                raise SchemaError(f"Column '{name}': empirical values are empty", column=name)
        if self.noise_extra < 0:
            raise SchemaError("noise_extra must be >= 0")


class CalibrationSummary(Struct, frozen=True):
    """How a reference model was calibrated."""

    target_cstat: float
    target_prevalence: float
    achieved_cstat: float
    achieved_prevalence: float
    iterations: int
    seed: int


class ReferenceModel(Struct, frozen=True):
    """Working truth: logit(p) = intercept + scale * (weights . x)."""

    intercept: float
    scale: float
    weights: list[float]
    column_names: list[str]
    calibration: CalibrationSummary | None = None

    def __post_init__(self):
        if len(self.weights) != len(self.column_names):
            raise AlignmentError(
                f"{len(self.weights)} weights for {len(self.column_names)} columns"
            )
        if self.scale < 0:
            raise SchemaError("Reference scale must be >= 0")

    @property
    def effective_coefficients(self) -> np.ndarray:
        """(intercept, scale * weights) as an ordinary coefficient vector."""
        return np.concatenate(
            [[self.intercept], self.scale * np.asarray(self.weights, dtype=float)]
        )

    def with_zero_weights(self, names: list[str]) -> "ReferenceModel":
        """Same truth over extra columns that carry no signal."""
        return ReferenceModel(
            intercept=self.intercept,
            scale=self.scale,
            weights=list(self.weights) + [0.0] * len(names),
            column_names=list(self.column_names) + list(names),
            calibration=self.calibration,
        )


class TargetPopulation(Struct, frozen=True):
    """Large evaluation population with true risks and realised outcomes."""

    casemix: CaseMix
    true_risk: np.ndarray
    outcome: np.ndarray
    reference: ReferenceModel
    warnings: tuple[str, ...] = ()

    @property
    def n_rows(self) -> int:
        return self.casemix.n_rows

    @property
    def prevalence(self) -> float:
        return float(self.outcome.mean())


class DevelopmentSample(Struct, frozen=True):
    """One simulated development dataset."""

    casemix: CaseMix
    outcome: np.ndarray
    seed_id: int
    degenerate: bool = False

    @property
    def n(self) -> int:
        return self.casemix.n_rows

    @property
    def events(self) -> int:
        return int(self.outcome.sum())
