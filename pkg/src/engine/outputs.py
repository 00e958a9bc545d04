"""
Run-directory writers: CSV tables, report.json, the verdict file and the
manifest listing every artifact with its SHA-256.

CSV files use a comma separator, '.' decimals, LF line endings, 'NA' for
missing values and 17 significant digits for floats.
"""

import hashlib
from pathlib import Path
from typing import Any, Sequence

import msgspec
import pandas as pd
from msgspec import Struct, field

from ..config import logger
from ..popgen import ReferenceModel
from .closed_form import ClosedFormSize
from .runner import ScenarioResult
from .schemas import MinimalN, ReferenceMixture, SummaryReport

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


SUMMARY_COLUMNS = [
    "n", "variant", "strategy", "threshold", "subgroup", "metric", "mean", "p2.5", "p97.5", "n_missing"
]
MANIFEST = "manifest.json"
VERDICT = "verdict.txt"


class Artifact(Struct, frozen=True):
    path: str
    sha256: str
    bytes: int


class RunManifest(Struct):
    """Self-description of a run directory, written last."""

    command: str
    version: str
    config: dict[str, Any]
    seeds: dict[str, int]
    artifacts: list[Artifact] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    threads: int = 1


class RunReport(Struct):
    """report.json: summary plus config echo and seed provenance."""

    command: str
    config: dict[str, Any]
    seeds: dict[str, int]
    summary: SummaryReport
    closed_form: ClosedFormSize | None = None


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(
        path,
        index=False,
        lineterminator="\n",
        na_rep="NA",
        float_format="%.17g",
        encoding="utf-8",
    )
    return path


def write_json(value: Any, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(msgspec.json.format(msgspec.json.encode(value), indent=2) + b"\n")
    return path


def summary_frame(report: SummaryReport) -> pd.DataFrame:
    """summary.csv layout: fixed columns then criterion_<k> probabilities."""
    criteria = [f"criterion_{k}" for k in range(1, len(report.criteria) + 1)]
    records = []
    for row in report.rows:
        record = [
            row.n,
            row.variant,
            row.strategy,
            row.threshold,
            row.subgroup,
            row.metric,
            row.mean,
            row.p2_5,
            row.p97_5,
            row.n_missing,
        ]
        probabilities = list(row.assurance[: len(criteria)])
        record.extend(probabilities + [None] * (len(criteria) - len(probabilities)))
        records.append(record)
    frame = pd.DataFrame.from_records(records, columns=SUMMARY_COLUMNS + criteria)
    return frame.astype({"mean": float, "p2.5": float, "p97.5": float, "threshold": float})


def verdict_lines(
    report: SummaryReport,
    closed_form: ClosedFormSize | None = None,
) -> list[str]:
    lines = []
    if closed_form is not None:
        lines.append(
            f"closed-form starting n: {closed_form.recommended} "
            f"(shrinkage {closed_form.n_shrinkage}, optimism {closed_form.n_optimism}, "
            f"precision {closed_form.n_precision}; events {closed_form.events:.1f})"
        )
    if not report.criteria:
        lines.append("no criteria configured")
        return lines
    for k, criterion in enumerate(report.criteria, start=1):
        lines.append(f"criterion_{k}: {criterion.describe()}")
    for verdict in report.minimal_n:
        lines.append(_verdict_line(verdict))
    return lines


def _verdict_line(verdict: MinimalN) -> str:
    threshold = "-" if verdict.threshold is None else f"{verdict.threshold:g}"
    found = "none" if verdict.n is None else str(verdict.n)
    return f"variant={verdict.variant} strategy={verdict.strategy} threshold={threshold} minimal_n={found}"


def write_verdict(directory: Path, report: SummaryReport, closed_form: ClosedFormSize | None = None) -> Path:
    path = directory / VERDICT
    path.write_text("\n".join(verdict_lines(report, closed_form)) + "\n", encoding="utf-8", newline="\n")
    return path


def write_scenario_outputs(
    result: ScenarioResult,
    directory: Path,
    command: str,
    config_echo: dict[str, Any],
    seeds: dict[str, int],
    closed_form: ClosedFormSize | None = None,
) -> list[Path]:
    """Summary, draws, instability tables and report.json of one run."""
    directory.mkdir(parents=True, exist_ok=True)
    written = [
        write_csv(summary_frame(result.summary), directory / "summary.csv"),
        write_csv(result.draws, directory / "draws.csv"),
        write_csv(result.instability.predictions, directory / "instability_predictions.csv"),
        write_csv(result.instability.curves, directory / "instability_curves.csv"),
        write_csv(result.instability.uncertainty, directory / "individual_uncertainty.csv"),
        write_json(
            RunReport(
                command=command,
                config=config_echo,
                seeds=seeds,
                summary=result.summary,
                closed_form=closed_form,
            ),
            directory / "report.json",
        ),
    ]
    logger.info("Outputs written", directory=str(directory), files=len(written))
    return written


def write_reference(mixture: ReferenceMixture, directory: Path) -> list[Path]:
    """reference_model.json (one model or a list) and calibration.json."""
    directory.mkdir(parents=True, exist_ok=True)
    models: ReferenceModel | list[ReferenceModel] = (
        mixture.models if mixture.is_mixture else mixture.models[0]
    )
    report = [
        {
            "index": index,
            "probability": probability,
            "intercept": model.intercept,
            "scale": model.scale,
            "calibration": model.calibration,
        }
        for index, (model, probability) in enumerate(zip(mixture.models, mixture.probabilities))
    ]
    return [
        write_json(models, directory / "reference_model.json"),
        write_json(report, directory / "calibration.json"),
    ]


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(
    directory: Path,
    command: str,
    version: str,
    config_echo: dict[str, Any],
    seeds: dict[str, int],
    timings: dict[str, float],
    threads: int = 1,
    exclude: Sequence[str] = (),
) -> Path:
    """Hash every file below directory and write manifest.json last."""
    artifacts = []
    for path in sorted(p for p in directory.rglob("*") if p.is_file()):
        relative = path.relative_to(directory).as_posix()
        if relative == MANIFEST or relative in exclude:
            continue
        artifacts.append(Artifact(path=relative, sha256=_sha256(path), bytes=path.stat().st_size))
    manifest = RunManifest(
        command=command,
        version=version,
        config=config_echo,
        seeds=seeds,
        artifacts=artifacts,
        timings={stage: round(seconds, 6) for stage, seconds in timings.items()},
        threads=threads,
    )
    path = write_json(manifest, directory / MANIFEST)
    logger.debug("Manifest written", artifacts=len(artifacts))
    return path
