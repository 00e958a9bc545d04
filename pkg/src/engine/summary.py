"""
Posterior summaries, assurance probabilities and the minimal-n search.
"""

import math

import numpy as np
import pandas as pd

from ..config import config, logger
from .schemas import CriteriaSpec, Criterion, MinimalN, SummaryReport, SummaryRow

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


GROUP_KEYS = ["n", "variant", "strategy", "threshold", "subgroup", "metric"]
OVERALL = "overall"
LOW_MISCLASSIFICATION = 0.05


def _threshold_key(value) -> float | None:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    return float(value)


def assurance(values: np.ndarray, criterion: Criterion) -> float | None:
    """Share of non-missing values inside the criterion bounds."""
    kept = values[~np.isnan(values)]
    if kept.size == 0:
        return None
    inside = sum(1 for value in kept if criterion.contains(float(value)))
    return inside / kept.size


def summarize_values(
    values: np.ndarray,
    criteria: list[Criterion],
    metric: str,
    threshold: float | None,
) -> tuple[float | None, float | None, float | None, int, list[float | None]]:
    """(mean, p2.5, p97.5, n_missing, assurance per criterion) of one metric."""
    values = np.asarray(values, dtype=float)
    kept = values[~np.isnan(values)]
    n_missing = int(values.size - kept.size)
    if kept.size == 0:
        mean = low = high = None
    else:
        mean = math.fsum(kept) / kept.size
        low, high = (float(v) for v in np.percentile(kept, [2.5, 97.5], method="linear"))
    probabilities = [
        assurance(values, criterion) if criterion.applies_to(metric, threshold) else None
        for criterion in criteria
    ]
    return mean, low, high, n_missing, probabilities


def summarize(
    draws: pd.DataFrame,
    criteria: CriteriaSpec | list[Criterion] | None = None,
    master_seed: int = 0,
    iterations: int = 0,
    extra_rows: list[SummaryRow] | None = None,
) -> SummaryReport:
    """Mean, 95% range, missing count and assurance per metric group."""
    criteria = list(criteria.criteria if isinstance(criteria, CriteriaSpec) else criteria or [])
    rows: list[SummaryRow] = []
    warnings: list[str] = []
    limit = config.missing_warning_fraction

    for keys, group in draws.groupby(GROUP_KEYS, sort=False, dropna=False):
        n, variant, strategy, threshold, subgroup, metric = keys
        threshold = _threshold_key(threshold)
        values = group["value"].to_numpy(dtype=float)
        mean, low, high, n_missing, probabilities = summarize_values(values, criteria, metric, threshold)
        rows.append(
            SummaryRow(
                n=int(n),
                variant=str(variant),
                strategy=str(strategy),
                threshold=threshold,
                subgroup=str(subgroup),
                metric=str(metric),
                mean=mean,
                p2_5=low,
                p97_5=high,
                n_draws=int(values.size),
                n_missing=n_missing,
                assurance=probabilities,
            )
        )
        if subgroup == OVERALL and values.size and n_missing / values.size > limit:
            message = (
                f"{metric} missing in {n_missing} of {values.size} draws "
                f"(n={int(n)}, strategy={strategy})"
            )
            if message not in warnings:
                warnings.append(message)
                logger.warning(
                    "Metric mostly missing",
                    metric=metric,
                    n=int(n),
                    strategy=strategy,
                    missing=n_missing,
                )

    rows.extend(extra_rows or [])
    report = SummaryReport(
        rows=rows,
        criteria=criteria,
        master_seed=master_seed,
        iterations=iterations,
        warnings=warnings,
    )
    report.minimal_n = minimal_n(report)
    return report


def individual_summary(
    uncertainty: pd.DataFrame, criteria: CriteriaSpec | list[Criterion] | None = None
) -> list[SummaryRow]:
    """Distribution across tracked individuals of interval width and misclassification."""
    criteria = list(criteria.criteria if isinstance(criteria, CriteriaSpec) else criteria or [])
    rows = []
    if uncertainty.empty:
        return rows
    keys = ["n", "variant", "strategy", "threshold"]
    for (n, variant, strategy, threshold), group in uncertainty.groupby(keys, sort=False, dropna=False):
        threshold = _threshold_key(threshold)
        misclassified = group["misclassification_prob"].to_numpy(dtype=float)
        kept = misclassified[~np.isnan(misclassified)]
        low_share = (
            np.array([float(np.count_nonzero(kept < LOW_MISCLASSIFICATION)) / kept.size])
            if kept.size
            else np.array([np.nan])
        )
        for metric, values in (
            ("interval_width", group["interval_width"].to_numpy(dtype=float)),
            ("misclassification_prob", misclassified),
            ("low_misclassification_share", low_share),
        ):
            mean, low, high, n_missing, probabilities = summarize_values(values, criteria, metric, threshold)
            if metric == "low_misclassification_share":
                low = high = None
            rows.append(
                SummaryRow(
                    n=int(n),
                    variant=str(variant),
                    strategy=str(strategy),
                    threshold=threshold,
                    subgroup=OVERALL,
                    metric=metric,
                    mean=mean,
                    p2_5=low,
                    p97_5=high,
                    n_draws=int(values.size),
                    n_missing=n_missing,
                    assurance=probabilities,
                )
            )
    return rows


def _lookup(
    report: SummaryReport, n: int, variant: str, strategy: str, threshold: float | None, metric: str
) -> SummaryRow | None:
    for row in report.rows:
        if (
            row.n == n
            and row.variant == variant
            and row.strategy == strategy
            and row.subgroup == OVERALL
            and row.metric == metric
            and (row.threshold is None or threshold is None or math.isclose(row.threshold, threshold))
        ):
            return row
    return None


def minimal_n(report: SummaryReport) -> list[MinimalN]:
    """Smallest configured n at which every criterion reaches its probability."""
    if not report.criteria:
        return []
    combos = []
    for row in report.rows:
        key = (row.variant, row.strategy, row.threshold)
        if row.subgroup == OVERALL and key not in combos:
            combos.append(key)

    verdicts = []
    for variant, strategy, threshold in combos:
        sizes = sorted({row.n for row in report.rows if row.variant == variant and row.strategy == strategy})
        found = None
        for n in sizes:
            satisfied = True
            for k, criterion in enumerate(report.criteria):
                at = criterion.threshold if criterion.threshold is not None else threshold
                row = _lookup(report, n, variant, strategy, at, criterion.metric)
                value = None if row is None else row.assurance[k]
                if value is None or value < criterion.probability:
                    satisfied = False
                    break
            if satisfied:
                found = n
                break
        verdicts.append(MinimalN(variant=variant, strategy=strategy, threshold=threshold, n=found))
    return verdicts
