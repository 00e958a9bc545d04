"""
All metrics of one fitted model against a target population, overall and
by subgroup.
"""

import math
from typing import Callable, Sequence

import numpy as np
from msgspec import Struct, field

from ..config import SamplanError, SchemaError
from ..popgen import TargetPopulation
from .calibration import calibration_fit
from .discrimination import c_statistic
from .error import prediction_error, r2_measures
from .utility import WINNER_ORDER, Winner, net_benefit, value_of_information

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


NAN = float("nan")

# Output order of threshold-independent metrics
BASE_METRICS = (
    "c_stat",
    "c_degradation",
    "cal_slope",
    "cal_intercept",
    "mape",
    "rmspe",
    "r2_cox_snell",
    "r2_nagelkerke",
    "r2_cox_snell_degradation",
    "r2_nagelkerke_degradation",
)
# Output order of per-threshold metrics
THRESHOLD_METRICS = (
    "nb_model",
    "nb_max",
    "nb_treat_all",
    "nb_treat_none",
    "nb_winner",
    "nb_degradation",
    "nb_winner_degradation",
    "rvsi_model",
    "rvsi_winner",
    "winner_model",
    "winner_treat_all",
    "winner_treat_none",
)
METRIC_NAMES = BASE_METRICS + THRESHOLD_METRICS


class ThresholdDraw(Struct):
    threshold: float
    nb_model: float = NAN
    nb_max: float = NAN
    nb_treat_all: float = NAN
    nb_winner: float = NAN
    rvsi_model: float = NAN
    rvsi_winner: float = NAN
    winner: Winner | None = None


class MetricDraw(Struct):
    """Metric values of one model; NaN marks a missing value."""

    c_stat: float = NAN
    c_degradation: float = NAN
    cal_slope: float = NAN
    cal_intercept: float = NAN
    mape: float = NAN
    rmspe: float = NAN
    r2_cox_snell: float = NAN
    r2_nagelkerke: float = NAN
    r2_cox_snell_degradation: float = NAN
    r2_nagelkerke_degradation: float = NAN
    thresholds: list[ThresholdDraw] = field(default_factory=list)
    subgroup_breakdowns: dict[str, "MetricDraw"] | None = None
    # metric -> why it is missing
    missing: dict[str, str] = field(default_factory=dict)

    @property
    def nb_treat_none(self) -> float:
        return 0.0

    def values(self, threshold_index: int | None = None) -> dict[str, float]:
        """Flat metric -> value map for one threshold (or base metrics only)."""
        out = {name: float(getattr(self, name)) for name in BASE_METRICS}
        if threshold_index is None:
            return out
        row = self.thresholds[threshold_index]
        out.update(
            nb_model=row.nb_model,
            nb_max=row.nb_max,
            nb_treat_all=row.nb_treat_all,
            nb_treat_none=0.0,
            nb_winner=row.nb_winner,
            nb_degradation=row.nb_model - row.nb_max,
            nb_winner_degradation=row.nb_winner - row.nb_max,
            rvsi_model=row.rvsi_model,
            rvsi_winner=row.rvsi_winner,
        )
        for choice in WINNER_ORDER:
            out[f"winner_{choice}"] = NAN if row.winner is None else float(row.winner == choice)
        return out


class ReferenceMetrics(Struct):
    """Reference-model performance on one population, used for degradation."""

    c_stat: float
    r2_cox_snell: float
    r2_nagelkerke: float
    nb_max: dict[float, float]
    subgroups: dict[str, "ReferenceMetrics"] | None = None


def _attempt(missing: dict[str, str], names: tuple[str, ...], compute: Callable[[], object]):
    """Run a metric computation; on failure record every name as missing."""
    try:
        return compute()
    except SamplanError as error:
        for name in names:
            missing[name] = str(error)
        return None


def _reference_block(
    true_risks: np.ndarray, outcomes: np.ndarray, thresholds: Sequence[float]
) -> ReferenceMetrics:
    scratch: dict[str, str] = {}
    cstat = _attempt(scratch, ("c_stat",), lambda: c_statistic(true_risks, outcomes))
    r2 = _attempt(scratch, ("r2",), lambda: r2_measures(true_risks, outcomes))
    return ReferenceMetrics(
        c_stat=NAN if cstat is None else cstat,
        r2_cox_snell=NAN if r2 is None else r2[0],
        r2_nagelkerke=NAN if r2 is None else r2[1],
        nb_max={t: net_benefit(true_risks, outcomes, t) for t in thresholds},
    )


def _group_masks(labels: np.ndarray, only: Sequence[str] | None = None) -> dict[str, np.ndarray]:
    present = sorted({str(label) for label in labels})
    chosen = present if only is None else list(only)
    unknown = [label for label in chosen if label not in present]
    if unknown:
        raise SchemaError(f"Unknown subgroup label(s): {unknown}")
    as_text = np.asarray(labels).astype(str)
    return {label: as_text == label for label in chosen}


def reference_metrics(population: TargetPopulation, thresholds: Sequence[float]) -> ReferenceMetrics:
    """Reference performance overall and within each subgroup."""
    overall = _reference_block(population.true_risk, population.outcome, thresholds)
    groups = population.casemix.groups
    if groups is not None:
        overall.subgroups = {
            label: _reference_block(population.true_risk[mask], population.outcome[mask], thresholds)
            for label, mask in _group_masks(groups).items()
        }
    return overall


def score_risks(
    model_risks: np.ndarray,
    true_risks: np.ndarray,
    outcomes: np.ndarray,
    thresholds: Sequence[float],
    dev_outcomes: np.ndarray,
    dev_model_risks: np.ndarray,
    reference: ReferenceMetrics | None = None,
    winners: dict[float, Winner] | None = None,
) -> MetricDraw:
    """Every metric of one risk vector on one population block."""
    reference = reference or _reference_block(true_risks, outcomes, thresholds)
    draw = MetricDraw()
    missing = draw.missing

    cstat = _attempt(missing, ("c_stat", "c_degradation"), lambda: c_statistic(model_risks, outcomes))
    if cstat is not None:
        draw.c_stat = cstat
        draw.c_degradation = cstat - reference.c_stat

    fit = _attempt(missing, ("cal_intercept", "cal_slope"), lambda: calibration_fit(model_risks, outcomes))
    if fit is not None:
        draw.cal_intercept, draw.cal_slope = fit

    error = _attempt(missing, ("mape", "rmspe"), lambda: prediction_error(model_risks, true_risks))
    if error is not None:
        draw.mape, draw.rmspe = error

    names = ("r2_cox_snell", "r2_nagelkerke", "r2_cox_snell_degradation", "r2_nagelkerke_degradation")
    r2 = _attempt(missing, names, lambda: r2_measures(model_risks, outcomes))
    if r2 is not None:
        draw.r2_cox_snell, draw.r2_nagelkerke = r2
        draw.r2_cox_snell_degradation = r2[0] - reference.r2_cox_snell
        draw.r2_nagelkerke_degradation = r2[1] - reference.r2_nagelkerke

    for t in thresholds:
        voi = value_of_information(
            model_risks,
            true_risks,
            outcomes,
            dev_outcomes,
            dev_model_risks,
            t,
            nb_max=reference.nb_max.get(t),
            winner=None if winners is None else winners.get(t),
        )
        if not voi.rvsi_defined:
            missing[f"rvsi@{t:g}"] = "reference net benefit is not positive"
        draw.thresholds.append(
            ThresholdDraw(
                threshold=t,
                nb_model=voi.nb_model,
                nb_max=voi.nb_max,
                nb_treat_all=voi.nb_treat_all,
                nb_winner=voi.nb_winner,
                rvsi_model=voi.rvsi_model,
                rvsi_winner=voi.rvsi_winner,
                winner=voi.winner,
            )
        )
    return draw


def subgroup_report(
    model_risks: np.ndarray,
    true_risks: np.ndarray,
    outcomes: np.ndarray,
    labels: np.ndarray,
    thresholds: Sequence[float],
    dev_outcomes: np.ndarray,
    dev_model_risks: np.ndarray,
    reference: ReferenceMetrics | None = None,
    winners: dict[float, Winner] | None = None,
    only: Sequence[str] | None = None,
) -> dict[str, MetricDraw]:
    """Metrics recomputed within each subgroup; the winner stays the overall one."""
    report = {}
    for label, mask in _group_masks(labels, only).items():
        sub_reference = None
        if reference is not None and reference.subgroups is not None:
            sub_reference = reference.subgroups.get(label)
        report[label] = score_risks(
            model_risks[mask],
            true_risks[mask],
            outcomes[mask],
            thresholds,
            dev_outcomes,
            dev_model_risks,
            reference=sub_reference,
            winners=winners,
        )
    return report


def evaluate_model(
    model_risks: np.ndarray,
    population: TargetPopulation,
    thresholds: Sequence[float],
    dev_outcomes: np.ndarray,
    dev_model_risks: np.ndarray,
    reference: ReferenceMetrics | None = None,
) -> MetricDraw:
    """Overall metrics plus a breakdown per subgroup when the case-mix has labels."""
    reference = reference or reference_metrics(population, thresholds)
    draw = score_risks(
        model_risks,
        population.true_risk,
        population.outcome,
        thresholds,
        dev_outcomes,
        dev_model_risks,
        reference=reference,
    )
    groups = population.casemix.groups
    if groups is not None:
        winners = {row.threshold: row.winner for row in draw.thresholds}
        draw.subgroup_breakdowns = subgroup_report(
            model_risks,
            population.true_risk,
            population.outcome,
            groups,
            thresholds,
            dev_outcomes,
            dev_model_risks,
            reference=reference,
            winners=winners,
        )
    return draw


def is_missing(value: float) -> bool:
    return value is None or math.isnan(value)
