"""
Performance and degradation statistics of fitted models.
"""

from .calibration import CalibrationCurve, calibration_curve, calibration_fit, curve_grid, spline_basis
from .discrimination import c_statistic
from .draw import (
    BASE_METRICS,
    METRIC_NAMES,
    THRESHOLD_METRICS,
    MetricDraw,
    ReferenceMetrics,
    ThresholdDraw,
    evaluate_model,
    is_missing,
    reference_metrics,
    score_risks,
    subgroup_report,
)
from .error import bernoulli_log_likelihood, prediction_error, r2_measures
from .instability import interval_widths, misclassification_prob
from .utility import (
    ValueOfInformation,
    choose_winner,
    net_benefit,
    treat_all_net_benefit,
    value_of_information,
)

__all__ = [
    # Records
    "CalibrationCurve",
    "MetricDraw",
    "ThresholdDraw",
    "ReferenceMetrics",
    "ValueOfInformation",
    "BASE_METRICS",
    "THRESHOLD_METRICS",
    "METRIC_NAMES",
    # Metrics
    "c_statistic",
    "calibration_fit",
    "calibration_curve",
    "curve_grid",
    "spline_basis",
    "prediction_error",
    "r2_measures",
    "bernoulli_log_likelihood",
    "net_benefit",
    "treat_all_net_benefit",
    "choose_winner",
    "value_of_information",
    "misclassification_prob",
    "interval_widths",
    # Reports
    "evaluate_model",
    "reference_metrics",
    "score_risks",
    "subgroup_report",
    "is_missing",
]

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"
