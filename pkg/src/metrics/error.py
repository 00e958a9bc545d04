"""
Prediction error against true risks and explained variation.
"""

import math

import numpy as np

from ..config import UndefinedMetricError

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


RISK_CLAMP = 1e-10


def prediction_error(est: np.ndarray, truth: np.ndarray) -> tuple[float, float]:
    """(MAPE, RMSPE) of estimated against true risks."""
    est = np.asarray(est, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if est.shape != truth.shape:
        raise ValueError(f"Length mismatch: {est.shape[0]} estimates for {truth.shape[0]} true risks")
    if est.size == 0:
        raise UndefinedMetricError("Prediction error of an empty population")
    diff = est - truth
    n = diff.shape[0]
    mape = math.fsum(np.abs(diff)) / n
    rmspe = math.sqrt(math.fsum(diff * diff) / n)
    return mape, rmspe


def bernoulli_log_likelihood(risks: np.ndarray, outcomes: np.ndarray) -> float:
    p = np.clip(np.asarray(risks, dtype=float), RISK_CLAMP, 1.0 - RISK_CLAMP)
    y = np.asarray(outcomes, dtype=float)
    return math.fsum(y * np.log(p) + (1.0 - y) * np.log1p(-p))


def r2_measures(risks: np.ndarray, outcomes: np.ndarray) -> tuple[float, float]:
    """(Cox-Snell, Nagelkerke) R^2 of the supplied risks."""
    y = np.asarray(outcomes, dtype=float)
    n = y.shape[0]
    prevalence = float(y.mean()) if n else 0.0
    if prevalence in (0.0, 1.0):
        raise UndefinedMetricError("R^2 needs both outcome classes")
    model_ll = bernoulli_log_likelihood(risks, y)
    null_ll = n * (prevalence * math.log(prevalence) + (1 - prevalence) * math.log1p(-prevalence))
    cox_snell = 1.0 - math.exp(-(2.0 / n) * (model_ll - null_ll))
    max_cox_snell = 1.0 - math.exp((2.0 / n) * null_ll)
    return cox_snell, cox_snell / max_cox_snell
