"""
Calibration slope, calibration-in-the-large and flexible calibration curves.
"""

import numpy as np
from msgspec import Struct
from scipy.special import expit, logit

from ..config import ConvergenceError, DegenerateRecalibrationError
from ..devstrat.logistic import irls

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


RISK_CLAMP = 1e-10
DEFAULT_KNOT_QUANTILES = (5.0, 35.0, 65.0, 95.0)
GRID_POINTS = 100


class CalibrationCurve(Struct):
    """Smoothed observed risk against estimated risk on a grid."""

    grid: np.ndarray
    observed: np.ndarray
    # Knots on the logit scale
    knots: list[float]


def _logit_risks(risks: np.ndarray) -> np.ndarray:
    return logit(np.clip(np.asarray(risks, dtype=float), RISK_CLAMP, 1.0 - RISK_CLAMP))


def _score_tol(n: int) -> float:
    return 1e-8 * max(1, n)


def calibration_fit(risks: np.ndarray, outcomes: np.ndarray) -> tuple[float, float]:
    """(intercept, slope) of logit(p) = a + b * logit(estimated risk)."""
    lp = _logit_risks(risks)
    if np.ptp(lp) == 0:
        raise DegenerateRecalibrationError("Degenerate recalibration: estimated risks are constant")
    design = np.column_stack([np.ones(lp.shape[0]), lp])
    result = irls(
        design,
        np.asarray(outcomes, dtype=float),
        tol=_score_tol(lp.shape[0]),
        coefficient_limit=None,
    )
    if not result.converged:
        raise ConvergenceError(
            "Recalibration model did not converge",
            iterations=result.iterations,
            residual=result.max_score,
        )
    return float(result.coefficients[0]), float(result.coefficients[1])


def spline_basis(x: np.ndarray, knots: np.ndarray) -> np.ndarray:
    """Restricted cubic spline basis (linear term first), scaled by the knot span."""
    k = knots.shape[0]
    columns = [x]
    if k < 3:
        return np.column_stack(columns)
    last, penultimate = knots[-1], knots[-2]
    span = (last - knots[0]) ** 2
    for j in range(k - 2):
        term = (
            np.maximum(x - knots[j], 0.0) ** 3
            - np.maximum(x - penultimate, 0.0) ** 3 * (last - knots[j]) / (last - penultimate)
            + np.maximum(x - last, 0.0) ** 3 * (penultimate - knots[j]) / (last - penultimate)
        )
        columns.append(term / span)
    return np.column_stack(columns)


def curve_grid(risks: np.ndarray, points: int = GRID_POINTS) -> np.ndarray:
    """Evenly spaced risks from the 1st to the 99th percentile, inside (0, 1)."""
    lo, hi = np.percentile(np.asarray(risks, dtype=float), [1.0, 99.0], method="linear")
    lo = max(float(lo), RISK_CLAMP)
    hi = min(float(hi), 1.0 - RISK_CLAMP)
    if not hi > lo:
        raise DegenerateRecalibrationError("Degenerate recalibration: no spread in estimated risks")
    return np.linspace(lo, hi, points)


def calibration_curve(
    risks: np.ndarray,
    outcomes: np.ndarray,
    n_knots: int = 4,
    grid: np.ndarray | None = None,
) -> CalibrationCurve:
    """Logistic regression of outcomes on a spline of logit(estimated risk)."""
    lp = _logit_risks(risks)
    if np.ptp(lp) == 0:
        raise DegenerateRecalibrationError("Degenerate recalibration: estimated risks are constant")
    quantiles = (
        DEFAULT_KNOT_QUANTILES if n_knots == 4 else np.linspace(5.0, 95.0, n_knots)
    )
    knots = np.unique(np.percentile(lp, quantiles, method="linear"))
    basis = spline_basis(lp, knots)
    design = np.column_stack([np.ones(lp.shape[0]), basis])
    result = irls(
        design,
        np.asarray(outcomes, dtype=float),
        tol=_score_tol(lp.shape[0]),
        coefficient_limit=None,
    )
    if not result.converged:
        raise ConvergenceError(
            "Calibration curve fit did not converge",
            iterations=result.iterations,
            residual=result.max_score,
        )

    grid = curve_grid(risks) if grid is None else np.asarray(grid, dtype=float)
    grid_design = np.column_stack([np.ones(grid.shape[0]), spline_basis(_logit_risks(grid), knots)])
    observed = np.clip(expit(grid_design @ result.coefficients), RISK_CLAMP, 1.0 - RISK_CLAMP)
    return CalibrationCurve(grid=grid, observed=observed, knots=knots.tolist())
