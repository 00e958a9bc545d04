"""
Reference model evaluation and calibration of (intercept, scale) to targets.
"""

from typing import Sequence

import numpy as np
from scipy.special import expit, logit

from ..config import AlignmentError, CalibrationError, UndefinedMetricError, config, logger
from ..seeding import generator
from .schemas import CalibrationSummary, CaseMix, ReferenceModel

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


RISK_FLOOR = 1e-15

SCALE_BRACKET = (0.0, 50.0)
INTERCEPT_BRACKET = (-50.0, 50.0)
MAX_BRACKET_DOUBLINGS = 12


def linear_predictor(model: ReferenceModel, casemix: CaseMix) -> np.ndarray:
    """mu_i = intercept + scale * sum_j weight_j x_ji."""
    rows = casemix.aligned_rows(model.column_names)
    weights = np.asarray(model.weights, dtype=float)
    return model.intercept + model.scale * (rows @ weights)


def reference_risks(model: ReferenceModel, casemix: CaseMix) -> np.ndarray:
    """True risk of every row under the reference model."""
    risks = expit(linear_predictor(model, casemix))
    return np.clip(risks, RISK_FLOOR, 1.0 - RISK_FLOOR)


def _solve_intercept(
    signal: np.ndarray, target_prevalence: float, tol: float, max_iter: int
) -> tuple[float, float]:
    """Bisection on the intercept so that mean risk hits the target."""
    lo, hi = INTERCEPT_BRACKET
    mid = 0.0
    achieved = float("nan")
    for _ in range(max(max_iter, 1)):
        mid = 0.5 * (lo + hi)
        achieved = float(expit(mid + signal).mean())
        if abs(achieved - target_prevalence) <= tol * 1e-3:
            break
        if achieved < target_prevalence:
            lo = mid
        else:
            hi = mid
    return mid, achieved


def calibrate_reference(
    relative_weights: Sequence[float],
    casemix: CaseMix,
    target_cstat: float,
    target_prevalence: float,
    tol: float = 0.005,
    max_iter: int = 60,
    column_names: Sequence[str] | None = None,
    seed: int | None = None,
) -> ReferenceModel:
    """Find (intercept, scale) matching a c-statistic and an overall risk.

    Outer bisection on the scale targets the c-statistic; for each trial scale
    an inner bisection on the intercept targets the prevalence. The
    c-statistic is the rank concordance of true risks against one outcome
    realisation drawn with a fixed internal seed, so the objective is
    deterministic.
    """
    from ..metrics.discrimination import c_statistic

    names = list(column_names) if column_names is not None else casemix.names
    weights = np.asarray(relative_weights, dtype=float)
    if len(weights) != len(names):
        raise AlignmentError(f"{len(weights)} weights for {len(names)} columns")
    if not 0.5 <= target_cstat < 1.0:
        raise CalibrationError(f"Target c-statistic {target_cstat} outside [0.5, 1)")
    if not 0.0 < target_prevalence < 1.0:
        raise CalibrationError(f"Target prevalence {target_prevalence} outside (0, 1)")

    seed = config.calibration_seed if seed is None else seed

    if target_cstat == 0.5:
        intercept = float(logit(target_prevalence))
        return ReferenceModel(
            intercept=intercept,
            scale=0.0,
            weights=weights.tolist(),
            column_names=names,
            calibration=CalibrationSummary(
                target_cstat=target_cstat,
                target_prevalence=target_prevalence,
                achieved_cstat=0.5,
                achieved_prevalence=target_prevalence,
                iterations=0,
                seed=seed,
            ),
        )

    if not np.any(weights != 0):
        raise CalibrationError("Relative weights are all zero; only a c-statistic of 0.5 is reachable")

    raw = casemix.aligned_rows(names) @ weights
    # Bisect on the centred signal; its mean is folded back into the intercept
    offset = float(raw.mean())
    signal = raw - offset
    uniforms = generator(seed).random(casemix.n_rows)

    def evaluate(scale: float) -> tuple[float, float, float]:
        intercept, prevalence = _solve_intercept(scale * signal, target_prevalence, tol, max_iter)
        risks = expit(intercept + scale * signal)
        outcomes = (uniforms < risks).astype(np.int8)
        try:
            cstat = c_statistic(risks, outcomes)
        except UndefinedMetricError:
            # A single outcome class only happens once risks saturate
            logger.debug("Saturated calibration step", scale=scale)
            cstat = 1.0
        return cstat, intercept, prevalence

    lo, hi = SCALE_BRACKET
    c_hi, _, _ = evaluate(hi)
    doublings = 0
    while c_hi < target_cstat:
        if doublings >= MAX_BRACKET_DOUBLINGS:
            raise CalibrationError(
                f"Target c-statistic {target_cstat} is unreachable with these weights "
                f"(c = {c_hi:.4f} at scale {hi:g})",
                achieved_cstat=c_hi,
            )
        lo, hi = hi, 2.0 * hi
        c_hi, _, _ = evaluate(hi)
        doublings += 1

    best = None
    iterations = 0
    for iterations in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        cstat, intercept, prevalence = evaluate(mid)
        gap = abs(cstat - target_cstat)
        if best is None or gap < best[0]:
            best = (gap, mid, intercept, cstat, prevalence)
        if gap <= tol * 1e-2:
            break
        if cstat < target_cstat:
            lo = mid
        else:
            hi = mid

    _, scale, centred_intercept, cstat, prevalence = best
    intercept = centred_intercept - scale * offset
    if abs(cstat - target_cstat) > tol or abs(prevalence - target_prevalence) > tol:
        raise CalibrationError(
            f"Calibration did not converge in {max_iter} iterations "
            f"(c = {cstat:.4f}, prevalence = {prevalence:.4f})",
            achieved_cstat=cstat,
            achieved_prevalence=prevalence,
            iterations=iterations,
        )

    logger.info(
        "Reference calibrated",
        scale=round(scale, 6),
        intercept=round(intercept, 6),
        cstat=round(cstat, 4),
        prevalence=round(prevalence, 4),
        iterations=iterations,
    )
    return ReferenceModel(
        intercept=float(intercept),
        scale=float(scale),
        weights=weights.tolist(),
        column_names=names,
        calibration=CalibrationSummary(
            target_cstat=target_cstat,
            target_prevalence=target_prevalence,
            achieved_cstat=float(cstat),
            achieved_prevalence=float(prevalence),
            iterations=iterations,
            seed=seed,
        ),
    )
