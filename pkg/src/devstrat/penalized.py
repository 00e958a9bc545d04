"""
Ridge and lasso logistic regression by coordinate descent, tuned by
cross-validated deviance.

Objective on the sum scale with an unpenalised intercept:
    lasso: -loglik + lambda * sum |b_j|
    ridge: -loglik + lambda / 2 * sum b_j^2
"""

import math
import warnings
from typing import Sequence

import numpy as np
from msgspec import Struct
from numba import njit
from scipy.special import expit, logit
from sklearn.model_selection import StratifiedKFold

from ..config import ConfigurationError, InsufficientDataError, logger
from ..popgen import DevelopmentSample
from ..seeding import generator
from .design import check_outcome, column_scale, standardize
from .logistic import log_likelihood
from .schemas import Diagnostics, FittedModel, PenaltyFamily

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


WEIGHT_FLOOR = 1e-5
PROB_CLAMP = 1e-10
GRID_SIZE = 100
GRID_RATIO = 1e-4
RIDGE_GRID_FACTOR = 1e3
MAX_OUTER = 100
MAX_SWEEPS = 10_000


class PenalizedFit(Struct):
    intercept: float
    slopes: np.ndarray
    kkt_residual: float
    iterations: int
    converged: bool


@njit(cache=True)
def _soft_threshold(value, threshold):
    if value > threshold:
        return value - threshold
    if value < -threshold:
        return value + threshold
    return 0.0


@njit(cache=True)
def _cd_weighted(design, weights, response, intercept, slopes, lam, lasso, tol, max_sweeps):
    """Coordinate descent on 0.5 * sum w (r - b0 - Xb)^2 + penalty."""
    n, q = design.shape
    b = slopes.copy()
    residual = response - intercept
    for i in range(n):
        for j in range(q):
            residual[i] -= design[i, j] * b[j]
    total_weight = 0.0
    for i in range(n):
        total_weight += weights[i]

    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        largest = 0.0

        shift = 0.0
        for i in range(n):
            shift += weights[i] * residual[i]
        shift /= total_weight
        intercept += shift
        for i in range(n):
            residual[i] -= shift
        largest = max(largest, abs(shift))

        for j in range(q):
            old = b[j]
            numerator = 0.0
            curvature = 0.0
            for i in range(n):
                wx = weights[i] * design[i, j]
                numerator += wx * (residual[i] + design[i, j] * old)
                curvature += wx * design[i, j]
            if lasso:
                new = _soft_threshold(numerator, lam) / curvature
            else:
                new = numerator / (curvature + lam)
            if new != old:
                delta = new - old
                for i in range(n):
                    residual[i] -= design[i, j] * delta
                b[j] = new
                largest = max(largest, abs(delta) * math.sqrt(curvature))
        if largest < tol:
            break
    return intercept, b, sweeps


def penalty(slopes: np.ndarray, lam: float, family: PenaltyFamily) -> float:
    if family == "lasso":
        return lam * float(np.sum(np.abs(slopes)))
    return 0.5 * lam * float(np.dot(slopes, slopes))


def penalized_objective(
    intercept: float, slopes: np.ndarray, design: np.ndarray, y: np.ndarray, lam: float, family: PenaltyFamily
) -> float:
    """Penalised negative log-likelihood on the sum scale."""
    eta = intercept + design @ slopes
    return -log_likelihood(eta, y) + penalty(slopes, lam, family)


def kkt_residual(
    intercept: float, slopes: np.ndarray, design: np.ndarray, y: np.ndarray, lam: float, family: PenaltyFamily
) -> float:
    """Largest violation of the stationarity conditions."""
    resid = y - expit(intercept + design @ slopes)
    worst = abs(float(resid.sum()))
    if slopes.size == 0:
        return worst
    gradient = design.T @ resid
    if family == "lasso":
        active = slopes != 0
        violation = np.where(
            active,
            np.abs(gradient - lam * np.sign(slopes)),
            np.maximum(0.0, np.abs(gradient) - lam),
        )
    else:
        violation = np.abs(gradient - lam * slopes)
    return max(worst, float(violation.max()))


def fit_penalized(
    design: np.ndarray,
    y: np.ndarray,
    lam: float,
    family: PenaltyFamily,
    tol: float = 1e-6,
    start: tuple[float, np.ndarray] | None = None,
    max_outer: int = MAX_OUTER,
) -> PenalizedFit:
    """Penalised logistic fit at one lambda by IRLS with a coordinate-descent inner solver."""
    q = design.shape[1]
    if start is None:
        intercept, slopes = float(logit(np.clip(y.mean(), PROB_CLAMP, 1 - PROB_CLAMP))), np.zeros(q)
    else:
        intercept, slopes = float(start[0]), np.array(start[1], dtype=float)
    lasso = family == "lasso"

    current = penalized_objective(intercept, slopes, design, y, lam, family)
    residual = kkt_residual(intercept, slopes, design, y, lam, family)
    iterations = 0
    inner_tol = max(tol * 1e-3, 1e-13)
    while residual >= tol and iterations < max_outer:
        iterations += 1
        eta = intercept + design @ slopes
        p = expit(eta)
        weights = np.maximum(p * (1.0 - p), WEIGHT_FLOOR)
        response = eta + (y - p) / weights
        new_intercept, new_slopes, _ = _cd_weighted(
            design, weights, response, intercept, slopes, lam, lasso, inner_tol, MAX_SWEEPS
        )

        step_intercept = new_intercept - intercept
        step_slopes = new_slopes - slopes
        t = 1.0
        while True:
            cand_intercept = intercept + t * step_intercept
            cand_slopes = slopes + t * step_slopes
            candidate = penalized_objective(cand_intercept, cand_slopes, design, y, lam, family)
            if candidate <= current + 1e-12 * abs(current) or t < 1e-8:
                break
            t *= 0.5

        moved = abs(candidate - current)
        intercept, slopes, current = cand_intercept, cand_slopes, candidate
        residual = kkt_residual(intercept, slopes, design, y, lam, family)
        if moved == 0.0 and residual >= tol:
            break

    return PenalizedFit(
        intercept=intercept,
        slopes=slopes,
        kkt_residual=residual,
        iterations=iterations,
        converged=residual < tol,
    )


def lambda_grid(
    design: np.ndarray, y: np.ndarray, family: PenaltyFamily, size: int = GRID_SIZE
) -> np.ndarray:
    """Decreasing log-spaced grid from the smallest all-zero lasso lambda."""
    if design.shape[1] == 0:
        return np.array([0.0])
    lam_max = float(np.max(np.abs(design.T @ (y - y.mean()))))
    if lam_max <= 0:
        lam_max = 1.0
    if family == "ridge":
        lam_max *= RIDGE_GRID_FACTOR
    return np.geomspace(lam_max, lam_max * GRID_RATIO, size)


def _path(
    design: np.ndarray, y: np.ndarray, grid: np.ndarray, family: PenaltyFamily, tol: float
) -> list[PenalizedFit]:
    """Warm-started fits along the grid in the given order."""
    fits = []
    start = None
    for lam in grid:
        fit = fit_penalized(design, y, float(lam), family, tol=tol, start=start)
        fits.append(fit)
        start = (fit.intercept, fit.slopes)
    return fits


def _deviance(risks: np.ndarray, y: np.ndarray) -> float:
    p = np.clip(risks, PROB_CLAMP, 1.0 - PROB_CLAMP)
    return -2.0 * math.fsum(y * np.log(p) + (1.0 - y) * np.log1p(-p))


def _fold_seed(rng_seed: int) -> int:
    return int(generator(rng_seed).integers(0, 2**32 - 1))


def cross_validated_deviance(
    sample: DevelopmentSample,
    family: PenaltyFamily,
    grid: np.ndarray,
    folds: int,
    rng_seed: int,
    tol: float,
) -> np.ndarray:
    """Mean held-out deviance per lambda, folds stratified by outcome."""
    y = np.asarray(sample.outcome, dtype=float)
    n = y.shape[0]
    splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=_fold_seed(rng_seed))
    totals = np.zeros((folds, grid.shape[0]))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        splits = list(splitter.split(np.zeros(n), y))

    for k, (train, held_out) in enumerate(splits):
        train_mix = sample.casemix.take(train)
        held_mix = sample.casemix.take(held_out)
        y_train, y_held = y[train], y[held_out]
        events = y_train.sum()
        if events == 0 or events == y_train.shape[0]:
            constant = np.full(held_out.shape[0], y_train.mean())
            totals[k, :] = _deviance(constant, y_held)
            continue
        scale = column_scale(train_mix)
        train_design = standardize(train_mix, scale)
        held_design = standardize(held_mix, scale)
        # sum-scale penalty, so lambda follows the fold size
        fold_grid = grid * (train.shape[0] / n)
        for m, fit in enumerate(_path(train_design, y_train, fold_grid, family, tol)):
            risks = expit(fit.intercept + held_design @ fit.slopes)
            totals[k, m] = _deviance(risks, y_held)

    return np.array([math.fsum(totals[:, m]) / n for m in range(grid.shape[0])])


def fit_penalized_cv(
    sample: DevelopmentSample,
    family: PenaltyFamily,
    folds: int = 10,
    lambda_grid_values: Sequence[float] | None = None,
    rng_seed: int = 0,
    tol: float = 1e-6,
) -> FittedModel:
    """Penalised logistic regression with lambda chosen by k-fold CV deviance."""
    y = check_outcome(sample)
    if sample.n < folds:
        raise InsufficientDataError(
            f"{folds}-fold cross-validation needs at least {folds} rows, got {sample.n}"
        )
    # folds cannot outnumber the larger outcome class
    folds = max(2, min(folds, int(max(y.sum(), y.shape[0] - y.sum()))))

    scale = column_scale(sample.casemix)
    design = standardize(sample.casemix, scale)
    if lambda_grid_values is None:
        grid = lambda_grid(design, y, family)
    else:
        grid = np.sort(np.asarray(lambda_grid_values, dtype=float))[::-1]
        if grid.size == 0 or np.any(grid < 0):
            raise ConfigurationError("Lambda grid must hold non-negative values")

    if grid.shape[0] == 1:
        selected = 0
    else:
        deviance = cross_validated_deviance(sample, family, grid, folds, rng_seed, tol)
        best = deviance.min()
        # first hit in a decreasing grid is the largest tied lambda
        selected = int(np.flatnonzero(deviance == best)[0])

    fits = _path(design, y, grid[: selected + 1], family, tol)
    final = fits[-1]
    lam = float(grid[selected])

    diagnostics = Diagnostics(
        converged=final.converged,
        iterations=final.iterations,
        selected_lambda=lam,
        kkt_residual=final.kkt_residual,
    )
    if not final.converged:
        diagnostics.warnings.append(f"KKT residual {final.kkt_residual:.3g} above {tol:g}")
        logger.debug("Penalised fit not converged", family=family, residual=final.kkt_residual)

    return FittedModel(
        kind=f"{family}_cv",
        column_names=sample.casemix.names,
        scale=scale,
        coefficients=[final.intercept, *final.slopes.tolist()],
        diagnostics=diagnostics,
    )
