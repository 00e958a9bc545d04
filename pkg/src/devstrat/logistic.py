"""
Unpenalised logistic regression and heuristic uniform shrinkage.
"""

import numpy as np
from msgspec import Struct
from scipy import linalg
from scipy.special import expit, logit

from ..config import ConfigurationError, ConvergenceError, DegenerateOutcomeError, logger
from ..popgen import DevelopmentSample
from .design import check_outcome, column_scale, standardize, with_intercept
from .schemas import Diagnostics, FittedModel

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


SEPARATION_COEFFICIENT = 20.0
MAX_HALVINGS = 30


class IrlsResult(Struct):
    coefficients: np.ndarray
    converged: bool
    iterations: int
    max_score: float
    separation: bool
    log_likelihood: float


def log_likelihood(eta: np.ndarray, y: np.ndarray) -> float:
    """Bernoulli log-likelihood on the logit scale."""
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def _newton_step(design: np.ndarray, weights: np.ndarray, gradient: np.ndarray) -> np.ndarray:
    hessian = design.T @ (design * weights[:, None])
    try:
        return linalg.solve(hessian, gradient, assume_a="pos")
    except (linalg.LinAlgError, ValueError):
        return linalg.lstsq(hessian, gradient)[0]


def irls(
    design: np.ndarray,
    y: np.ndarray,
    offset: np.ndarray | None = None,
    max_iter: int = 50,
    tol: float = 1e-8,
    start: np.ndarray | None = None,
    coefficient_limit: float | None = SEPARATION_COEFFICIENT,
) -> IrlsResult:
    """Newton-Raphson with step halving for a logistic GLM.

    ``design`` includes any intercept column. Converged when the largest
    absolute score component drops below ``tol``. Separation is flagged when
    fitted risks reproduce the outcomes, or when a non-converged fit has a
    coefficient beyond ``coefficient_limit``.
    """
    y = np.asarray(y, dtype=float)
    if y.sum() == 0 or y.sum() == y.shape[0]:
        raise DegenerateOutcomeError("Degenerate outcome: a single class is present")
    offset = np.zeros(y.shape[0]) if offset is None else offset
    beta = np.zeros(design.shape[1]) if start is None else np.array(start, dtype=float)

    eta = offset + design @ beta
    current = log_likelihood(eta, y)
    score = design.T @ (y - expit(eta))
    max_score = float(np.max(np.abs(score)))
    iterations = 0
    converged = max_score < tol

    while not converged and iterations < max_iter:
        iterations += 1
        p = expit(eta)
        step = _newton_step(design, p * (1.0 - p), score)
        if not np.all(np.isfinite(step)):
            break
        t = 1.0
        for _ in range(MAX_HALVINGS):
            candidate = beta + t * step
            cand_eta = offset + design @ candidate
            cand_ll = log_likelihood(cand_eta, y)
            if cand_ll >= current - 1e-12 * abs(current):
                break
            t *= 0.5
        beta, eta, current = candidate, cand_eta, cand_ll
        score = design.T @ (y - expit(eta))
        max_score = float(np.max(np.abs(score)))
        converged = max_score < tol

    fitted = expit(eta)
    perfect = bool(np.all(np.abs(fitted - y) < 1e-8))
    # Large coefficients only signal separation when the fit failed to converge
    large = coefficient_limit is not None and bool(np.any(np.abs(beta) > coefficient_limit))
    separation = perfect or (large and not converged)
    if separation:
        converged = False
    return IrlsResult(
        coefficients=beta,
        converged=converged,
        iterations=iterations,
        max_score=max_score,
        separation=separation,
        log_likelihood=current,
    )


def fit_mle_logistic(sample: DevelopmentSample, max_iter: int = 50, tol: float = 1e-8) -> FittedModel:
    """Unpenalised logistic regression on standardised predictors."""
    y = check_outcome(sample)
    scale = column_scale(sample.casemix)
    design = with_intercept(standardize(sample.casemix, scale))
    result = irls(design, y, max_iter=max_iter, tol=tol)

    diagnostics = Diagnostics(
        converged=result.converged,
        iterations=result.iterations,
        separation=result.separation,
    )
    if result.separation:
        diagnostics.warnings.append("separation detected")
        logger.debug("Separation in development sample", n=sample.n, seed=sample.seed_id)
    elif not result.converged:
        diagnostics.warnings.append(f"IRLS stopped after {result.iterations} iterations")

    return FittedModel(
        kind="mle",
        column_names=sample.casemix.names,
        scale=scale,
        coefficients=result.coefficients.tolist(),
        diagnostics=diagnostics,
    )


def shrinkage_factor(lr_statistic: float, n_parameters: int) -> float:
    """(LR - P) / LR; zero when the model carries no signal."""
    if lr_statistic <= 0:
        return 0.0
    return (lr_statistic - n_parameters) / lr_statistic


def shrink_uniform(fitted: FittedModel, sample: DevelopmentSample) -> FittedModel:
    """Uniformly shrink slopes and re-estimate the intercept."""
    if fitted.kind != "mle":
        raise ConfigurationError(f"Uniform shrinkage applies to 'mle' fits, got '{fitted.kind}'")
    if not fitted.diagnostics.converged:
        raise ConvergenceError(
            "Uniform shrinkage needs a converged unpenalised fit",
            iterations=fitted.diagnostics.iterations,
        )

    y = check_outcome(sample)
    design = standardize(sample.casemix, fitted.scale)
    slopes = fitted.slopes
    n_parameters = slopes.shape[0]
    prevalence = float(y.mean())

    full_ll = log_likelihood(fitted.intercept + design @ slopes, y)
    null_ll = log_likelihood(np.full(y.shape[0], logit(prevalence)), y)
    lr_statistic = 2.0 * (full_ll - null_ll)
    factor = shrinkage_factor(lr_statistic, n_parameters)

    if factor <= 0:
        shrunk = np.zeros(n_parameters)
        intercept = float(logit(prevalence))
    else:
        shrunk = factor * slopes
        refit = irls(
            np.ones((y.shape[0], 1)),
            y,
            offset=design @ shrunk,
            start=np.array([fitted.intercept]),
            coefficient_limit=None,
        )
        intercept = float(refit.coefficients[0])

    diagnostics = Diagnostics(
        converged=True,
        iterations=fitted.diagnostics.iterations,
        shrinkage_factor=factor,
    )
    if factor <= 0:
        diagnostics.warnings.append("non-positive shrinkage factor, slopes set to zero")

    return FittedModel(
        kind="shrunk",
        column_names=fitted.column_names,
        scale=fitted.scale,
        coefficients=[intercept, *shrunk.tolist()],
        diagnostics=diagnostics,
    )
