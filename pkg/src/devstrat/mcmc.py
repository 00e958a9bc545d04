"""
Adaptive random-walk Metropolis-Hastings over (coefficients, log lambda^2)
under ridge or lasso shrinkage priors.
"""

import math
from typing import Callable

import numpy as np
from msgspec import Struct
from scipy import linalg

from ..config import logger
from .schemas import McmcConfig, PriorSpec

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


RIDGE_SHAPE = 0.01
RIDGE_SCALE = 0.01
LASSO_RATE = 1.0 / 1.78

ACCEPTANCE_FLOOR = 0.05
SPLIT_CHAIN_MCSE = 4.0
BATCHES = 20
TAU_STEP = 1.0


class ChainResult(Struct):
    # retained draws x (1 + slopes), intercept first
    draws: np.ndarray
    lambda_sq: np.ndarray
    acceptance: float
    split_chain_ok: bool
    warnings: list[str]


def log_prior_coefficients(coefficients: np.ndarray, tau: float, prior: PriorSpec) -> float:
    """Log prior of (intercept, slopes) given tau = log lambda^2, up to a constant."""
    value = -0.5 * coefficients[0] ** 2 / prior.intercept_variance
    slopes = coefficients[1:]
    q = slopes.shape[0]
    if prior.family == "ridge":
        return value - 0.5 * q * tau - 0.5 * float(np.dot(slopes, slopes)) * math.exp(-tau)
    # Laplace(0, 1 / lambda): log(lambda / 2) - lambda |b|
    return value + 0.5 * q * tau - math.exp(0.5 * tau) * float(np.sum(np.abs(slopes)))


def log_prior_tau(tau: float, prior: PriorSpec) -> float:
    """Hyperprior density of tau = log lambda^2, Jacobian included."""
    if prior.family == "ridge":
        # lambda^2 ~ InvGamma(shape, scale)
        return -RIDGE_SHAPE * tau - RIDGE_SCALE * math.exp(-tau)
    # lambda^2 ~ Gamma(1, rate)
    return tau - LASSO_RATE * math.exp(tau)


def batch_mcse(values: np.ndarray, batches: int = BATCHES) -> np.ndarray:
    """Batch-means Monte-Carlo standard error per column."""
    n = values.shape[0]
    batches = max(2, min(batches, n // 2)) if n >= 4 else 0
    if batches == 0:
        return np.full(values.shape[1], np.inf)
    size = n // batches
    means = values[: size * batches].reshape(batches, size, -1).mean(axis=1)
    return means.std(axis=0, ddof=1) / math.sqrt(batches)


def split_chain_check(draws: np.ndarray) -> bool:
    """First and second halves agree within a few Monte-Carlo standard errors."""
    half = draws.shape[0] // 2
    if half < 4:
        return True
    first, second = draws[:half], draws[half : 2 * half]
    spread = np.sqrt(batch_mcse(first) ** 2 + batch_mcse(second) ** 2)
    gap = np.abs(first.mean(axis=0) - second.mean(axis=0))
    return bool(np.all(gap <= SPLIT_CHAIN_MCSE * spread))


def _proposal_factor(covariance: np.ndarray) -> np.ndarray:
    covariance = 0.5 * (covariance + covariance.T)
    jitter = 0.0
    for _ in range(8):
        try:
            return linalg.cholesky(covariance + jitter * np.eye(covariance.shape[0]), lower=True)
        except linalg.LinAlgError:
            jitter = 1e-10 if jitter == 0 else jitter * 100
    return np.diag(np.sqrt(np.maximum(np.diag(covariance), 1e-10)))


def run_chain(
    log_likelihood: Callable[[np.ndarray], float],
    start: np.ndarray,
    proposal_covariance: np.ndarray,
    prior: PriorSpec,
    mcmc: McmcConfig,
    rng: np.random.Generator,
) -> ChainResult:
    """Two-block Metropolis-Hastings: coefficients, then tau.

    Proposal scales adapt toward the target acceptance once per window during
    burn-in and stay frozen afterwards.
    """
    dimension = start.shape[0]
    factor = _proposal_factor(proposal_covariance)
    scale = mcmc.initial_scale or 2.38 / math.sqrt(dimension)
    tau_scale = TAU_STEP
    sample_tau = prior.fixed_lambda_sq is None

    coefficients = np.array(start, dtype=float)
    tau = math.log(prior.fixed_lambda_sq) if not sample_tau else 0.0
    current_ll = log_likelihood(coefficients)
    current_prior = log_prior_coefficients(coefficients, tau, prior)

    total = mcmc.burn_in + mcmc.thin * mcmc.draws
    draws = np.empty((mcmc.draws, dimension))
    lambda_sq = np.empty(mcmc.draws)
    window_accepts = window_tau_accepts = 0
    kept_accepts = 0
    kept = 0

    for step in range(total):
        proposal = coefficients + scale * (factor @ rng.standard_normal(dimension))
        proposal_ll = log_likelihood(proposal)
        proposal_prior = log_prior_coefficients(proposal, tau, prior)
        log_ratio = proposal_ll + proposal_prior - current_ll - current_prior
        accepted = math.log(rng.random()) < log_ratio
        if accepted:
            coefficients, current_ll, current_prior = proposal, proposal_ll, proposal_prior

        if sample_tau:
            tau_proposal = tau + tau_scale * rng.standard_normal()
            tau_prior = log_prior_coefficients(coefficients, tau_proposal, prior)
            log_ratio = (
                tau_prior + log_prior_tau(tau_proposal, prior) - current_prior - log_prior_tau(tau, prior)
            )
            if math.log(rng.random()) < log_ratio:
                tau, current_prior = tau_proposal, tau_prior
                window_tau_accepts += 1

        if step < mcmc.burn_in:
            window_accepts += accepted
            if (step + 1) % mcmc.adapt_window == 0:
                rate = window_accepts / mcmc.adapt_window
                scale *= math.exp(rate - mcmc.target_acceptance)
                tau_rate = window_tau_accepts / mcmc.adapt_window
                tau_scale *= math.exp(tau_rate - mcmc.target_acceptance)
                window_accepts = window_tau_accepts = 0
            continue

        kept_accepts += accepted
        if (step - mcmc.burn_in + 1) % mcmc.thin == 0:
            draws[kept] = coefficients
            lambda_sq[kept] = math.exp(tau)
            kept += 1

    acceptance = kept_accepts / (mcmc.thin * mcmc.draws)
    split_ok = split_chain_check(draws)
    warnings = []
    if acceptance < ACCEPTANCE_FLOOR:
        warnings.append(f"MCMC acceptance {acceptance:.3f} below {ACCEPTANCE_FLOOR}")
        logger.warning("MCMC acceptance collapse", acceptance=round(acceptance, 4))
    if not split_ok:
        warnings.append("split-chain check failed")
        logger.warning("MCMC split-chain check failed", draws=mcmc.draws)

    return ChainResult(
        draws=draws,
        lambda_sq=lambda_sq,
        acceptance=acceptance,
        split_chain_ok=split_ok,
        warnings=warnings,
    )
