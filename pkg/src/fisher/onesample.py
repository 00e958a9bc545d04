"""
Coefficient draws without refitting: multivariate normal around the
reference coefficients, or a one-sample Bayesian posterior whose likelihood
is that normal approximation.
"""

from typing import Literal

import numpy as np
import pandas as pd
from msgspec import Struct, field
from scipy import linalg

from ..config import ConvergenceError, logger
from ..devstrat import McmcConfig, PriorSpec, run_chain
from ..popgen import ReferenceModel
from ..seeding import generator
from .information import INTERCEPT, UnitInformation

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


JITTER_START = 1e-10
JITTER_STOP = 1e-6

Provenance = Literal["mvn", "bayes_onesample"]


class CoefficientDraws(Struct):
    """Raw-scale coefficient vectors (intercept first), one row per draw."""

    matrix: np.ndarray
    provenance: Provenance
    n_used: int
    column_names: list[str]
    acceptance: float | None = None
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.matrix.ndim != 2 or self.matrix.shape[0] < 1:
            raise ValueError("Coefficient draws need at least one row")
        if self.matrix.shape[1] != len(self.column_names) + 1:
            raise ValueError(
                f"{self.matrix.shape[1]} coefficients for {len(self.column_names)} columns"
            )

    @property
    def n_draws(self) -> int:
        return int(self.matrix.shape[0])

    def to_frame(self) -> pd.DataFrame:
        """draw_id, intercept, then one column per predictor."""
        frame = pd.DataFrame(self.matrix, columns=[INTERCEPT, *self.column_names])
        frame.insert(0, "draw_id", np.arange(self.n_draws))
        return frame


def _check_alignment(model: ReferenceModel, info: UnitInformation) -> None:
    if list(model.column_names) != list(info.column_names):
        raise ValueError("Unit information and reference model have different columns")


def jittered_cholesky(covariance: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, adding 1e-10 up to 1e-6 to the diagonal if needed."""
    covariance = 0.5 * (covariance + covariance.T)
    identity = np.eye(covariance.shape[0])
    jitter = 0.0
    while True:
        try:
            return linalg.cholesky(covariance + jitter * identity, lower=True)
        except linalg.LinAlgError:
            jitter = JITTER_START if jitter == 0.0 else jitter * 10.0
            if jitter > JITTER_STOP * (1 + 1e-9):
                raise ConvergenceError("Covariance is not positive definite") from None
            logger.debug("Cholesky jitter", jitter=jitter)


def draw_mvn_models(
    model: ReferenceModel, info: UnitInformation, n: int, draws: int, rng_seed: int
) -> CoefficientDraws:
    """Draws from MVN(effective coefficients, n^-1 I^-1)."""
    _check_alignment(model, info)
    if n < 1 or draws < 1:
        raise ValueError("n and draws must be >= 1")
    factor = jittered_cholesky(info.covariance(n))
    normals = generator(rng_seed).standard_normal((draws, info.dimension))
    matrix = model.effective_coefficients + normals @ factor.T
    return CoefficientDraws(matrix=matrix, provenance="mvn", n_used=n, column_names=list(model.column_names))


def bayes_onesample(
    model: ReferenceModel,
    info: UnitInformation,
    n: int,
    prior: PriorSpec,
    mcmc: McmcConfig | None = None,
    rng_seed: int = 0,
) -> CoefficientDraws:
    """Posterior draws with the likelihood replaced by MVN(reference | beta, n^-1 I^-1).

    The chain runs on standardised coefficients, where the shrinkage priors
    are defined, and draws are mapped back to the raw scale.
    """
    _check_alignment(model, info)
    mcmc = mcmc or McmcConfig(burn_in=10_000)
    transform, standardized_info = info.to_standardized()
    precision = n * standardized_info
    observed = linalg.solve(transform, model.effective_coefficients)

    def log_likelihood(coefficients: np.ndarray) -> float:
        gap = coefficients - observed
        return -0.5 * float(gap @ precision @ gap)

    prior_precision = np.ones(observed.shape[0])
    prior_precision[0] = 1.0 / prior.intercept_variance
    if prior.fixed_lambda_sq is not None and prior.family == "ridge":
        prior_precision[1:] = 1.0 / prior.fixed_lambda_sq
    proposal = linalg.inv(precision + np.diag(prior_precision))

    chain = run_chain(log_likelihood, observed, proposal, prior, mcmc, generator(rng_seed))
    matrix = chain.draws @ transform.T
    logger.info(
        "One-sample posterior",
        family=prior.family,
        n=n,
        draws=mcmc.draws,
        acceptance=round(chain.acceptance, 3),
    )
    return CoefficientDraws(
        matrix=matrix,
        provenance="bayes_onesample",
        n_used=n,
        column_names=list(model.column_names),
        acceptance=chain.acceptance,
        warnings=list(chain.warnings),
    )
