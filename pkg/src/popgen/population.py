"""
Target populations and development samples.
"""

import numpy as np

from ..config import InsufficientDataError, config, logger
from ..seeding import derive_seed, generator
from .reference import reference_risks
from .schemas import CaseMix, DevelopmentSample, ReferenceModel, TargetPopulation

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


def sample_outcomes(risks: np.ndarray, rng_seed: int) -> np.ndarray:
    """Independent Bernoulli draws y_i ~ Bernoulli(p_i)."""
    risks = np.asarray(risks, dtype=float)
    if risks.size and (not np.all(np.isfinite(risks)) or risks.min() < 0 or risks.max() > 1):
        raise ValueError("Risks must be finite probabilities")
    uniforms = generator(rng_seed).random(risks.shape[0])
    return (uniforms < risks).astype(np.int8)


def build_population(model: ReferenceModel, casemix: CaseMix, rng_seed: int) -> TargetPopulation:
    """True risks plus one outcome realisation for every row of the case-mix."""
    risks = reference_risks(model, casemix)
    outcome = sample_outcomes(risks, rng_seed)

    warnings = ()
    if casemix.n_rows < config.population_warning_rows:
        message = (
            f"Target population has {casemix.n_rows} rows; "
            f"at least {config.population_warning_rows} are recommended"
        )
        logger.warning("Small target population", rows=casemix.n_rows)
        warnings = (message,)

    risks.setflags(write=False)
    outcome.setflags(write=False)
    return TargetPopulation(
        casemix=casemix,
        true_risk=risks,
        outcome=outcome,
        reference=model,
        warnings=warnings,
    )


def draw_sample(source: CaseMix, model: ReferenceModel, n: int, rng_seed: int) -> DevelopmentSample:
    """n rows without replacement from the source, with fresh outcomes."""
    if n > source.n_rows:
        raise InsufficientDataError(f"Cannot draw {n} rows from a source of {source.n_rows}")
    if n < 2:
        raise InsufficientDataError("Development samples need at least 2 rows")

    indices = generator(rng_seed, 0).choice(source.n_rows, size=n, replace=False)
    casemix = source.take(indices)
    outcome = sample_outcomes(reference_risks(model, casemix), derive_seed(rng_seed, 1))
    events = int(outcome.sum())
    degenerate = events == 0 or events == n
    if degenerate:
        logger.debug("Degenerate development sample", n=n, events=events, seed=rng_seed)
    return DevelopmentSample(casemix=casemix, outcome=outcome, seed_id=rng_seed, degenerate=degenerate)
