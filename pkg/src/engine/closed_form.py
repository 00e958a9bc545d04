"""
Closed-form minimum sample size for a binary-outcome model, used as the
starting point of a simulation sweep.
"""

import math

import numpy as np
from msgspec import Struct

from ..metrics import bernoulli_log_likelihood
from ..popgen import TargetPopulation

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


Z_95 = 1.959963984540054
R2_FLOOR = 1e-12


class ClosedFormSize(Struct, frozen=True):
    parameters: int
    prevalence: float
    r2_cox_snell: float
    max_r2_cox_snell: float
    n_shrinkage: int
    n_optimism: int
    n_precision: int
    recommended: int
    events: float
    shrinkage: float
    optimism_shrinkage: float


def expected_r2_cox_snell(true_risks: np.ndarray) -> tuple[float, float, float]:
    """(R^2_CS, max R^2_CS, prevalence) implied by true risks in expectation."""
    p = np.asarray(true_risks, dtype=float)
    n = p.shape[0]
    prevalence = float(p.mean())
    model_ll = bernoulli_log_likelihood(p, p)
    null_ll = n * (prevalence * math.log(prevalence) + (1 - prevalence) * math.log1p(-prevalence))
    r2 = 1.0 - math.exp(-(2.0 / n) * (model_ll - null_ll))
    max_r2 = 1.0 - (prevalence**prevalence * (1 - prevalence) ** (1 - prevalence)) ** 2
    return r2, max_r2, prevalence


def _shrinkage_size(parameters: int, r2: float, shrinkage: float) -> float:
    return parameters / ((shrinkage - 1.0) * math.log(1.0 - r2 / shrinkage))


def closed_form_sample_size(
    population: TargetPopulation,
    parameters: int | None = None,
    shrinkage: float = 0.9,
    optimism: float = 0.05,
    margin: float = 0.05,
) -> ClosedFormSize:
    """Largest of the shrinkage, optimism and overall-risk precision sizes."""
    if parameters is None:
        parameters = sum(1 for w in population.reference.weights if w != 0)
    r2, max_r2, prevalence = expected_r2_cox_snell(population.true_risk)
    if r2 <= R2_FLOOR:
        raise ValueError("Reference model explains no variation; closed-form sizes are undefined")

    n_shrinkage = _shrinkage_size(parameters, r2, shrinkage)
    optimism_shrinkage = r2 / (r2 + optimism * max_r2)
    n_optimism = _shrinkage_size(parameters, r2, optimism_shrinkage)
    n_precision = (Z_95 / margin) ** 2 * prevalence * (1 - prevalence)
    sizes = [math.ceil(n_shrinkage), math.ceil(n_optimism), math.ceil(n_precision)]
    recommended = max(sizes)
    return ClosedFormSize(
        parameters=parameters,
        prevalence=prevalence,
        r2_cox_snell=r2,
        max_r2_cox_snell=max_r2,
        n_shrinkage=sizes[0],
        n_optimism=sizes[1],
        n_precision=sizes[2],
        recommended=recommended,
        events=recommended * prevalence,
        shrinkage=shrinkage,
        optimism_shrinkage=optimism_shrinkage,
    )
