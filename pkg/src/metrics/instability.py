"""
Per-individual uncertainty across development draws.
"""

import numpy as np

from ..config import config, logger

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


def misclassification_prob(
    per_draw_risks: np.ndarray, true_risks: np.ndarray, threshold: float
) -> np.ndarray:
    """Fraction of draws putting each individual on the other side of the threshold.

    true_risks is a vector, or a draws x individuals matrix when the
    truth changes between draws. Individuals whose true risk equals the
    threshold are never misclassified.
    """
    estimates = np.atleast_2d(np.asarray(per_draw_risks, dtype=float))
    truth = np.asarray(true_risks, dtype=float)
    if estimates.shape[0] < 1:
        raise ValueError("At least one draw is needed")
    truth = np.broadcast_to(truth, estimates.shape)
    flipped = ((estimates >= threshold) != (truth >= threshold)) & (truth != threshold)
    return flipped.mean(axis=0)


def interval_widths(per_draw_risks: np.ndarray, coverage: float = 95.0) -> np.ndarray:
    """Central percentile range of each individual's estimated risks."""
    estimates = np.atleast_2d(np.asarray(per_draw_risks, dtype=float))
    if estimates.shape[0] < config.min_interval_draws:
        logger.warning(
            "Few draws for interval widths",
            draws=estimates.shape[0],
            recommended=config.min_interval_draws,
        )
    tail = (100.0 - coverage) / 2.0
    lower, upper = np.percentile(estimates, [tail, 100.0 - tail], axis=0, method="linear")
    return upper - lower
