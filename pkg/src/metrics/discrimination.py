"""
Concordance (c-statistic).
"""

import numpy as np
from scipy.stats import rankdata

from ..config import UndefinedMetricError

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


def c_statistic(risks: np.ndarray, outcomes: np.ndarray) -> float:
    """Rank-based concordance; tied risks count one half."""
    risks = np.asarray(risks, dtype=float)
    outcomes = np.asarray(outcomes)
    if risks.shape != outcomes.shape:
        raise ValueError("risks and outcomes must have the same length")
    events = outcomes == 1
    n_events = int(events.sum())
    n_non_events = outcomes.shape[0] - n_events
    if n_events == 0 or n_non_events == 0:
        raise UndefinedMetricError("Undefined concordance: outcomes hold a single class")
    ranks = rankdata(risks, method="average")
    rank_sum = float(ranks[events].sum())
    return (rank_sum - n_events * (n_events + 1) / 2.0) / (n_events * n_non_events)
