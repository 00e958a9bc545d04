"""
Standardisation of development-sample design columns.
"""

import numpy as np

from ..config import DegenerateOutcomeError, logger
from ..popgen import CaseMix, DevelopmentSample
from .schemas import ColumnScale

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


CONSTANT_SD = 1e-12


def column_scale(casemix: CaseMix) -> ColumnScale:
    """Means and sds of every non-constant column."""
    means = casemix.rows.mean(axis=0)
    sds = casemix.rows.std(axis=0)
    names, kept_means, kept_sds, dropped = [], [], [], []
    for name, mean, sd in zip(casemix.names, means, sds):
        if sd > CONSTANT_SD:
            names.append(name)
            kept_means.append(float(mean))
            kept_sds.append(float(sd))
        else:
            dropped.append(name)
    if dropped:
        logger.debug("Constant columns dropped", columns=dropped)
    return ColumnScale(names=names, means=kept_means, sds=kept_sds, dropped=dropped)


def standardize_rows(rows: np.ndarray, names: list[str], scale: ColumnScale) -> np.ndarray:
    """Standardised used columns of rows whose columns are named by names."""
    order = [names.index(name) for name in scale.names]
    means = np.asarray(scale.means, dtype=float)
    sds = np.asarray(scale.sds, dtype=float)
    return np.ascontiguousarray((rows[:, order] - means) / sds)


def standardize(casemix: CaseMix, scale: ColumnScale) -> np.ndarray:
    """Standardised used columns, one row per individual."""
    return standardize_rows(casemix.rows, casemix.names, scale)


def with_intercept(design: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones(design.shape[0]), design])


def check_outcome(sample: DevelopmentSample) -> np.ndarray:
    """Outcome as float, raising when only one class is present."""
    y = np.asarray(sample.outcome, dtype=float)
    events = float(y.sum())
    if events == 0 or events == y.shape[0]:
        raise DegenerateOutcomeError(
            f"Degenerate outcome: {int(events)} events in {y.shape[0]} rows"
        )
    return y
