"""
Unit Fisher information of a logistic reference model over a case-mix.
"""

import numpy as np
from msgspec import Struct
from scipy import linalg
from scipy.special import expit

from ..config import RankDeficientError, logger
from ..popgen import CaseMix, ReferenceModel

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


INTERCEPT = "intercept"
RANK_TOL = 1e-10


class UnitInformation(Struct):
    """Per-observation information, intercept row and column first.

    means and sds describe the case-mix columns so coefficients can be
    moved to the standardised scale the shrinkage priors act on.
    """

    matrix: np.ndarray
    source_rows: int
    column_names: list[str]
    means: np.ndarray
    sds: np.ndarray

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[0])

    def covariance(self, n: float) -> np.ndarray:
        """Asymptotic coefficient covariance n^-1 I^-1."""
        return linalg.inv(self.matrix) / n

    def to_standardized(self) -> tuple[np.ndarray, np.ndarray]:
        """(T, T' I T) where raw coefficients = T @ standardised coefficients."""
        transform = standardizing_transform(self.means, self.sds)
        return transform, transform.T @ self.matrix @ transform


def standardizing_transform(means: np.ndarray, sds: np.ndarray) -> np.ndarray:
    q = means.shape[0]
    transform = np.eye(q + 1)
    transform[0, 1:] = -means / sds
    transform[np.arange(1, q + 1), np.arange(1, q + 1)] = 1.0 / sds
    return transform


def dependent_columns(design: np.ndarray, names: list[str]) -> list[str]:
    """Columns a pivoted QR leaves outside the numerical rank."""
    _, r, pivots = linalg.qr(design, mode="economic", pivoting=True)
    diagonal = np.abs(np.diag(r))
    if diagonal.size == 0 or diagonal[0] == 0:
        return list(names)
    rank = int(np.count_nonzero(diagonal > RANK_TOL * diagonal[0]))
    return [names[i] for i in sorted(pivots[rank:])]


def unit_information(casemix: CaseMix, model: ReferenceModel) -> UnitInformation:
    """Mean over rows of p(1-p) x x' at the reference model's effective coefficients."""
    rows = casemix.aligned_rows(model.column_names)
    design = np.column_stack([np.ones(rows.shape[0]), rows])
    names = [INTERCEPT, *model.column_names]

    dependent = dependent_columns(design, names)
    if dependent:
        raise RankDeficientError(
            f"Design is rank deficient; dependent columns: {dependent}", columns=dependent
        )

    p = expit(design @ model.effective_coefficients)
    weights = p * (1.0 - p)
    matrix = design.T @ (design * weights[:, None]) / rows.shape[0]
    matrix = 0.5 * (matrix + matrix.T)
    logger.debug("Unit information", rows=rows.shape[0], dimension=matrix.shape[0])
    return UnitInformation(
        matrix=matrix,
        source_rows=int(rows.shape[0]),
        column_names=list(model.column_names),
        means=rows.mean(axis=0),
        sds=rows.std(axis=0),
    )
