"""
Fitted model records and fitting settings.
"""

from typing import Literal

import numpy as np
from msgspec import Struct, field

from ..config import SchemaError

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


ModelKind = Literal[
    "mle", "shrunk", "ridge_cv", "lasso_cv", "bayes_ridge", "bayes_lasso", "forest"
]
PenaltyFamily = Literal["ridge", "lasso"]

COEFFICIENT_KINDS = {"mle", "shrunk", "ridge_cv", "lasso_cv", "bayes_ridge", "bayes_lasso"}


class ColumnScale(Struct, frozen=True):
    """Development-sample standardisation of the used columns."""

    names: list[str]
    means: list[float]
    sds: list[float]
    # Constant columns, excluded from the fit
    dropped: list[str] = field(default_factory=list)


class Diagnostics(Struct):
    """Fit diagnostics."""

    converged: bool = True
    iterations: int = 0
    selected_lambda: float | None = None
    shrinkage_factor: float | None = None
    mcmc_acceptance: float | None = None
    kkt_residual: float | None = None
    separation: bool = False
    split_chain_ok: bool | None = None
    warnings: list[str] = field(default_factory=list)


class TreeArrays(Struct, frozen=True):
    """One tree as parallel node arrays; split_column is -1 on leaves."""

    split_column: list[int]
    split_value: list[float]
    left: list[int]
    right: list[int]
    leaf_probability: list[float]

    @property
    def n_nodes(self) -> int:
        return len(self.split_column)

    def depth(self) -> int:
        """Realised depth, 0 for a single leaf."""
        deepest = 0
        stack = [(0, 0)]
        while stack:
            node, level = stack.pop()
            deepest = max(deepest, level)
            if self.split_column[node] >= 0:
                stack.append((self.left[node], level + 1))
                stack.append((self.right[node], level + 1))
        return deepest


class FittedModel(Struct):
    """Model developed on one development sample.

    Regression kinds carry coefficients (intercept first) on the standardised
    scale described by ``scale``; the forest kind carries trees that split on
    raw column values in ``column_names`` order.
    """

    kind: ModelKind
    column_names: list[str]
    scale: ColumnScale
    coefficients: list[float] | None = None
    forest: list[TreeArrays] | None = None
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    def __post_init__(self):
        if self.kind == "forest":
            if self.forest is None or self.coefficients is not None:
                raise SchemaError("Forest models carry trees and no coefficients")
        else:
            if self.coefficients is None or self.forest is not None:
                raise SchemaError(f"'{self.kind}' models carry coefficients and no trees")
            if len(self.coefficients) != len(self.scale.names) + 1:
                raise SchemaError(
                    f"{len(self.coefficients)} coefficients for {len(self.scale.names)} used columns"
                )
        if any(sd <= 0 for sd in self.scale.sds):
            raise SchemaError("Standardisation sds must be > 0")

    @property
    def intercept(self) -> float:
        return float(self.coefficients[0])

    @property
    def slopes(self) -> np.ndarray:
        return np.asarray(self.coefficients[1:], dtype=float)

    def raw_coefficients(self) -> np.ndarray:
        """Intercept and per-column slopes on the original column scale.

        Dropped columns get a zero slope. Only defined for regression kinds.
        """
        if self.coefficients is None:
            raise SchemaError("Forest models have no coefficients")
        means = np.asarray(self.scale.means, dtype=float)
        sds = np.asarray(self.scale.sds, dtype=float)
        used = self.slopes / sds
        raw = np.zeros(len(self.column_names) + 1)
        raw[0] = self.intercept - float(np.dot(used, means))
        for name, slope in zip(self.scale.names, used):
            raw[1 + self.column_names.index(name)] = slope
        return raw


class McmcConfig(Struct, frozen=True):
    """Metropolis-Hastings run length and proposal adaptation."""

    burn_in: int = 5000
    thin: int = 10
    draws: int = 1000
    # None uses 2.38 / sqrt(dimension)
    initial_scale: float | None = None
    adapt_window: int = 100
    target_acceptance: float = 0.30

    def __post_init__(self):
        if self.burn_in < 0:
            raise SchemaError("burn_in must be >= 0")
        if self.thin < 1:
            raise SchemaError("thin must be >= 1")
        if self.draws < 1:
            raise SchemaError("draws must be >= 1")
        if self.adapt_window < 1:
            raise SchemaError("adapt_window must be >= 1")
        if not 0 < self.target_acceptance < 1:
            raise SchemaError("target_acceptance must be in (0, 1)")


class PriorSpec(Struct, frozen=True):
    """Shrinkage prior on standardised slopes.

    ridge: slopes ~ N(0, lambda^2), lambda^2 ~ InvGamma(0.01, 0.01).
    lasso: slopes ~ Laplace(0, 1 / lambda), lambda^2 ~ Gamma(1, rate 1 / 1.78).
    ``fixed_lambda_sq`` pins lambda^2 and skips its update.
    """

    family: PenaltyFamily
    intercept_variance: float = 1e6
    fixed_lambda_sq: float | None = None

    def __post_init__(self):
        if not self.intercept_variance > 0:
            raise SchemaError("intercept_variance must be > 0")
        if self.fixed_lambda_sq is not None and not self.fixed_lambda_sq > 0:
            raise SchemaError("fixed_lambda_sq must be > 0")


class StrategyConfig(Struct, frozen=True):
    """One model-development strategy and its settings."""

    kind: ModelKind
    name: str | None = None
    # Regression
    max_iter: int = 50
    tol: float | None = None
    # Frequentist penalised
    folds: int = 10
    lambda_grid: list[float] | None = None
    # Bayesian penalised
    intercept_variance: float = 1e6
    fixed_lambda_sq: float | None = None
    mcmc: McmcConfig | None = None
    # Forest
    n_trees: int = 100
    max_depth: int = 3
    mtry: int | None = None
    min_leaf: int = 1

    @property
    def label(self) -> str:
        return self.name or self.kind

    @property
    def prior(self) -> PriorSpec:
        return PriorSpec(
            family="lasso" if self.kind == "bayes_lasso" else "ridge",
            intercept_variance=self.intercept_variance,
            fixed_lambda_sq=self.fixed_lambda_sq,
        )
