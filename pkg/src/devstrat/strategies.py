"""
Dispatch from a strategy configuration to its fitting routine.
"""

from ..config import ConfigurationError
from ..popgen import DevelopmentSample
from .bayes import fit_bayes_penalized
from .forest import fit_random_forest
from .logistic import fit_mle_logistic, shrink_uniform
from .penalized import fit_penalized_cv
from .schemas import FittedModel, StrategyConfig

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


def fit_strategy(
    strategy: StrategyConfig,
    sample: DevelopmentSample,
    rng_seed: int,
    mle: FittedModel | None = None,
) -> FittedModel:
    """Fit one strategy; ``mle`` reuses an unpenalised fit of the same sample."""
    match strategy.kind:
        case "mle":
            return mle or fit_mle_logistic(sample, strategy.max_iter, strategy.tol or 1e-8)
        case "shrunk":
            base = mle or fit_mle_logistic(sample, strategy.max_iter, strategy.tol or 1e-8)
            return shrink_uniform(base, sample)
        case "ridge_cv" | "lasso_cv":
            return fit_penalized_cv(
                sample,
                strategy.kind.removesuffix("_cv"),
                folds=strategy.folds,
                lambda_grid_values=strategy.lambda_grid,
                rng_seed=rng_seed,
                tol=strategy.tol or 1e-6,
            )
        case "bayes_ridge" | "bayes_lasso":
            return fit_bayes_penalized(sample, strategy.prior, strategy.mcmc, rng_seed)
        case "forest":
            return fit_random_forest(
                sample,
                n_trees=strategy.n_trees,
                max_depth=strategy.max_depth,
                mtry=strategy.mtry,
                min_leaf=strategy.min_leaf,
                rng_seed=rng_seed,
            )
    raise ConfigurationError(f"Unknown strategy kind '{strategy.kind}'")
