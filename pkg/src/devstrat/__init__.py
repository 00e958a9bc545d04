"""
Model-development strategies: unpenalised and shrunk logistic regression,
cross-validated ridge and lasso, Bayesian ridge and lasso, random forests.
"""

from .bayes import fit_bayes_penalized
from .design import column_scale, standardize
from .forest import fit_random_forest, predict_forest
from .logistic import fit_mle_logistic, irls, log_likelihood, shrink_uniform
from .mcmc import ChainResult, batch_mcse, run_chain
from .penalized import fit_penalized, fit_penalized_cv, kkt_residual, lambda_grid, penalized_objective
from .predict import dump_model, load_model, model_design, predict_risks
from .schemas import (
    ColumnScale,
    Diagnostics,
    FittedModel,
    McmcConfig,
    PriorSpec,
    StrategyConfig,
    TreeArrays,
)
from .strategies import fit_strategy

__all__ = [
    # Records
    "ColumnScale",
    "Diagnostics",
    "FittedModel",
    "McmcConfig",
    "PriorSpec",
    "StrategyConfig",
    "TreeArrays",
    "ChainResult",
    # Fitting
    "fit_mle_logistic",
    "shrink_uniform",
    "fit_penalized",
    "fit_penalized_cv",
    "fit_bayes_penalized",
    "fit_random_forest",
    "fit_strategy",
    "run_chain",
    "irls",
    # Helpers
    "batch_mcse",
    "column_scale",
    "standardize",
    "log_likelihood",
    "kkt_residual",
    "lambda_grid",
    "penalized_objective",
    # Prediction
    "predict_risks",
    "predict_forest",
    "model_design",
    "dump_model",
    "load_model",
]

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"
