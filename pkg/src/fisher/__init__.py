"""
Fast path: unit Fisher information, coefficient draws and approximate
scenario runs.
"""

from .approx import approx_scenario, coefficient_risks, fisher_scenario
from .information import UnitInformation, dependent_columns, standardizing_transform, unit_information
from .onesample import CoefficientDraws, bayes_onesample, draw_mvn_models, jittered_cholesky

__all__ = [
    # Records
    "UnitInformation",
    "CoefficientDraws",
    # Information
    "unit_information",
    "dependent_columns",
    "standardizing_transform",
    # Draws
    "draw_mvn_models",
    "bayes_onesample",
    "jittered_cholesky",
    # Scenario
    "approx_scenario",
    "fisher_scenario",
    "coefficient_risks",
]

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"
