"""
Case-mix handling, reference models and population generation.
"""

from .casemix import (
    append_noise,
    ingest_casemix,
    noise_columns,
    split_casemix,
    synthesize_casemix,
)
from .population import build_population, draw_sample, sample_outcomes
from .reference import calibrate_reference, linear_predictor, reference_risks
from .schemas import (
    BernoulliMarginal,
    CalibrationSummary,
    CaseMix,
    ColumnSpec,
    DevelopmentSample,
    EmpiricalMarginal,
    MarginalSpec,
    NormalMarginal,
    ReferenceModel,
    TargetPopulation,
)

__all__ = [
    # Records
    "CaseMix",
    "ColumnSpec",
    "MarginalSpec",
    "NormalMarginal",
    "BernoulliMarginal",
    "EmpiricalMarginal",
    "ReferenceModel",
    "CalibrationSummary",
    "TargetPopulation",
    "DevelopmentSample",
    # Operations
    "ingest_casemix",
    "synthesize_casemix",
    "split_casemix",
    "append_noise",
    "noise_columns",
    "calibrate_reference",
    "linear_predictor",
    "reference_risks",
    "sample_outcomes",
    "build_population",
    "draw_sample",
]

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"
