from .config import config, configure_logging, logger
from .exceptions import (
    AlignmentError,
    CalibrationError,
    ConfigurationError,
    ConvergenceError,
    DegenerateOutcomeError,
    DegenerateRecalibrationError,
    InsufficientDataError,
    MissingValueError,
    ParseError,
    RankDeficientError,
    SamplanError,
    SchemaError,
    UndefinedMetricError,
)
from .scenario import ScenarioFile, load_scenario_file

__all__ = [
    "config",
    "configure_logging",
    "logger",
    "ScenarioFile",
    "load_scenario_file",
    # Errors
    "SamplanError",
    "ConfigurationError",
    "SchemaError",
    "ParseError",
    "MissingValueError",
    "AlignmentError",
    "CalibrationError",
    "DegenerateOutcomeError",
    "DegenerateRecalibrationError",
    "ConvergenceError",
    "UndefinedMetricError",
    "RankDeficientError",
    "InsufficientDataError",
]

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"
