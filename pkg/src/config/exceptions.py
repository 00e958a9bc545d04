"""
Exception hierarchy shared by all engine modules.
"""

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


class SamplanError(Exception):
    """Base class for every error raised by the engine."""


class ConfigurationError(SamplanError):
    """Scenario document is malformed or inconsistent."""


class SchemaError(SamplanError):
    """Case-mix columns do not match the declared schema."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class ParseError(SchemaError):
    """A case-mix cell could not be read as a number."""


class MissingValueError(ParseError):
    """A case-mix cell is empty; missing data is not supported."""


class AlignmentError(SamplanError):
    """Model columns and case-mix columns disagree."""


class CalibrationError(SamplanError):
    """Reference calibration failed to reach its targets."""

    def __init__(
        self,
        message: str,
        achieved_cstat: float | None = None,
        achieved_prevalence: float | None = None,
        iterations: int = 0,
    ):
        super().__init__(message)
        self.achieved_cstat = achieved_cstat
        self.achieved_prevalence = achieved_prevalence
        self.iterations = iterations


class DegenerateOutcomeError(SamplanError):
    """Outcome vector holds a single class."""


class DegenerateRecalibrationError(SamplanError):
    """Recalibration slope is undefined because risks are constant."""


class ConvergenceError(SamplanError):
    """An iterative fit stopped before meeting its tolerance."""

    def __init__(self, message: str, iterations: int = 0, residual: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class UndefinedMetricError(SamplanError):
    """A metric cannot be evaluated on the supplied inputs."""


class InsufficientDataError(SamplanError, ValueError):
    """Too few rows for the requested sample or resampling scheme."""


class RankDeficientError(SamplanError):
    """Design matrix has linearly dependent columns."""

    def __init__(self, message: str, columns: list[str]):
        super().__init__(message)
        self.columns = columns
