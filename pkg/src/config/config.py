import sys

import structlog
from dotenv import load_dotenv
from pydantic import field_validator
from pydantic_settings import BaseSettings
from structlog import PrintLoggerFactory, make_filtering_bound_logger
from structlog.dev import ConsoleRenderer, set_exc_info
from structlog.processors import StackInfoRenderer, TimeStamper, add_log_level

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


class Config(BaseSettings):
    """Configuration settings for the sample size engine."""

    deploy_env: str = "dev"
    log_level: str = ""

    # Worker pool, fallback for --threads
    samplan_threads: int = 1

    output_dir: str = "runs"

    # Fixed seed of the outcome realisation used by reference calibration
    calibration_seed: int = 20240917

    # Warning thresholds
    population_warning_rows: int = 100_000
    min_interval_draws: int = 40
    missing_warning_fraction: float = 0.5

    @field_validator("samplan_threads")
    @classmethod
    def validate_threads(cls, v):
        """Threads must be a positive count."""
        if v < 1:
            raise ValueError("SAMPLAN_THREADS must be >= 1")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v):
        """Accept standard level names only."""
        if v and v.upper() not in {"DEBUG", "INFO", "WARNING", "ERROR"}:
            raise ValueError("log_level must be DEBUG, INFO, WARNING or ERROR")
        return v.upper()


_LEVELS = {"DEBUG": 10, "INFO": 20, "WARNING": 30, "ERROR": 40}


def configure_logging(level: str | None = None) -> None:
    """Install the console processor chain used by the command line."""
    chosen = level or config.log_level
    if chosen:
        numeric = _LEVELS[chosen.upper()]
    else:
        numeric = 10 if config.deploy_env in {"dev", "development", "local"} else 20

    structlog.configure(
        processors=[
            add_log_level,
            set_exc_info,
            StackInfoRenderer(),
            TimeStamper(fmt="iso"),
            ConsoleRenderer(),
        ],
        wrapper_class=make_filtering_bound_logger(numeric),
        logger_factory=PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


load_dotenv()
config = Config()
logger = structlog.get_logger()
logger.debug("Config", config=config)
