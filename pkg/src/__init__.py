__version__ = "0.1.0"

from .config import config, configure_logging, logger
from .engine import prepare_scenario, run_scenario, sweep
from .fisher import fisher_scenario

__all__ = [
    "__version__",
    "config",
    "configure_logging",
    "logger",
    # Runs
    "prepare_scenario",
    "run_scenario",
    "sweep",
    "fisher_scenario",
]

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"
