"""
Shared fixtures: small synthetic case-mixes and a fixed toy reference model.
"""

from pathlib import Path

import numpy as np
import pytest
import structlog

from src.config import load_scenario_file
from src.devstrat import StrategyConfig
from src.engine import ReferenceMixture, ScenarioConfig, prepare_scenario
from src.popgen import (
    BernoulliMarginal,
    MarginalSpec,
    NormalMarginal,
    ReferenceModel,
    build_population,
    draw_sample,
    synthesize_casemix,
)

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


TOY_COLUMNS = ["x1", "x2", "flag"]
SHIPPED_SCENARIO = Path(__file__).resolve().parents[1] / "scenarios" / "preeclampsia.json"


@pytest.fixture(autouse=True)
def _reset_structlog():
    """CLI tests bind structlog to a runner stream that is closed afterwards."""
    yield
    structlog.reset_defaults()


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def marginal_spec():
    return MarginalSpec(
        columns={
            "x1": NormalMarginal(mean=0.0, sd=1.0),
            "x2": NormalMarginal(mean=2.0, sd=0.5),
            "flag": BernoulliMarginal(prob=0.4),
        }
    )


@pytest.fixture
def casemix(marginal_spec):
    return synthesize_casemix(marginal_spec, 5000, rng_seed=11)


@pytest.fixture
def reference():
    return ReferenceModel(
        intercept=-0.3,
        scale=1.0,
        weights=[0.9, -0.6, 0.7],
        column_names=list(TOY_COLUMNS),
    )


@pytest.fixture
def population(reference, casemix):
    return build_population(reference, casemix, rng_seed=3)


@pytest.fixture
def sample(reference, casemix):
    return draw_sample(casemix, reference, 400, rng_seed=5)


@pytest.fixture
def scenario(casemix, reference):
    """Tiny but complete scenario: two strategies, one threshold, six iterations."""
    return ScenarioConfig(
        casemix=casemix,
        reference=ReferenceMixture.single(reference),
        strategies=[StrategyConfig(kind="mle"), StrategyConfig(kind="shrunk")],
        n_values=[200],
        iterations=6,
        thresholds=[0.4],
        master_seed=42,
        instability_sample=25,
        curves_emitted=3,
    )


@pytest.fixture(scope="session")
def preeclampsia():
    """Shipped pre-eclampsia scenario, synthesised and calibrated once per session."""
    return prepare_scenario(load_scenario_file(SHIPPED_SCENARIO), SHIPPED_SCENARIO.parent)
