"""
Simulation engine: scenario runs, summaries, instability outputs, sweeps and
run-directory writers.
"""

from .closed_form import ClosedFormSize, closed_form_sample_size, expected_r2_cox_snell
from .instability import InstabilityBlock, InstabilityData, emit_instability
from .outputs import (
    RunManifest,
    RunReport,
    summary_frame,
    verdict_lines,
    write_csv,
    write_json,
    write_manifest,
    write_reference,
    write_scenario_outputs,
    write_verdict,
)
from .runner import (
    DRAW_COLUMNS,
    ScenarioResult,
    build_populations,
    run_iteration,
    run_scenario,
    select_references,
)
from .schemas import (
    CriteriaSpec,
    Criterion,
    MinimalN,
    ReferenceMixture,
    ScenarioConfig,
    SummaryReport,
    SummaryRow,
)
from .setup import PreparedScenario, build_casemix, build_reference, prepare_scenario
from .summary import assurance, individual_summary, minimal_n, summarize
from .sweep import NoiseVariant, SweepResult, apply_variant, sweep

__all__ = [
    # Records
    "ScenarioConfig",
    "Criterion",
    "CriteriaSpec",
    "ReferenceMixture",
    "SummaryRow",
    "SummaryReport",
    "MinimalN",
    "ScenarioResult",
    "InstabilityBlock",
    "InstabilityData",
    "NoiseVariant",
    "SweepResult",
    "ClosedFormSize",
    "PreparedScenario",
    "RunManifest",
    "RunReport",
    # Simulation
    "run_scenario",
    "run_iteration",
    "select_references",
    "build_populations",
    "DRAW_COLUMNS",
    "summarize",
    "individual_summary",
    "assurance",
    "minimal_n",
    "emit_instability",
    "sweep",
    "apply_variant",
    "closed_form_sample_size",
    "expected_r2_cox_snell",
    # Scenario documents
    "prepare_scenario",
    "build_casemix",
    "build_reference",
    # Outputs
    "write_csv",
    "write_json",
    "summary_frame",
    "verdict_lines",
    "write_verdict",
    "write_scenario_outputs",
    "write_reference",
    "write_manifest",
]

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"
