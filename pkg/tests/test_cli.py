import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from samplan_cli import app

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


runner = CliRunner()
SHIPPED_SCENARIO = Path(__file__).resolve().parents[1] / "scenarios" / "preeclampsia.json"


def scenario_document(**reference):
    return {
        "data": {
            "marginals": {
                "age": {"type": "normal", "mean": 40.0, "sd": 8.0},
                "marker": {"type": "normal"},
                "smoker": {"type": "bernoulli", "prob": 0.3},
            },
            "population_size": 3000,
            "synthesis_seed": 5,
        },
        "reference": reference or {
            "weights": {"age": 0.04, "marker": 0.8, "smoker": 0.5},
            "intercept": -2.0,
            "scale": 1.0,
        },
        "strategies": [{"kind": "mle"}, {"kind": "shrunk"}],
        "scenario": {
            "n_values": [150],
            "iterations": 4,
            "thresholds": [0.3],
            "master_seed": 3,
            "instability_sample": 20,
            "curves_emitted": 2,
        },
    }


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(scenario_document()), encoding="utf-8")
    return path


def invoke(*args):
    return runner.invoke(app, [str(arg) for arg in args])


class TestSimulate:
    def test_writes_the_run_directory(self, config_file, tmp_path):
        out = tmp_path / "run"
        result = invoke("simulate", "-c", config_file, "--iterations", 2, "-o", out)

        assert result.exit_code == 0, result.output
        for name in (
            "summary.csv",
            "draws.csv",
            "instability_predictions.csv",
            "instability_curves.csv",
            "individual_uncertainty.csv",
            "report.json",
            "manifest.json",
        ):
            assert (out / name).exists(), name

    def test_reruns_are_byte_identical(self, config_file, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        assert invoke("simulate", "-c", config_file, "-o", first).exit_code == 0
        assert invoke("simulate", "-c", config_file, "-o", second).exit_code == 0
        for name in ("summary.csv", "draws.csv", "report.json"):
            assert (first / name).read_bytes() == (second / name).read_bytes(), name

    def test_manifest_lists_artifacts(self, config_file, tmp_path):
        out = tmp_path / "run"
        invoke("simulate", "-c", config_file, "-o", out)
        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
        paths = [artifact["path"] for artifact in manifest["artifacts"]]
        assert "draws.csv" in paths
        assert "manifest.json" not in paths

    def test_strict_escalates_warnings(self, config_file, tmp_path):
        # few iterations and a small population both warn
        result = invoke("simulate", "-c", config_file, "--strict", "-o", tmp_path / "run")
        assert result.exit_code == 3


class TestConfigurationErrors:
    def test_malformed_document(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        assert invoke("simulate", "-c", path, "-o", tmp_path / "run").exit_code == 2

    def test_empty_sample_sizes(self, tmp_path):
        document = scenario_document()
        document["scenario"]["n_values"] = []
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(document), encoding="utf-8")
        assert invoke("simulate", "-c", path, "-o", tmp_path / "run").exit_code == 2

    def test_unknown_column_weight(self, tmp_path):
        document = scenario_document(weights={"height": 1.0}, intercept=0.0, scale=1.0)
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(document), encoding="utf-8")
        assert invoke("simulate", "-c", path, "-o", tmp_path / "run").exit_code == 2

    def test_unknown_approximation(self, config_file, tmp_path):
        assert invoke("fisher", "-c", config_file, "-a", "laplace", "-o", tmp_path / "run").exit_code == 2


class TestOtherCommands:
    def test_fisher_writes_coefficient_draws(self, config_file, tmp_path):
        out = tmp_path / "run"
        result = invoke("fisher", "-c", config_file, "-o", out)
        assert result.exit_code == 0, result.output
        header = (out / "coefficient_draws.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header == "draw_id,intercept,age,marker,smoker"

    def test_sweep_without_criteria(self, config_file, tmp_path):
        out = tmp_path / "run"
        result = invoke("sweep", "-c", config_file, "-o", out)
        assert result.exit_code == 0, result.output
        verdict = (out / "verdict.txt").read_text(encoding="utf-8")
        assert "no criteria configured" in verdict
        assert "closed-form starting n" in verdict

    def test_calibrate_without_discrimination(self, tmp_path):
        document = scenario_document(
            weights={"age": 0.04, "marker": 0.8, "smoker": 0.5}, target_cstat=0.5, target_prevalence=0.3
        )
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(document), encoding="utf-8")
        out = tmp_path / "run"

        result = invoke("calibrate", "-c", path, "-o", out)
        assert result.exit_code == 0, result.output
        model = json.loads((out / "reference_model.json").read_text(encoding="utf-8"))
        assert model["scale"] == 0.0
        assert not (out / "closed_form.json").exists()

    def test_calibrate_uncentred_predictors(self, tmp_path):
        document = scenario_document(
            weights={"age": 0.04, "marker": 0.8, "smoker": 0.5}, target_cstat=0.76, target_prevalence=0.68
        )
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(document), encoding="utf-8")
        out = tmp_path / "run"

        result = invoke("calibrate", "-c", path, "-o", out)
        assert result.exit_code == 0, result.output
        summary = json.loads((out / "calibration.json").read_text(encoding="utf-8"))[0]["calibration"]
        assert summary["achieved_cstat"] == pytest.approx(0.76, abs=0.005)
        assert summary["achieved_prevalence"] == pytest.approx(0.68, abs=0.005)

    @pytest.mark.slow
    def test_calibrate_shipped_scenario(self, tmp_path):
        out = tmp_path / "run"
        result = invoke("calibrate", "-c", SHIPPED_SCENARIO, "-o", out)
        assert result.exit_code == 0, result.output
        summary = json.loads((out / "calibration.json").read_text(encoding="utf-8"))[0]["calibration"]
        assert summary["achieved_cstat"] == pytest.approx(0.76, abs=0.005)
        assert summary["achieved_prevalence"] == pytest.approx(0.68, abs=0.005)
        assert (out / "closed_form.json").exists()

    def test_unreachable_calibration_exits_with_runtime_code(self, tmp_path):
        document = scenario_document(
            weights={"age": 0.0, "marker": 0.0, "smoker": 1.0}, target_cstat=0.95, target_prevalence=0.6
        )
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(document), encoding="utf-8")
        out = tmp_path / "run"

        assert invoke("calibrate", "-c", path, "-o", out).exit_code == 4
        report = json.loads((out / "calibration.json").read_text(encoding="utf-8"))
        assert report["converged"] is False

    def test_version(self):
        result = invoke("version")
        assert result.exit_code == 0
        assert "samplan" in result.output
