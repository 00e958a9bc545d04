import numpy as np
import pandas as pd
import pytest
from msgspec import structs
from scipy.special import logit

from src.config import ConfigurationError, ScenarioFile
from src.devstrat import StrategyConfig
from src.engine import (
    DRAW_COLUMNS,
    CriteriaSpec,
    Criterion,
    NoiseVariant,
    ReferenceMixture,
    ScenarioConfig,
    apply_variant,
    assurance,
    closed_form_sample_size,
    prepare_scenario,
    run_scenario,
    select_references,
    summarize,
    sweep,
)
from src.engine.summary import summarize_values
from src.popgen import CaseMix, ColumnSpec, ReferenceModel, build_population, reference_risks

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


def metric_values(result, metric, n, variant="base", strategy="mle"):
    draws = result.draws
    chosen = draws[
        (draws["metric"] == metric)
        & (draws["n"] == n)
        & (draws["variant"] == variant)
        & (draws["strategy"] == strategy)
        & (draws["subgroup"] == "overall")
    ]
    return chosen["value"].dropna().to_numpy()


def small_document(**data):
    section = {
        "marginals": {"x1": {"type": "normal"}, "flag": {"type": "bernoulli", "prob": 0.4}},
        "population_size": 2000,
    }
    section.update(data)
    return ScenarioFile.model_validate(
        {
            "data": section,
            "reference": {"weights": {"x1": 1.0, "flag": 0.5}, "intercept": -0.2, "scale": 1.0},
            "scenario": {"n_values": [100], "iterations": 2},
        }
    )


def toy_draws(values_by_n: dict[int, list[float]], metric: str = "c_stat") -> pd.DataFrame:
    rows = [
        (n, "base", "mle", 0.5, "overall", k, 0, metric, value)
        for n, values in values_by_n.items()
        for k, value in enumerate(values)
    ]
    return pd.DataFrame.from_records(rows, columns=DRAW_COLUMNS)


class TestCriteria:
    def test_bounds_are_inclusive(self):
        criterion = Criterion(metric="cal_slope", probability=0.9, lower=0.9, upper=1.1)
        assert criterion.contains(0.9)
        assert criterion.contains(1.1)
        assert not criterion.contains(1.1000001)

    def test_one_sided(self):
        criterion = Criterion(metric="mape", probability=0.9, upper=0.05)
        assert criterion.contains(-5.0)
        assert "mape" in criterion.describe()

    def test_inverted_bounds(self):
        with pytest.raises(ConfigurationError):
            Criterion(metric="c_stat", probability=0.9, lower=0.8, upper=0.7)

    def test_assurance_skips_missing(self):
        criterion = Criterion(metric="c_stat", probability=0.5, lower=0.7)
        values = np.array([0.6, 0.7, 0.8, np.nan])
        assert assurance(values, criterion) == pytest.approx(2 / 3)
        assert assurance(np.array([np.nan]), criterion) is None


class TestSummary:
    def test_constant_values(self):
        mean, low, high, missing, probabilities = summarize_values(np.full(10, 2.0), [], "mape", None)
        assert (mean, low, high, missing, probabilities) == (2.0, 2.0, 2.0, 0, [])

    def test_minimal_n_is_the_first_satisfying_size(self):
        draws = toy_draws({100: [0.6] * 10, 200: [0.75] * 10})
        report = summarize(draws, [Criterion(metric="c_stat", probability=0.9, lower=0.7)])
        assert [verdict.n for verdict in report.minimal_n] == [200]

    def test_minimal_n_none_when_unsatisfiable(self):
        draws = toy_draws({100: [0.6] * 10, 200: [0.65] * 10})
        report = summarize(draws, [Criterion(metric="c_stat", probability=0.9, lower=0.99)])
        assert report.minimal_n[0].n is None

    def test_no_criteria_no_verdict(self):
        assert summarize(toy_draws({100: [0.6, 0.7]})).minimal_n == []


class TestClosedForm:
    def test_precision_size_for_two_risk_groups(self):
        casemix = CaseMix(
            columns=(ColumnSpec(name="x", kind="binary"),), rows=np.repeat([[0.0], [1.0]], 500, axis=0)
        )
        model = ReferenceModel(
            intercept=float(logit(0.58)),
            scale=1.0,
            weights=[float(logit(0.78) - logit(0.58))],
            column_names=["x"],
        )
        size = closed_form_sample_size(build_population(model, casemix, rng_seed=1))

        assert size.prevalence == pytest.approx(0.68)
        assert size.n_precision == 335
        assert size.parameters == 1
        assert size.recommended == max(size.n_shrinkage, size.n_optimism, size.n_precision)

    def test_flat_reference_has_no_closed_form(self, casemix):
        flat = ReferenceModel(intercept=0.0, scale=0.0, weights=[1.0] * 3, column_names=["x1", "x2", "flag"])
        with pytest.raises(ValueError):
            closed_form_sample_size(build_population(flat, casemix, rng_seed=1))


class TestScenarioConfig:
    def test_rejects_empty_sizes(self, scenario):
        with pytest.raises(ConfigurationError):
            ScenarioConfig(
                casemix=scenario.casemix,
                reference=scenario.reference,
                strategies=scenario.strategies,
                n_values=[],
            )

    def test_rejects_duplicate_strategy_names(self, scenario):
        with pytest.raises(ConfigurationError):
            structs.replace(scenario, strategies=[StrategyConfig(kind="mle"), StrategyConfig(kind="mle")])

    def test_mixture_probabilities_sum_to_one(self, reference):
        with pytest.raises(ConfigurationError):
            ReferenceMixture(models=[reference, reference], probabilities=[0.5, 0.6])

    def test_mixture_selection_frequencies(self, scenario, reference):
        mixture = ReferenceMixture(models=[reference, reference], probabilities=[0.3, 0.7])
        config = structs.replace(scenario, reference=mixture, iterations=400)
        picks = select_references(config)
        expected = 400 * 0.7
        assert abs(int(np.count_nonzero(picks == 1)) - expected) < 4 * np.sqrt(400 * 0.7 * 0.3)

    def test_oversized_sample(self, scenario):
        with pytest.raises(ConfigurationError):
            run_scenario(structs.replace(scenario, n_values=[scenario.casemix.n_rows + 1]))


class TestPreparedScenario:
    def test_development_source_is_disjoint_from_target(self, tmp_path):
        prepared = prepare_scenario(small_document(), tmp_path)
        target, source = prepared.config.casemix, prepared.config.source

        assert source is not None
        assert target.n_rows == 2000
        assert source.n_rows == 2000
        assert not set(target.rows[:, 0].tolist()) & set(source.rows[:, 0].tolist())

    def test_split_can_be_switched_off(self, tmp_path):
        prepared = prepare_scenario(small_document(split=False), tmp_path)
        assert prepared.config.source is None
        assert prepared.config.development_source is prepared.config.casemix

    def test_ingested_rows_beyond_the_population_form_the_source(self, tmp_path):
        values = np.random.default_rng(1).normal(size=30)
        lines = "\n".join(f"{value:.12f}" for value in values)
        (tmp_path / "mix.csv").write_text(f"x1\n{lines}\n", encoding="utf-8")
        document = ScenarioFile.model_validate(
            {
                "data": {"path": "mix.csv", "columns": [{"name": "x1"}], "population_size": 20},
                "reference": {"weights": {"x1": 1.0}, "intercept": 0.0, "scale": 1.0},
                "scenario": {"n_values": [5], "iterations": 2},
            }
        )
        prepared = prepare_scenario(document, tmp_path)
        assert prepared.config.casemix.n_rows == 20
        assert prepared.config.source.n_rows == 10


class TestRunScenario:
    @pytest.fixture
    def result(self, scenario):
        return run_scenario(scenario)

    def test_draw_table_shape(self, result, scenario):
        draws = result.draws
        per_strategy = draws[(draws["strategy"] == "mle") & (draws["metric"] == "c_stat")]
        assert len(per_strategy) == scenario.iterations
        assert list(result.draws.columns) == DRAW_COLUMNS

    def test_same_seed_same_draws(self, result, scenario):
        again = run_scenario(scenario)
        pd.testing.assert_frame_equal(result.draws, again.draws)

    @pytest.mark.slow
    def test_thread_count_does_not_change_draws(self, result, scenario):
        parallel = run_scenario(structs.replace(scenario, threads=2))
        pd.testing.assert_frame_equal(result.draws, parallel.draws)

    def test_assurance_matches_a_recount(self, scenario):
        criterion = Criterion(metric="cal_slope", probability=0.5, lower=0.8, upper=1.2)
        result = run_scenario(structs.replace(scenario, criteria=CriteriaSpec(criteria=[criterion])))
        draws = result.draws
        overall = draws[draws["subgroup"] == "overall"]
        values = overall[(overall["strategy"] == "mle") & (overall["metric"] == "cal_slope")]
        kept = values["value"].dropna()
        expected = float(((kept >= 0.8) & (kept <= 1.2)).mean())

        row = result.summary.row("cal_slope", strategy="mle", n=200)
        assert row.assurance[0] == pytest.approx(expected)

    def test_few_iterations_warn(self, result):
        assert any("iterations" in message for message in result.warnings)

    def test_instability_rows_per_individual(self, result, scenario):
        predictions = result.instability.predictions
        mle = predictions[predictions["strategy"] == "mle"]
        assert mle["individual_id"].nunique() == scenario.instability_sample
        assert (mle.groupby("individual_id").size() == scenario.iterations).all()

    def test_uncertainty_has_one_row_per_individual_and_threshold(self, result, scenario):
        uncertainty = result.instability.uncertainty
        expected = scenario.instability_sample * len(scenario.strategies) * len(scenario.thresholds)
        assert len(uncertainty) == expected
        assert uncertainty["misclassification_prob"].between(0, 1).all()

    def test_failed_strategy_becomes_missing_draws(self, scenario):
        config = structs.replace(
            scenario,
            strategies=[StrategyConfig(kind="mle"), StrategyConfig(kind="ridge_cv")],
            n_values=[8],
            iterations=3,
        )
        result = run_scenario(config)
        row = result.summary.row("c_stat", strategy="ridge_cv", n=8)
        assert row.n_missing == 3
        assert row.mean is None

    def test_subgroup_metrics_decompose_the_overall_error(self, scenario):
        groups = np.where(scenario.casemix.rows[:, 2] == 1.0, "flagged", "clear")
        casemix = CaseMix(
            columns=scenario.casemix.columns,
            rows=scenario.casemix.rows,
            subgroup="flag_group",
            groups=groups,
        )
        result = run_scenario(structs.replace(scenario, casemix=casemix))
        draws = result.draws
        assert set(draws["subgroup"]) == {"overall", "flagged", "clear"}

        mape = draws[(draws["metric"] == "mape") & (draws["strategy"] == "mle")]
        by_group = mape.pivot_table(index="iteration", columns="subgroup", values="value")
        share = float(np.mean(groups == "flagged"))
        pooled = share * by_group["flagged"] + (1.0 - share) * by_group["clear"]
        assert by_group["overall"].to_numpy() == pytest.approx(pooled.to_numpy(), rel=1e-10)

    def test_mixture_run_draws_from_every_model(self, scenario, reference):
        other = ReferenceModel(
            intercept=0.4, scale=1.0, weights=reference.weights, column_names=reference.column_names
        )
        mixture = ReferenceMixture(models=[reference, other], probabilities=[0.5, 0.5])
        result = run_scenario(structs.replace(scenario, reference=mixture, iterations=20))

        assert set(np.unique(result.selections).tolist()) == {0, 1}
        c_stat = result.draws[result.draws["metric"] == "c_stat"]
        assert set(c_stat["reference_index"]) == {0, 1}
        per_iteration = c_stat.groupby("iteration")["reference_index"].first().to_numpy()
        assert np.array_equal(per_iteration, result.selections)

    def test_summary_values_are_plausible(self, result):
        row = result.summary.row("c_stat", strategy="mle", n=200)
        assert 0.5 < row.mean < 1.0
        assert row.n_draws == 6


class TestSweep:
    def test_noise_variant_extends_the_truth(self, scenario):
        varied = apply_variant(scenario, NoiseVariant(name="noise2", noise_columns=2), position=1)
        assert varied.casemix.names[-2:] == ["noise_1", "noise_2"]
        assert varied.reference.models[0].weights[-2:] == [0.0, 0.0]
        assert varied.variant == "noise2"

    def test_single_variant_sweep_matches_run(self, scenario):
        swept = sweep(scenario)
        pd.testing.assert_frame_equal(swept.combined().draws, run_scenario(scenario).draws)


@pytest.mark.slow
class TestShippedScenario:
    """Operating point of the shipped pre-eclampsia scenario."""

    @pytest.fixture(scope="class")
    def unpenalised(self, preeclampsia):
        config = structs.replace(
            preeclampsia.config,
            strategies=[StrategyConfig(kind="mle")],
            n_values=[75, 335, 456],
            iterations=1000,
            instability_sample=100,
            curves_emitted=5,
        )
        return run_scenario(config)

    def test_reference_hits_the_targets(self, preeclampsia):
        model = preeclampsia.config.reference.models[0]
        assert model.calibration.achieved_cstat == pytest.approx(0.76, abs=0.005)
        assert model.calibration.achieved_prevalence == pytest.approx(0.68, abs=0.005)
        risks = reference_risks(model, preeclampsia.config.casemix)
        assert risks.mean() == pytest.approx(0.68, abs=0.005)

    def test_target_population_is_disjoint_from_the_source(self, preeclampsia):
        config = preeclampsia.config
        assert config.casemix.n_rows == 100_000
        assert config.source.n_rows == 100_000
        assert not set(config.casemix.rows[:, 0].tolist()) & set(config.source.rows[:, 0].tolist())

    def test_moderate_sample_operating_point(self, unpenalised):
        summary = unpenalised.summary
        assert 0.85 <= summary.row("cal_slope", strategy="mle", n=456).mean <= 0.93
        assert 0.043 <= summary.row("mape", strategy="mle", n=456).mean <= 0.060
        assert -0.025 <= summary.row("c_degradation", strategy="mle", n=456).mean <= -0.005
        assert 96.0 <= summary.row("rvsi_model", strategy="mle", n=456, threshold=0.5).mean <= 99.5

    def test_small_sample_overfits(self, unpenalised):
        slopes = metric_values(unpenalised, "cal_slope", 75)
        assert 0.30 <= slopes.mean() <= 0.60
        assert np.mean((slopes > 0.9) & (slopes < 1.1)) <= 0.10

    def test_error_and_miscalibration_shrink_with_n(self, unpenalised):
        sizes = [75, 335, 456]
        for metric, transform in (("mape", np.asarray), ("cal_slope", lambda s: np.abs(1.0 - s))):
            values = [transform(metric_values(unpenalised, metric, n)) for n in sizes]
            for smaller, larger in zip(values, values[1:]):
                mcse = np.sqrt(smaller.var() / smaller.size + larger.var() / larger.size)
                assert larger.mean() <= smaller.mean() + mcse, metric

    def test_noise_predictors_degrade_small_samples(self, preeclampsia):
        config = structs.replace(
            preeclampsia.config,
            strategies=[StrategyConfig(kind="mle")],
            n_values=[75],
            iterations=400,
            instability_sample=50,
            curves_emitted=5,
        )
        variants = [NoiseVariant(name="base"), NoiseVariant(name="noise10", noise_columns=10)]
        result = sweep(config, variants).combined()

        def rvsi_share(variant):
            draws = result.draws
            chosen = draws[
                (draws["metric"] == "rvsi_model")
                & (draws["variant"] == variant)
                & (draws["subgroup"] == "overall")
            ]
            return float(np.mean(chosen["value"].to_numpy() >= 90.0))

        base_c = metric_values(result, "c_stat", 75, variant="base").mean()
        noisy_c = metric_values(result, "c_stat", 75, variant="noise10").mean()
        assert noisy_c < base_c
        assert rvsi_share("noise10") < rvsi_share("base")
