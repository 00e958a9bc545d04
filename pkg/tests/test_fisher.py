import numpy as np
import pytest
from msgspec import structs

from src.config import ConfigurationError, RankDeficientError
from src.devstrat import McmcConfig, PriorSpec, StrategyConfig
from src.engine import ReferenceMixture, run_scenario
from src.fisher import (
    CoefficientDraws,
    approx_scenario,
    bayes_onesample,
    draw_mvn_models,
    fisher_scenario,
    unit_information,
)
from src.popgen import CaseMix, ColumnSpec, ReferenceModel

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


class TestUnitInformation:
    def test_intercept_only(self):
        casemix = CaseMix(columns=(), rows=np.zeros((100, 0)))
        model = ReferenceModel(intercept=0.0, scale=1.0, weights=[], column_names=[])
        assert unit_information(casemix, model).matrix == pytest.approx(np.array([[0.25]]))

    def test_uninformative_predictor(self, rng):
        casemix = CaseMix(columns=(ColumnSpec(name="x"),), rows=rng.standard_normal((100_000, 1)))
        model = ReferenceModel(intercept=0.0, scale=1.0, weights=[0.0], column_names=["x"])
        info = unit_information(casemix, model)
        assert np.max(np.abs(info.matrix - 0.25 * np.eye(2))) < 0.003

    def test_matrix_is_symmetric(self, casemix, reference):
        matrix = unit_information(casemix, reference).matrix
        assert np.array_equal(matrix, matrix.T)

    def test_dependent_column_is_named(self, rng):
        a = rng.standard_normal(500)
        columns = (ColumnSpec(name="a"), ColumnSpec(name="b"))
        casemix = CaseMix(columns=columns, rows=np.column_stack([a, 2.0 * a]))
        model = ReferenceModel(intercept=0.0, scale=1.0, weights=[1.0, 1.0], column_names=["a", "b"])
        with pytest.raises(RankDeficientError) as caught:
            unit_information(casemix, model)
        assert len(caught.value.columns) == 1
        assert set(caught.value.columns) <= {"a", "b"}


class TestMultivariateNormalDraws:
    def test_huge_sample_collapses_onto_the_reference(self, casemix, reference):
        info = unit_information(casemix, reference)
        draws = draw_mvn_models(reference, info, 10**12, 50, rng_seed=1)
        assert np.max(np.abs(draws.matrix - reference.effective_coefficients)) < 1e-4

    def test_empirical_covariance(self, casemix, reference):
        info = unit_information(casemix, reference)
        draws = draw_mvn_models(reference, info, 1000, 20_000, rng_seed=2)
        expected = info.covariance(1000)
        assert np.cov(draws.matrix, rowvar=False) == pytest.approx(expected, rel=0.1, abs=1e-4)
        assert info.covariance(2000) == pytest.approx(expected / 2)

    def test_same_seed_same_draws(self, casemix, reference):
        info = unit_information(casemix, reference)
        first = draw_mvn_models(reference, info, 300, 10, rng_seed=3)
        second = draw_mvn_models(reference, info, 300, 10, rng_seed=3)
        assert np.array_equal(first.matrix, second.matrix)

    def test_frame_layout(self, casemix, reference):
        info = unit_information(casemix, reference)
        frame = draw_mvn_models(reference, info, 300, 4, rng_seed=3).to_frame()
        assert list(frame.columns) == ["draw_id", "intercept", "x1", "x2", "flag"]
        assert frame["draw_id"].tolist() == [0, 1, 2, 3]


class TestOneSamplePosterior:
    @pytest.mark.slow
    def test_flat_prior_centres_on_the_reference(self, casemix, reference):
        info = unit_information(casemix, reference)
        prior = PriorSpec(family="ridge", fixed_lambda_sq=1e6)
        mcmc = McmcConfig(burn_in=1000, thin=2, draws=1000)
        draws = bayes_onesample(reference, info, 5000, prior, mcmc, rng_seed=4)

        assert draws.provenance == "bayes_onesample"
        assert draws.n_draws == 1000
        assert draws.matrix.mean(axis=0) == pytest.approx(reference.effective_coefficients, abs=0.05)

    def test_lasso_prior_shrinks_towards_zero(self, casemix, reference):
        info = unit_information(casemix, reference)
        mcmc = McmcConfig(burn_in=1000, thin=2, draws=1000)
        draws = bayes_onesample(reference, info, 50, PriorSpec(family="lasso"), mcmc, rng_seed=5)
        slopes = np.abs(draws.matrix[:, 1:].mean(axis=0))
        assert slopes.sum() < np.abs(reference.effective_coefficients[1:]).sum()


class TestApproximateScenario:
    def test_reference_draw_scores_perfectly(self, population, reference):
        draws = CoefficientDraws(
            matrix=reference.effective_coefficients[None, :],
            provenance="mvn",
            n_used=200,
            column_names=list(reference.column_names),
        )
        result = approx_scenario(draws, population, [0.4], instability_sample=50)
        summary = result.summary

        assert summary.row("rvsi_model", strategy="mvn", n=200).mean == pytest.approx(100.0)
        assert summary.row("mape", strategy="mvn", n=200).mean == pytest.approx(0.0, abs=1e-12)
        assert summary.row("cal_slope", strategy="mvn", n=200).mean == pytest.approx(1.0, abs=0.2)

    def test_one_coefficient_file_per_size(self, scenario):
        result, draws = fisher_scenario(structs.replace(scenario, n_values=[200, 400]))
        assert sorted(draws) == [200, 400]
        assert all(d.n_draws == scenario.iterations for d in draws.values())
        assert set(result.draws["n"]) == {200, 400}

    def test_mixture_is_rejected(self, scenario, reference):
        mixture = ReferenceMixture(models=[reference, reference], probabilities=[0.5, 0.5])
        with pytest.raises(ConfigurationError):
            fisher_scenario(structs.replace(scenario, reference=mixture))

    def test_unknown_approximation(self, scenario):
        with pytest.raises(ConfigurationError):
            fisher_scenario(scenario, approximation="laplace")


class TestAgainstFullSimulation:
    @pytest.mark.slow
    def test_normal_approximation_tracks_full_simulation(self, preeclampsia):
        config = structs.replace(
            preeclampsia.config,
            strategies=[StrategyConfig(kind="mle")],
            n_values=[456],
            iterations=500,
            instability_sample=50,
            curves_emitted=5,
        )
        full = run_scenario(config).summary
        approximate, _ = fisher_scenario(config, "mvn")
        approximate = approximate.summary

        for metric, tolerance in (("cal_slope", 0.05), ("mape", 0.01)):
            simulated = full.row(metric, strategy="mle", n=456).mean
            approximated = approximate.row(metric, strategy="mvn", n=456).mean
            assert abs(simulated - approximated) <= tolerance, metric
