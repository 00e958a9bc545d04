import numpy as np
import pytest
from scipy.special import expit

from src.config import AlignmentError, DegenerateOutcomeError, InsufficientDataError
from src.devstrat import (
    McmcConfig,
    PriorSpec,
    StrategyConfig,
    column_scale,
    dump_model,
    fit_bayes_penalized,
    fit_mle_logistic,
    fit_penalized,
    fit_penalized_cv,
    fit_random_forest,
    fit_strategy,
    irls,
    kkt_residual,
    lambda_grid,
    load_model,
    predict_risks,
    shrink_uniform,
    standardize,
)
from src.devstrat.design import with_intercept
from src.devstrat.mcmc import run_chain, split_chain_check
from src.popgen import CaseMix, ColumnSpec, DevelopmentSample

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


def design_of(sample):
    return standardize(sample.casemix, column_scale(sample.casemix)), np.asarray(sample.outcome, dtype=float)


class TestUnpenalised:
    def test_score_vanishes_at_the_estimate(self, sample):
        design, y = design_of(sample)
        full = with_intercept(design)
        result = irls(full, y)
        score = full.T @ (y - expit(full @ result.coefficients))
        assert result.converged
        assert np.max(np.abs(score)) < 1e-8

    def test_large_coefficient_of_a_converged_fit_is_kept(self, rng):
        x = rng.normal(size=500)
        y = (rng.random(500) < expit(x)).astype(float)
        # A shrunken predictor scale pushes its slope near 100 without separation
        design = np.column_stack([np.ones(500), x / 100.0])
        result = irls(design, y)

        assert result.converged
        assert not result.separation
        assert abs(result.coefficients[1]) > 20

    def test_large_coefficient_without_convergence_is_separation(self, rng):
        x = rng.normal(size=500)
        y = (rng.random(500) < expit(x)).astype(float)
        design = np.column_stack([np.ones(500), x / 100.0])
        result = irls(design, y, max_iter=1)

        assert result.separation
        assert not result.converged

    def test_single_class_outcome(self, sample):
        flat = DevelopmentSample(casemix=sample.casemix, outcome=np.zeros(sample.n, dtype=np.int8), seed_id=0)
        with pytest.raises(DegenerateOutcomeError):
            fit_mle_logistic(flat)

    def test_uniform_shrinkage(self, sample):
        mle = fit_mle_logistic(sample)
        shrunk = shrink_uniform(mle, sample)
        factor = shrunk.diagnostics.shrinkage_factor

        assert 0 < factor < 1
        assert shrunk.slopes == pytest.approx(factor * mle.slopes)

    def test_shrunk_intercept_restores_mean_risk(self, sample):
        shrunk = shrink_uniform(fit_mle_logistic(sample), sample)
        risks = predict_risks(shrunk, sample.casemix)
        assert risks.mean() == pytest.approx(sample.outcome.mean(), abs=1e-6)


class TestPenalised:
    def test_zero_penalty_reproduces_unpenalised_fit(self, sample):
        design, y = design_of(sample)
        mle = irls(with_intercept(design), y)
        fit = fit_penalized(design, y, 0.0, "ridge", tol=1e-7)

        assert fit.converged
        assert fit.intercept == pytest.approx(mle.coefficients[0], abs=1e-4)
        assert fit.slopes == pytest.approx(mle.coefficients[1:], abs=1e-4)

    def test_lasso_satisfies_optimality(self, sample):
        design, y = design_of(sample)
        grid = lambda_grid(design, y, "lasso")
        fit = fit_penalized(design, y, float(grid[10]), "lasso")
        assert kkt_residual(fit.intercept, fit.slopes, design, y, float(grid[10]), "lasso") < 1e-6

    def test_largest_lasso_lambda_zeroes_slopes(self, sample):
        design, y = design_of(sample)
        lam_max = float(lambda_grid(design, y, "lasso")[0])
        fit = fit_penalized(design, y, lam_max, "lasso")
        assert np.all(fit.slopes == 0.0)

    def test_cross_validation_is_deterministic(self, sample):
        first = fit_penalized_cv(sample, "ridge", folds=5, rng_seed=13)
        second = fit_penalized_cv(sample, "ridge", folds=5, rng_seed=13)
        assert first.coefficients == second.coefficients
        assert first.diagnostics.selected_lambda == second.diagnostics.selected_lambda

    def test_selected_lambda_comes_from_the_grid(self, sample):
        grid = [50.0, 10.0, 1.0, 0.1]
        fit = fit_penalized_cv(sample, "lasso", folds=5, lambda_grid_values=grid, rng_seed=2)
        assert fit.kind == "lasso_cv"
        assert fit.diagnostics.selected_lambda in grid

    def test_too_few_rows_for_folds(self, sample):
        small = DevelopmentSample(
            casemix=sample.casemix.take(np.arange(6)), outcome=np.array([0, 1] * 3), seed_id=0
        )
        with pytest.raises(InsufficientDataError):
            fit_penalized_cv(small, "ridge", folds=10)

    def test_lasso_optimality_on_random_problems(self):
        truth = np.array([1.0, -0.5, 0.0, 0.3, 0.0])
        for seed in range(50):
            rng = np.random.default_rng(seed)
            raw = rng.normal(size=(120, 5))
            design = (raw - raw.mean(axis=0)) / raw.std(axis=0)
            y = (rng.random(120) < expit(design @ truth)).astype(float)
            lam = 0.2 * float(lambda_grid(design, y, "lasso")[0])
            fit = fit_penalized(design, y, lam, "lasso")
            assert kkt_residual(fit.intercept, fit.slopes, design, y, lam, "lasso") < 1e-6, seed


class TestBayesian:
    def test_same_seed_same_posterior_mean(self, sample):
        mcmc = McmcConfig(burn_in=200, thin=1, draws=200)
        strategy = StrategyConfig(kind="bayes_ridge")
        first = fit_bayes_penalized(sample, strategy.prior, mcmc, rng_seed=21)
        second = fit_bayes_penalized(sample, strategy.prior, mcmc, rng_seed=21)

        assert first.coefficients == second.coefficients
        assert 0 < first.diagnostics.mcmc_acceptance < 1

    @pytest.mark.slow
    def test_posterior_mean_near_unpenalised_fit(self, sample):
        mcmc = McmcConfig(burn_in=500, thin=2, draws=500)
        model = fit_strategy(StrategyConfig(kind="bayes_lasso", mcmc=mcmc), sample, rng_seed=4)
        mle = fit_mle_logistic(sample)
        assert np.asarray(model.coefficients) == pytest.approx(np.asarray(mle.coefficients), abs=0.5)


class TestChainDiagnostics:
    def test_acceptance_collapse_is_flagged(self):
        prior = PriorSpec(family="ridge", fixed_lambda_sq=1.0)
        mcmc = McmcConfig(burn_in=0, thin=1, draws=200, initial_scale=1.0)
        chain = run_chain(
            lambda b: -0.5 * 1e8 * float(np.dot(b, b)),
            np.zeros(3),
            np.eye(3),
            prior,
            mcmc,
            np.random.default_rng(3),
        )
        assert chain.acceptance < 0.05
        assert any("acceptance" in warning for warning in chain.warnings)

    def test_split_chain_check(self, rng):
        steady = rng.normal(size=(400, 2))
        shifted = np.vstack([rng.normal(size=(200, 2)), rng.normal(loc=3.0, size=(200, 2))])
        assert split_chain_check(steady)
        assert not split_chain_check(shifted)


class TestForest:
    def test_trees_respect_depth(self, sample):
        model = fit_random_forest(sample, n_trees=5, max_depth=2, rng_seed=1)
        assert len(model.forest) == 5
        assert all(tree.depth() <= 2 for tree in model.forest)

    def test_risks_are_probabilities(self, sample):
        model = fit_random_forest(sample, n_trees=5, max_depth=3, rng_seed=1)
        risks = predict_risks(model, sample.casemix)
        assert np.all((risks >= 0) & (risks <= 1))

    def test_same_seed_same_forest(self, sample):
        first = fit_random_forest(sample, n_trees=3, rng_seed=8)
        second = fit_random_forest(sample, n_trees=3, rng_seed=8)
        assert first.forest == second.forest


class TestPrediction:
    def test_raw_coefficients_predict_the_same(self, sample, casemix):
        model = fit_mle_logistic(sample)
        raw = model.raw_coefficients()
        direct = expit(raw[0] + casemix.rows @ raw[1:])
        assert predict_risks(model, casemix) == pytest.approx(direct, abs=1e-9)

    def test_model_file_round_trip(self, sample, casemix, tmp_path):
        model = fit_mle_logistic(sample)
        loaded = load_model(dump_model(model, tmp_path / "model.json"))
        assert np.array_equal(predict_risks(loaded, casemix), predict_risks(model, casemix))

    def test_missing_column_is_an_alignment_error(self, sample, casemix):
        model = fit_mle_logistic(sample)
        narrow = CaseMix(
            columns=(ColumnSpec(name="x1"), ColumnSpec(name="x2")), rows=casemix.rows[:, :2].copy()
        )
        with pytest.raises(AlignmentError):
            predict_risks(model, narrow)
