import math

import numpy as np
import pytest

from src.config import DegenerateRecalibrationError, UndefinedMetricError
from src.metrics import (
    METRIC_NAMES,
    c_statistic,
    calibration_curve,
    calibration_fit,
    choose_winner,
    evaluate_model,
    interval_widths,
    misclassification_prob,
    net_benefit,
    prediction_error,
    r2_measures,
    treat_all_net_benefit,
    value_of_information,
)

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


def brute_force_concordance(risks, outcomes):
    events = risks[outcomes == 1]
    non_events = risks[outcomes == 0]
    wins = (events[:, None] > non_events[None, :]).sum()
    ties = (events[:, None] == non_events[None, :]).sum()
    return (wins + 0.5 * ties) / (events.size * non_events.size)


class TestConcordance:
    def test_matches_pairwise_count(self, rng):
        risks = np.round(rng.random(300), 2)
        outcomes = (rng.random(300) < risks).astype(int)
        expected = brute_force_concordance(risks, outcomes)
        assert c_statistic(risks, outcomes) == pytest.approx(expected, abs=1e-12)

    def test_constant_risks_give_half(self):
        assert c_statistic(np.full(10, 0.3), np.array([0, 1] * 5)) == pytest.approx(0.5)

    def test_single_class_is_undefined(self):
        with pytest.raises(UndefinedMetricError):
            c_statistic(np.linspace(0.1, 0.9, 5), np.ones(5))


class TestNetBenefit:
    def test_hand_counted(self):
        risks = np.array([0.9, 0.6, 0.4, 0.2, 0.7])
        outcomes = np.array([1, 0, 1, 0, 1])
        # treated: three rows, two events
        assert net_benefit(risks, outcomes, 0.5) == pytest.approx(2 / 5 - 1 / 5)

    def test_risk_at_threshold_is_treated(self):
        assert net_benefit(np.array([0.5]), np.array([1]), 0.5) == pytest.approx(1.0)

    def test_treat_all(self):
        outcomes = np.array([1] * 68 + [0] * 32)
        assert treat_all_net_benefit(outcomes, 0.5) == pytest.approx(0.36)

    @pytest.mark.parametrize("threshold", [0.0, 1.0, -0.2])
    def test_threshold_outside_unit_interval(self, threshold):
        with pytest.raises(ValueError):
            net_benefit(np.array([0.2]), np.array([1]), threshold)

    def test_winner_ties(self):
        assert choose_winner(0.1, 0.1) == "model"
        assert choose_winner(-0.1, 0.0) == "treat_all"
        assert choose_winner(-0.1, -0.2) == "treat_none"

    def test_relative_value_undefined_without_reference_benefit(self):
        outcomes = np.array([0, 0, 0, 1])
        risks = np.array([0.1, 0.1, 0.1, 0.2])
        voi = value_of_information(risks, risks, outcomes, outcomes, risks, 0.5)
        assert voi.nb_max == 0.0
        assert math.isnan(voi.rvsi_model)
        assert not voi.rvsi_defined

    def test_reference_scores_full_value(self, population):
        risks = population.true_risk
        voi = value_of_information(risks, risks, population.outcome, population.outcome, risks, 0.4)
        assert voi.rvsi_model == pytest.approx(100.0)


class TestCalibration:
    def test_true_risks_are_calibrated(self, population):
        intercept, slope = calibration_fit(population.true_risk, population.outcome)
        assert slope == pytest.approx(1.0, abs=0.2)
        assert intercept == pytest.approx(0.0, abs=0.2)

    def test_constant_risks_cannot_be_recalibrated(self):
        with pytest.raises(DegenerateRecalibrationError):
            calibration_fit(np.full(20, 0.4), np.array([0, 1] * 10))

    def test_curve_follows_true_risks(self, population):
        curve = calibration_curve(population.true_risk, population.outcome)
        assert curve.grid.shape == curve.observed.shape
        assert len(curve.knots) == 4
        assert np.max(np.abs(curve.observed - curve.grid)) < 0.1


class TestErrors:
    def test_prediction_error(self):
        mape, rmspe = prediction_error(np.array([0.1, 0.5]), np.array([0.2, 0.2]))
        assert mape == pytest.approx(0.2)
        assert rmspe == pytest.approx(math.sqrt(0.05))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            prediction_error(np.array([0.1, 0.5]), np.array([0.2]))

    def test_r2_ordering(self, population):
        cox_snell, nagelkerke = r2_measures(population.true_risk, population.outcome)
        assert 0 < cox_snell < nagelkerke < 1


class TestInstability:
    def test_interval_width_uses_linear_percentiles(self):
        draws = np.arange(101, dtype=float)[:, None]
        assert interval_widths(draws) == pytest.approx([95.0])

    def test_misclassification_fraction(self):
        draws = np.array([[0.7], [0.4], [0.55], [0.8]])
        assert misclassification_prob(draws, np.array([0.6]), 0.5) == pytest.approx([0.25])

    def test_truth_on_threshold_never_misclassified(self):
        draws = np.array([[0.1], [0.9]])
        assert misclassification_prob(draws, np.array([0.5]), 0.5) == pytest.approx([0.0])


class TestEvaluateModel:
    def test_reference_model_has_no_degradation(self, population):
        risks = population.true_risk
        draw = evaluate_model(risks, population, [0.4], population.outcome, risks)

        values = draw.values(0)
        assert set(values) == set(METRIC_NAMES)
        assert values["mape"] == 0.0
        assert values["c_degradation"] == pytest.approx(0.0, abs=1e-12)
        assert values["rvsi_model"] == pytest.approx(100.0)
        assert values["winner_model"] + values["winner_treat_all"] + values["winner_treat_none"] == 1.0
        assert draw.subgroup_breakdowns is None
