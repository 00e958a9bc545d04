"""
Net benefit at a risk threshold and the value of developing a model.
"""

from typing import Literal

import numpy as np
from msgspec import Struct

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


Winner = Literal["model", "treat_all", "treat_none"]
WINNER_ORDER: tuple[Winner, ...] = ("model", "treat_all", "treat_none")


class ValueOfInformation(Struct, frozen=True):
    """Net benefit of a model, its winner and their ratio to the reference."""

    threshold: float
    nb_model: float
    nb_max: float
    nb_treat_all: float
    winner: Winner
    nb_winner: float
    # NaN when nb_max <= 0
    rvsi_model: float
    rvsi_winner: float

    @property
    def rvsi_defined(self) -> bool:
        return self.nb_max > 0

    @property
    def nb_treat_none(self) -> float:
        return 0.0


def _check_threshold(threshold: float) -> None:
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"Risk threshold {threshold} outside (0, 1)")


def net_benefit(risks: np.ndarray, outcomes: np.ndarray, threshold: float) -> float:
    """TP/n - FP/n * t / (1 - t), treating rows with risk >= t."""
    _check_threshold(threshold)
    outcomes = np.asarray(outcomes)
    n = outcomes.shape[0]
    if n == 0:
        return 0.0
    treated = np.asarray(risks) >= threshold
    true_positives = int(np.count_nonzero(treated & (outcomes == 1)))
    false_positives = int(np.count_nonzero(treated & (outcomes != 1)))
    return true_positives / n - (false_positives / n) * threshold / (1.0 - threshold)


def treat_all_net_benefit(outcomes: np.ndarray, threshold: float) -> float:
    _check_threshold(threshold)
    outcomes = np.asarray(outcomes)
    n = outcomes.shape[0]
    events = int(np.count_nonzero(outcomes == 1))
    return events / n - ((n - events) / n) * threshold / (1.0 - threshold)


def choose_winner(model_nb: float, treat_all_nb: float) -> Winner:
    """Strategy with the highest net benefit; ties go to the earlier of model, treat-all, treat-none."""
    candidates = (model_nb, treat_all_nb, 0.0)
    return WINNER_ORDER[int(np.argmax(candidates))]


def value_of_information(
    model_risks: np.ndarray,
    true_risks: np.ndarray,
    outcomes: np.ndarray,
    dev_outcomes: np.ndarray,
    dev_model_risks: np.ndarray,
    threshold: float,
    nb_max: float | None = None,
    winner: Winner | None = None,
) -> ValueOfInformation:
    """Model and winner net benefit in the population, relative to the reference.

    The winner is picked on the development sample. nb_max and winner
    may be supplied when already known (subgroups reuse the overall winner).
    """
    nb_model = net_benefit(model_risks, outcomes, threshold)
    nb_all = treat_all_net_benefit(outcomes, threshold)
    if nb_max is None:
        nb_max = net_benefit(true_risks, outcomes, threshold)
    if winner is None:
        winner = choose_winner(
            net_benefit(dev_model_risks, dev_outcomes, threshold),
            treat_all_net_benefit(dev_outcomes, threshold),
        )
    nb_winner = {"model": nb_model, "treat_all": nb_all, "treat_none": 0.0}[winner]
    defined = nb_max > 0
    return ValueOfInformation(
        threshold=threshold,
        nb_model=nb_model,
        nb_max=nb_max,
        nb_treat_all=nb_all,
        winner=winner,
        nb_winner=nb_winner,
        rvsi_model=100.0 * nb_model / nb_max if defined else float("nan"),
        rvsi_winner=100.0 * nb_winner / nb_max if defined else float("nan"),
    )
