"""
Per-individual instability outputs: predictions across draws, calibration
curves with their envelope, interval widths and misclassification.
"""

from typing import Sequence

import numpy as np
import pandas as pd
from msgspec import Struct, field

from ..metrics import interval_widths, misclassification_prob

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


PREDICTION_COLUMNS = ["n", "variant", "strategy", "individual_id", "true_risk", "draw_id", "estimated_risk"]
CURVE_COLUMNS = [
    "n",
    "variant",
    "strategy",
    "draw_id",
    "point",
    "estimated_risk",
    "observed_risk",
    "lower",
    "upper",
]
UNCERTAINTY_COLUMNS = [
    "n",
    "variant",
    "strategy",
    "threshold",
    "individual_id",
    "true_risk",
    "interval_width",
    "misclassification_prob",
]
ENVELOPE_DRAW = -1


class InstabilityBlock(Struct):
    """Tracked-individual estimates of one (n, variant, strategy)."""

    n: int
    variant: str
    strategy: str
    individual_ids: np.ndarray
    # draws x individuals; a truth row per draw covers reference mixtures
    true_risks: np.ndarray
    # draws x individuals, NaN rows for failed draws
    estimates: np.ndarray
    grid: np.ndarray | None = None
    # (draw_id, observed curve on grid)
    curves: list[tuple[int, np.ndarray]] = field(default_factory=list)


class InstabilityData(Struct):
    predictions: pd.DataFrame
    curves: pd.DataFrame
    uncertainty: pd.DataFrame


def _prediction_frame(block: InstabilityBlock) -> pd.DataFrame:
    ok = ~np.isnan(block.estimates).any(axis=1)
    draw_ids = np.flatnonzero(ok)
    estimates = block.estimates[ok]
    truth = np.broadcast_to(block.true_risks, block.estimates.shape)[ok]
    individuals = block.individual_ids.shape[0]
    return pd.DataFrame(
        {
            "n": block.n,
            "variant": block.variant,
            "strategy": block.strategy,
            "individual_id": np.repeat(block.individual_ids, draw_ids.shape[0]),
            "true_risk": truth.T.reshape(-1),
            "draw_id": np.tile(draw_ids, individuals),
            "estimated_risk": estimates.T.reshape(-1),
        },
        columns=PREDICTION_COLUMNS,
    )


def _curve_frame(block: InstabilityBlock, curves_emitted: int) -> pd.DataFrame:
    if block.grid is None or not block.curves or curves_emitted == 0:
        return pd.DataFrame(columns=CURVE_COLUMNS)
    emitted = sorted(block.curves, key=lambda item: item[0])[:curves_emitted]
    points = block.grid.shape[0]
    frames = []
    for draw_id, observed in emitted:
        frames.append(
            pd.DataFrame(
                {
                    "n": block.n,
                    "variant": block.variant,
                    "strategy": block.strategy,
                    "draw_id": draw_id,
                    "point": np.arange(points),
                    "estimated_risk": block.grid,
                    "observed_risk": observed,
                    "lower": np.nan,
                    "upper": np.nan,
                },
                columns=CURVE_COLUMNS,
            )
        )
    stacked = np.stack([observed for _, observed in emitted])
    lower, middle, upper = np.percentile(stacked, [2.5, 50.0, 97.5], axis=0, method="linear")
    frames.append(
        pd.DataFrame(
            {
                "n": block.n,
                "variant": block.variant,
                "strategy": block.strategy,
                "draw_id": ENVELOPE_DRAW,
                "point": np.arange(points),
                "estimated_risk": block.grid,
                "observed_risk": middle,
                "lower": lower,
                "upper": upper,
            },
            columns=CURVE_COLUMNS,
        )
    )
    return pd.concat(frames, ignore_index=True)


def _uncertainty_frame(block: InstabilityBlock, thresholds: Sequence[float]) -> pd.DataFrame:
    ok = ~np.isnan(block.estimates).any(axis=1)
    estimates = block.estimates[ok]
    truth = np.broadcast_to(block.true_risks, block.estimates.shape)[ok]
    individuals = block.individual_ids.shape[0]
    if estimates.shape[0] == 0:
        widths = np.full(individuals, np.nan)
    else:
        widths = interval_widths(estimates)
    mean_truth = truth.mean(axis=0) if truth.shape[0] else np.full(individuals, np.nan)

    frames = []
    for threshold in thresholds or [None]:
        if threshold is None or estimates.shape[0] == 0:
            misclassified = np.full(individuals, np.nan)
        else:
            misclassified = misclassification_prob(estimates, truth, threshold)
        frames.append(
            pd.DataFrame(
                {
                    "n": block.n,
                    "variant": block.variant,
                    "strategy": block.strategy,
                    "threshold": threshold,
                    "individual_id": block.individual_ids,
                    "true_risk": mean_truth,
                    "interval_width": widths,
                    "misclassification_prob": misclassified,
                },
                columns=UNCERTAINTY_COLUMNS,
            )
        )
    return pd.concat(frames, ignore_index=True)


def emit_instability(
    blocks: Sequence[InstabilityBlock], thresholds: Sequence[float], curves_emitted: int = 200
) -> InstabilityData:
    """Long-format instability tables for every block."""
    predictions = [_prediction_frame(block) for block in blocks]
    curves = [_curve_frame(block, curves_emitted) for block in blocks]
    uncertainty = [_uncertainty_frame(block, thresholds) for block in blocks]

    def combine(frames: list[pd.DataFrame], columns: list[str]) -> pd.DataFrame:
        frames = [frame for frame in frames if not frame.empty]
        if not frames:
            return pd.DataFrame(columns=columns)
        return pd.concat(frames, ignore_index=True)

    return InstabilityData(
        predictions=combine(predictions, PREDICTION_COLUMNS),
        curves=combine(curves, CURVE_COLUMNS),
        uncertainty=combine(uncertainty, UNCERTAINTY_COLUMNS),
    )
