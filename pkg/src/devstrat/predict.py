"""
Risk predictions and JSON export of fitted models.
"""

from pathlib import Path

import msgspec
import numpy as np
from scipy.special import expit

from ..popgen import CaseMix
from .design import standardize_rows
from .forest import predict_forest
from .schemas import FittedModel

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


RISK_CLAMP = 1e-10


def model_design(model: FittedModel, casemix: CaseMix) -> np.ndarray:
    """Design matrix the model acts on: standardised used columns, or raw rows for forests."""
    rows = casemix.aligned_rows(model.column_names)
    if model.kind == "forest":
        return np.ascontiguousarray(rows, dtype=np.float64)
    return standardize_rows(rows, model.column_names, model.scale)


def predict_risks(model: FittedModel, casemix: CaseMix) -> np.ndarray:
    """Estimated risk for every row, clamped to [1e-10, 1 - 1e-10]."""
    design = model_design(model, casemix)
    if model.kind == "forest":
        risks = predict_forest(model.forest, design)
    else:
        risks = expit(model.intercept + design @ model.slopes)
    return np.clip(risks, RISK_CLAMP, 1.0 - RISK_CLAMP)


def dump_model(model: FittedModel, path: str | Path) -> Path:
    """Write the model as a JSON document."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(msgspec.json.format(msgspec.json.encode(model), indent=2))
    return path


def load_model(path: str | Path) -> FittedModel:
    return msgspec.json.decode(Path(path).read_bytes(), type=FittedModel)
