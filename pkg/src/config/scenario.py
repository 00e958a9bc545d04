"""
Scenario documents: one JSON file with the sections data, reference,
strategies, mcmc, scenario, criteria and outputs.
"""

from pathlib import Path
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .exceptions import ConfigurationError

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ColumnModel(_Section):
    name: str
    kind: Literal["continuous", "binary", "dummy"] = "continuous"
    categorical: str | None = None
    source: str | None = None
    transform: Literal["identity", "log"] = "identity"

    @model_validator(mode="after")
    def check_dummy(self):
        if self.kind == "dummy" and not self.categorical:
            raise ValueError(f"dummy column '{self.name}' needs 'categorical'")
        return self


class NormalModel(_Section):
    type: Literal["normal"]
    mean: float = 0.0
    sd: float = Field(1.0, gt=0)


class BernoulliModel(_Section):
    type: Literal["bernoulli"]
    prob: float = Field(gt=0, lt=1)


class EmpiricalModel(_Section):
    type: Literal["empirical"]
    values: list[float] = Field(min_length=1)
    kind: Literal["continuous", "binary", "dummy"] = "continuous"


Marginal = Annotated[NormalModel | BernoulliModel | EmpiricalModel, Field(discriminator="type")]


class DataSection(_Section):
    """Where the case-mix comes from."""

    path: str | None = None
    columns: list[ColumnModel] = Field(default_factory=list)
    subgroup: str | None = None
    marginals: dict[str, Marginal] | None = None
    population_size: int = Field(100_000, ge=2)
    synthesis_seed: int = Field(1, ge=0)
    # Target and development rows are disjoint unless split is false
    split: bool = True
    # Development source size; None keeps population_size rows for the target
    split_source_rows: int | None = Field(None, ge=2)
    noise_extra: int = Field(0, ge=0)

    @model_validator(mode="after")
    def check_source(self):
        if (self.path is None) == (self.marginals is None):
            raise ValueError("give exactly one of 'path' or 'marginals'")
        if self.path is not None and not self.columns:
            raise ValueError("'columns' is required with 'path'")
        return self


class MixtureMemberModel(_Section):
    probability: float = Field(ge=0, le=1)
    target_cstat: float | None = Field(None, ge=0.5, lt=1)
    target_prevalence: float | None = Field(None, gt=0, lt=1)
    intercept: float | None = None
    scale: float | None = Field(None, ge=0)

    @model_validator(mode="after")
    def check_member(self):
        targets = self.target_cstat is not None and self.target_prevalence is not None
        fixed = self.intercept is not None and self.scale is not None
        if targets == fixed:
            raise ValueError("give either targets (target_cstat, target_prevalence) or (intercept, scale)")
        return self


class ReferenceSection(_Section):
    """Relative weights and how intercept and scale are obtained."""

    weights: dict[str, float] = Field(min_length=1)
    target_cstat: float | None = Field(None, ge=0.5, lt=1)
    target_prevalence: float | None = Field(None, gt=0, lt=1)
    intercept: float | None = None
    scale: float | None = Field(None, ge=0)
    tol: float = Field(0.005, gt=0)
    max_iter: int = Field(60, ge=1)
    mixture: list[MixtureMemberModel] | None = None
    # Previously calibrated reference model JSON
    model_path: str | None = None

    @model_validator(mode="after")
    def check_reference(self):
        if self.mixture is not None:
            total = sum(member.probability for member in self.mixture)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"mixture probabilities sum to {total}, expected 1")
            return self
        if self.model_path is not None:
            return self
        targets = self.target_cstat is not None and self.target_prevalence is not None
        fixed = self.intercept is not None and self.scale is not None
        if not (targets or fixed):
            raise ValueError("give targets, (intercept, scale), a mixture or model_path")
        return self


class StrategyModel(_Section):
    kind: Literal["mle", "shrunk", "ridge_cv", "lasso_cv", "bayes_ridge", "bayes_lasso", "forest"]
    name: str | None = None
    max_iter: int = Field(50, ge=1)
    tol: float | None = Field(None, gt=0)
    folds: int = Field(10, ge=2)
    lambda_grid: list[float] | None = None
    intercept_variance: float = Field(1e6, gt=0)
    fixed_lambda_sq: float | None = Field(None, gt=0)
    n_trees: int = Field(100, ge=1)
    max_depth: int = Field(3, ge=0)
    mtry: int | None = Field(None, ge=1)
    min_leaf: int = Field(1, ge=1)


class McmcSection(_Section):
    burn_in: int = Field(5000, ge=0)
    thin: int = Field(10, ge=1)
    draws: int = Field(1000, ge=1)
    initial_scale: float | None = Field(None, gt=0)
    adapt_window: int = Field(100, ge=1)
    target_acceptance: float = Field(0.30, gt=0, lt=1)
    # Burn-in of the one-sample approximation
    fisher_burn_in: int = Field(10_000, ge=0)


class VariantModel(_Section):
    name: str
    noise_columns: int = Field(0, ge=0)


class ScenarioSection(_Section):
    n_values: list[int] = Field(min_length=1)
    iterations: int = Field(1000, ge=1)
    thresholds: list[float] = Field(default_factory=lambda: [0.5])
    master_seed: int = Field(0, ge=0)
    instability_sample: int = Field(2000, ge=0)
    curves_emitted: int = Field(200, ge=0)
    variants: list[VariantModel] = Field(default_factory=list)
    approximation: Literal["mvn", "bayes_ridge", "bayes_lasso"] = "mvn"

    @model_validator(mode="after")
    def check_scenario(self):
        if any(n < 2 for n in self.n_values):
            raise ValueError("every n must be >= 2")
        if any(not 0 < t < 1 for t in self.thresholds):
            raise ValueError("thresholds must lie in (0, 1)")
        return self


class CriterionModel(_Section):
    metric: str
    lower: float | None = None
    upper: float | None = None
    probability: float = Field(gt=0, le=1)
    threshold: float | None = None

    @model_validator(mode="after")
    def check_bounds(self):
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ValueError("lower must be <= upper")
        return self


class OutputsSection(_Section):
    directory: str | None = None
    store_models: bool = False


class ScenarioFile(_Section):
    """Whole scenario document."""

    data: DataSection
    reference: ReferenceSection
    strategies: list[StrategyModel] = Field(default_factory=lambda: [StrategyModel(kind="mle")])
    mcmc: McmcSection = Field(default_factory=McmcSection)
    scenario: ScenarioSection
    criteria: list[CriterionModel] = Field(default_factory=list)
    outputs: OutputsSection = Field(default_factory=OutputsSection)


def _describe(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        where = ".".join(str(part) for part in item["loc"]) or "<document>"
        lines.append(f"{where}: {item['msg']}")
    return "\n".join(lines)


def load_scenario_file(path: str | Path) -> ScenarioFile:
    """Parse and validate a scenario document."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        raise ConfigurationError(f"Cannot read scenario file {path}: {error}") from error
    try:
        return ScenarioFile.model_validate_json(text)
    except ValidationError as error:
        raise ConfigurationError(f"Invalid scenario file {path}:\n{_describe(error)}") from error
