"""
Scenario settings, assurance criteria and summary records.
"""

import math

from msgspec import Struct, field

from ..config import ConfigurationError
from ..devstrat import StrategyConfig
from ..popgen import CaseMix, ReferenceModel

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


class Criterion(Struct, frozen=True):
    """Assurance criterion: P(lower <= metric <= upper) >= probability.

    Bounds are inclusive; a missing bound is unbounded. ``threshold``
    restricts a threshold-dependent metric to one risk threshold.
    """

    metric: str
    probability: float
    lower: float | None = None
    upper: float | None = None
    threshold: float | None = None

    def __post_init__(self):
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ConfigurationError(f"Criterion on '{self.metric}': lower > upper")
        if not 0 < self.probability <= 1:
            raise ConfigurationError(f"Criterion on '{self.metric}': probability must be in (0, 1]")

    def contains(self, value: float) -> bool:
        if self.lower is not None and value < self.lower:
            return False
        if self.upper is not None and value > self.upper:
            return False
        return True

    def applies_to(self, metric: str, threshold: float | None) -> bool:
        if metric != self.metric:
            return False
        return self.threshold is None or threshold is None or math.isclose(threshold, self.threshold)

    def describe(self) -> str:
        lower = "-inf" if self.lower is None else f"{self.lower:g}"
        upper = "inf" if self.upper is None else f"{self.upper:g}"
        at = "" if self.threshold is None else f" at t={self.threshold:g}"
        return f"P({lower} <= {self.metric}{at} <= {upper}) >= {self.probability:g}"


class CriteriaSpec(Struct, frozen=True):
    criteria: list[Criterion] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.criteria)


class ReferenceMixture(Struct, frozen=True):
    """Candidate reference models with their selection probabilities."""

    models: list[ReferenceModel]
    probabilities: list[float]

    def __post_init__(self):
        if len(self.models) != len(self.probabilities) or not self.models:
            raise ConfigurationError("Mixture needs one probability per reference model")
        if any(p < 0 for p in self.probabilities):
            raise ConfigurationError("Mixture probabilities must be >= 0")
        if abs(math.fsum(self.probabilities) - 1.0) > 1e-9:
            raise ConfigurationError("Mixture probabilities must sum to 1")

    @classmethod
    def single(cls, model: ReferenceModel) -> "ReferenceMixture":
        return cls(models=[model], probabilities=[1.0])

    @property
    def is_mixture(self) -> bool:
        return len(self.models) > 1


class ScenarioConfig(Struct):
    """Everything one simulation run needs, data included."""

    casemix: CaseMix
    reference: ReferenceMixture
    strategies: list[StrategyConfig]
    n_values: list[int]
    iterations: int = 1000
    thresholds: list[float] = field(default_factory=lambda: [0.5])
    master_seed: int = 0
    criteria: CriteriaSpec = field(default_factory=CriteriaSpec)
    # Development samples are drawn from here; None uses casemix
    source: CaseMix | None = None
    instability_sample: int = 2000
    curves_emitted: int = 200
    variant: str = "base"
    threads: int = 1
    # Directory for per-iteration model JSON; None keeps nothing
    store_models: str | None = None

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1")
        if not self.n_values:
            raise ConfigurationError("at least one development sample size is needed")
        if not self.strategies:
            raise ConfigurationError("at least one strategy is needed")
        labels = [strategy.label for strategy in self.strategies]
        if len(set(labels)) != len(labels):
            raise ConfigurationError(f"strategy names must be unique, got {labels}")
        if any(not 0 < t < 1 for t in self.thresholds):
            raise ConfigurationError("thresholds must lie in (0, 1)")

    @property
    def development_source(self) -> CaseMix:
        return self.casemix if self.source is None else self.source

    @property
    def population_size(self) -> int:
        return self.casemix.n_rows


class SummaryRow(Struct, frozen=True):
    n: int
    variant: str
    strategy: str
    threshold: float | None
    subgroup: str
    metric: str
    mean: float | None
    p2_5: float | None
    p97_5: float | None
    n_draws: int
    n_missing: int
    # One entry per configured criterion, None where it does not apply
    assurance: list[float | None] = field(default_factory=list)


class MinimalN(Struct, frozen=True):
    """Smallest configured n meeting every criterion, or None."""

    variant: str
    strategy: str
    threshold: float | None
    n: int | None


class SummaryReport(Struct):
    """Posterior summaries of every metric plus assurance probabilities."""

    rows: list[SummaryRow]
    criteria: list[Criterion] = field(default_factory=list)
    master_seed: int = 0
    iterations: int = 0
    warnings: list[str] = field(default_factory=list)
    minimal_n: list[MinimalN] = field(default_factory=list)

    def row(
        self,
        metric: str,
        strategy: str | None = None,
        n: int | None = None,
        threshold: float | None = None,
        subgroup: str = "overall",
        variant: str | None = None,
    ) -> SummaryRow:
        """Single row lookup; raises KeyError when none or several match."""
        found = [
            row
            for row in self.rows
            if row.metric == metric
            and row.subgroup == subgroup
            and (strategy is None or row.strategy == strategy)
            and (n is None or row.n == n)
            and (variant is None or row.variant == variant)
            and (threshold is None or row.threshold is None or math.isclose(row.threshold, threshold))
        ]
        if len(found) != 1:
            raise KeyError(f"{len(found)} summary rows match metric '{metric}'")
        return found[0]
