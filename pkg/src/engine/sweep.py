"""
Sample-size sweeps over configured n values and noise-augmentation variants.
"""

from typing import Sequence

import pandas as pd
from msgspec import Struct, field, structs

from ..config import logger
from ..popgen import append_noise, noise_columns
from ..seeding import child_seed
from .instability import InstabilityData
from .runner import ScenarioResult, run_scenario
from .schemas import MinimalN, ReferenceMixture, ScenarioConfig, SummaryReport
from .summary import minimal_n

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


class NoiseVariant(Struct, frozen=True):
    """Scenario variant with extra pure-noise candidate predictors."""

    name: str
    noise_columns: int = 0


class SweepResult(Struct):
    results: dict[str, ScenarioResult]
    summary: SummaryReport
    verdicts: list[MinimalN] = field(default_factory=list)

    def combined(self) -> ScenarioResult:
        """All variants stacked into one result with the shared summary."""
        parts = list(self.results.values())
        if len(parts) == 1:
            only = parts[0]
            return structs.replace(only, summary=self.summary)
        return ScenarioResult(
            draws=pd.concat([part.draws for part in parts], ignore_index=True),
            summary=self.summary,
            instability=InstabilityData(
                predictions=pd.concat([p.instability.predictions for p in parts], ignore_index=True),
                curves=pd.concat([p.instability.curves for p in parts], ignore_index=True),
                uncertainty=pd.concat([p.instability.uncertainty for p in parts], ignore_index=True),
            ),
            selections=parts[0].selections,
            warnings=self.summary.warnings,
            timings={
                f"{name}:{stage}": seconds
                for name, part in self.results.items()
                for stage, seconds in part.timings.items()
            },
        )


def apply_variant(config: ScenarioConfig, variant: NoiseVariant, position: int) -> ScenarioConfig:
    """Config with noise columns appended to the case-mix and zero-weighted in every reference."""
    if variant.noise_columns == 0:
        return structs.replace(config, variant=variant.name)
    names = noise_columns(variant.noise_columns)
    casemix = append_noise(
        config.casemix,
        variant.noise_columns,
        child_seed(config.master_seed, position, 0, role="noise"),
    )
    source = None
    if config.source is not None:
        source = append_noise(
            config.source,
            variant.noise_columns,
            child_seed(config.master_seed, position, 1, role="noise"),
        )
    reference = ReferenceMixture(
        models=[model.with_zero_weights(names) for model in config.reference.models],
        probabilities=list(config.reference.probabilities),
    )
    return structs.replace(
        config, casemix=casemix, source=source, reference=reference, variant=variant.name
    )


def sweep(config: ScenarioConfig, variants: Sequence[NoiseVariant] | None = None) -> SweepResult:
    """One run per variant over all configured n, then the minimal-n verdict."""
    variants = list(variants or [NoiseVariant(name=config.variant)])
    results = {}
    for position, variant in enumerate(variants):
        results[variant.name] = run_scenario(apply_variant(config, variant, position))

    reports = [result.summary for result in results.values()]
    summary = SummaryReport(
        rows=[row for report in reports for row in report.rows],
        criteria=list(config.criteria.criteria),
        master_seed=config.master_seed,
        iterations=config.iterations,
        warnings=list(dict.fromkeys(message for report in reports for message in report.warnings)),
    )
    summary.minimal_n = minimal_n(summary)
    for verdict in summary.minimal_n:
        logger.info(
            "Minimal sample size",
            variant=verdict.variant,
            strategy=verdict.strategy,
            threshold=verdict.threshold,
            n=verdict.n if verdict.n is not None else "none",
        )
    return SweepResult(results=results, summary=summary, verdicts=summary.minimal_n)
