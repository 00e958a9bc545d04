"""
Turn a validated scenario document into engine inputs: case-mix, reference
models and run settings.
"""

from pathlib import Path

import msgspec
import numpy as np
from msgspec import Struct

from ..config import ConfigurationError, ScenarioFile, config as settings, logger
from ..config.scenario import DataSection, ReferenceSection
from ..devstrat import McmcConfig, StrategyConfig
from ..popgen import (
    BernoulliMarginal,
    CaseMix,
    ColumnSpec,
    EmpiricalMarginal,
    MarginalSpec,
    NormalMarginal,
    ReferenceModel,
    append_noise,
    calibrate_reference,
    ingest_casemix,
    split_casemix,
    synthesize_casemix,
)
from ..seeding import child_seed
from .schemas import CriteriaSpec, Criterion, ReferenceMixture, ScenarioConfig
from .sweep import NoiseVariant

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


class PreparedScenario(Struct):
    """Engine inputs built from one scenario document."""

    config: ScenarioConfig
    variants: list[NoiseVariant]
    approximation: str
    mcmc: McmcConfig
    fisher_mcmc: McmcConfig


def _marginal(model) -> NormalMarginal | BernoulliMarginal | EmpiricalMarginal:
    if model.type == "normal":
        return NormalMarginal(mean=model.mean, sd=model.sd)
    if model.type == "bernoulli":
        return BernoulliMarginal(prob=model.prob)
    return EmpiricalMarginal(values=tuple(model.values), kind=model.kind)


def _with_subgroup(casemix: CaseMix, column: str) -> CaseMix:
    if column not in casemix.names:
        raise ConfigurationError(f"data.subgroup: '{column}' is not a case-mix column")
    values = casemix.rows[:, casemix.names.index(column)]
    labels = np.array([f"{value:g}" for value in values], dtype=object)
    return CaseMix(columns=casemix.columns, rows=casemix.rows, subgroup=column, groups=labels)


def build_casemix(data: DataSection, base_dir: Path) -> tuple[CaseMix, CaseMix | None]:
    """(target case-mix, disjoint development source or None when split is off)."""
    if data.path is not None:
        schema = [ColumnSpec(**column.model_dump()) for column in data.columns]
        casemix = ingest_casemix(base_dir / data.path, schema, subgroup=data.subgroup)
        casemix = append_noise(casemix, data.noise_extra, child_seed(data.synthesis_seed, role="noise"))
    else:
        spec = MarginalSpec(
            columns={name: _marginal(model) for name, model in data.marginals.items()},
            noise_extra=data.noise_extra,
        )
        extra = (data.split_source_rows or data.population_size) if data.split else 0
        rows = data.population_size + extra
        casemix = synthesize_casemix(spec, rows, data.synthesis_seed)
        if data.subgroup is not None:
            casemix = _with_subgroup(casemix, data.subgroup)
        logger.info("Case-mix synthesised", rows=casemix.n_rows, columns=casemix.n_columns)

    if casemix.n_rows < settings.population_warning_rows:
        logger.warning("Small case-mix", rows=casemix.n_rows, recommended=settings.population_warning_rows)

    if not data.split:
        logger.info("Development samples drawn from the target population", rows=casemix.n_rows)
        return casemix, None
    if data.split_source_rows is not None:
        target_rows = casemix.n_rows - data.split_source_rows
    elif casemix.n_rows > data.population_size:
        target_rows = data.population_size
    else:
        target_rows = casemix.n_rows // 2
        logger.warning(
            "Case-mix too small to reserve the target population; halving it",
            rows=casemix.n_rows,
            population_size=data.population_size,
        )
    seed = child_seed(data.synthesis_seed, role="split")
    return split_casemix(casemix, target_rows, seed)


def _weights(section: ReferenceSection, casemix: CaseMix) -> tuple[list[str], list[float]]:
    unknown = [name for name in section.weights if name not in casemix.names]
    if unknown:
        raise ConfigurationError(f"reference.weights: unknown columns {unknown}")
    names, weights = [], []
    unweighted = []
    for name in casemix.names:
        if name in section.weights:
            weights.append(float(section.weights[name]))
        elif name.startswith("noise_"):
            weights.append(0.0)
        else:
            unweighted.append(name)
        names.append(name)
    if unweighted:
        raise ConfigurationError(f"reference.weights: no weight for columns {unweighted}")
    return names, weights


def build_reference(section: ReferenceSection, casemix: CaseMix, base_dir: Path) -> ReferenceMixture:
    """Fixed, loaded or calibrated reference model(s)."""
    if section.model_path is not None and section.mixture is None:
        model = msgspec.json.decode((base_dir / section.model_path).read_bytes(), type=ReferenceModel)
        return ReferenceMixture.single(model)

    names, weights = _weights(section, casemix)

    def make(target_cstat, target_prevalence, intercept, scale) -> ReferenceModel:
        if intercept is not None and scale is not None:
            return ReferenceModel(intercept=intercept, scale=scale, weights=weights, column_names=names)
        return calibrate_reference(
            weights,
            casemix,
            target_cstat,
            target_prevalence,
            tol=section.tol,
            max_iter=section.max_iter,
            column_names=names,
        )

    if section.mixture is None:
        return ReferenceMixture.single(
            make(section.target_cstat, section.target_prevalence, section.intercept, section.scale)
        )
    models = [
        make(member.target_cstat, member.target_prevalence, member.intercept, member.scale)
        for member in section.mixture
    ]
    return ReferenceMixture(models=models, probabilities=[m.probability for m in section.mixture])


def prepare_scenario(
    scenario: ScenarioFile,
    base_dir: str | Path = ".",
    threads: int | None = None,
    output_dir: str | Path | None = None,
) -> PreparedScenario:
    """Load data, build the reference and assemble the run settings."""
    base_dir = Path(base_dir)
    casemix, source = build_casemix(scenario.data, base_dir)
    reference = build_reference(scenario.reference, casemix, base_dir)

    mcmc_section = scenario.mcmc
    mcmc = McmcConfig(
        burn_in=mcmc_section.burn_in,
        thin=mcmc_section.thin,
        draws=mcmc_section.draws,
        initial_scale=mcmc_section.initial_scale,
        adapt_window=mcmc_section.adapt_window,
        target_acceptance=mcmc_section.target_acceptance,
    )
    fisher_mcmc = msgspec.structs.replace(mcmc, burn_in=mcmc_section.fisher_burn_in)
    strategies = [
        StrategyConfig(
            **strategy.model_dump(),
            mcmc=mcmc if strategy.kind.startswith("bayes") else None,
        )
        for strategy in scenario.strategies
    ]
    criteria = CriteriaSpec(
        criteria=[Criterion(**criterion.model_dump()) for criterion in scenario.criteria]
    )
    section = scenario.scenario
    output_dir = output_dir or scenario.outputs.directory or settings.output_dir
    run = ScenarioConfig(
        casemix=casemix,
        source=source,
        reference=reference,
        strategies=strategies,
        n_values=list(section.n_values),
        iterations=section.iterations,
        thresholds=list(section.thresholds),
        master_seed=section.master_seed,
        criteria=criteria,
        instability_sample=section.instability_sample,
        curves_emitted=section.curves_emitted,
        threads=threads or settings.samplan_threads,
        store_models=str(Path(output_dir) / "models") if scenario.outputs.store_models else None,
    )
    variants = [NoiseVariant(name=v.name, noise_columns=v.noise_columns) for v in section.variants]
    return PreparedScenario(
        config=run,
        variants=variants,
        approximation=section.approximation,
        mcmc=mcmc,
        fisher_mcmc=fisher_mcmc,
    )
