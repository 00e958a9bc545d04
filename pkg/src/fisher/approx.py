"""
Approximate scenario runs: every coefficient draw stands in for one fitted
model and is scored with the same metrics, summaries and instability
outputs as the full simulation.
"""

import time
from typing import Literal, Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from msgspec import Struct, structs
from scipy.special import expit

from ..config import ConfigurationError, SamplanError, logger
from ..devstrat import McmcConfig, PriorSpec
from ..engine import CriteriaSpec, Criterion, DRAW_COLUMNS, ScenarioConfig, ScenarioResult
from ..engine.runner import (
    CHUNKS_PER_WORKER,
    IterationOutcome,
    StrategyOutcome,
    common_grid,
    draw_rows,
    instability_block,
    select_tracked,
    subgroup_labels,
)
from ..engine.instability import InstabilityBlock, emit_instability
from ..engine.summary import individual_summary, summarize
from ..metrics import ReferenceMetrics, calibration_curve, evaluate_model, reference_metrics
from ..popgen import CaseMix, TargetPopulation, build_population, draw_sample
from ..seeding import child_seed
from .information import unit_information
from .onesample import CoefficientDraws, bayes_onesample, draw_mvn_models

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


RISK_CLAMP = 1e-10

Approximation = Literal["mvn", "bayes_ridge", "bayes_lasso"]


class ApproxContext(Struct):
    draws: CoefficientDraws
    population: TargetPopulation
    source: CaseMix
    thresholds: list[float]
    reference: ReferenceMetrics
    master_seed: int
    tracked: np.ndarray
    grid: np.ndarray | None
    curves_emitted: int
    label: str


def coefficient_risks(coefficients: np.ndarray, casemix: CaseMix, names: list[str]) -> np.ndarray:
    """Logistic risks of raw-scale coefficients (intercept first)."""
    rows = casemix.aligned_rows(names)
    risks = expit(coefficients[0] + rows @ coefficients[1:])
    return np.clip(risks, RISK_CLAMP, 1.0 - RISK_CLAMP)


def _score_draw(context: ApproxContext, k: int) -> IterationOutcome:
    """One coefficient draw against the population and a surrogate development sample."""
    draws = context.draws
    population = context.population
    coefficients = draws.matrix[k]
    n = draws.n_used
    sample = draw_sample(
        context.source,
        population.reference,
        n,
        child_seed(context.master_seed, n, k, role="surrogate"),
    )
    try:
        risks = coefficient_risks(coefficients, population.casemix, draws.column_names)
        dev_risks = coefficient_risks(coefficients, sample.casemix, draws.column_names)
        draw = evaluate_model(
            risks,
            population,
            context.thresholds,
            sample.outcome,
            dev_risks,
            reference=context.reference,
        )
    except (SamplanError, np.linalg.LinAlgError) as error:
        result = StrategyOutcome(strategy=context.label, failure=f"{type(error).__name__}: {error}")
        return IterationOutcome(
            iteration=k, reference_index=0, degenerate=sample.degenerate, strategies=[result]
        )

    curve = None
    if context.grid is not None and k < context.curves_emitted:
        try:
            curve = calibration_curve(risks, population.outcome, grid=context.grid).observed
        except SamplanError:
            curve = None
    result = StrategyOutcome(
        strategy=context.label,
        draw=draw,
        tracked_risks=risks[context.tracked],
        curve=curve,
    )
    return IterationOutcome(iteration=k, reference_index=0, degenerate=sample.degenerate, strategies=[result])


def _score_chunk(context: ApproxContext, indices: np.ndarray) -> list[IterationOutcome]:
    return [_score_draw(context, int(k)) for k in indices]


def _approximate(
    draws: CoefficientDraws,
    population: TargetPopulation,
    thresholds: Sequence[float],
    master_seed: int,
    label: str,
    variant: str,
    source: CaseMix | None,
    instability_sample: int,
    curves_emitted: int,
    threads: int,
) -> tuple[list[tuple], InstabilityBlock]:
    source = source or population.casemix
    if draws.n_used > source.n_rows:
        raise ConfigurationError(f"Sample size {draws.n_used} exceeds the {source.n_rows} source rows")
    tracked = select_tracked(master_seed, population, instability_sample)
    context = ApproxContext(
        draws=draws,
        population=population,
        source=source,
        thresholds=list(thresholds),
        reference=reference_metrics(population, thresholds),
        master_seed=master_seed,
        tracked=tracked,
        grid=common_grid(population),
        curves_emitted=curves_emitted,
        label=label,
    )
    threads = max(1, threads)
    chunks = np.array_split(np.arange(draws.n_draws), min(draws.n_draws, threads * CHUNKS_PER_WORKER))
    batches = Parallel(n_jobs=threads)(delayed(_score_chunk)(context, chunk) for chunk in chunks)
    outcomes = sorted((item for batch in batches for item in batch), key=lambda o: o.iteration)

    rows = draw_rows(draws.n_used, variant, [label], thresholds, outcomes, subgroup_labels(population))
    results = [outcome.strategies[0] for outcome in outcomes]
    truth = population.true_risk[tracked]
    block = instability_block(draws.n_used, variant, label, results, tracked, truth, context.grid)
    return rows, block


def _as_criteria(criteria: CriteriaSpec | Sequence[Criterion] | None) -> CriteriaSpec:
    if isinstance(criteria, CriteriaSpec):
        return criteria
    return CriteriaSpec(criteria=list(criteria or []))


def _result(
    rows: list[tuple],
    blocks: list[InstabilityBlock],
    thresholds: Sequence[float],
    criteria: CriteriaSpec,
    master_seed: int,
    iterations: int,
    curves_emitted: int,
    warnings: list[str],
    timings: dict[str, float],
) -> ScenarioResult:
    frame = pd.DataFrame.from_records(rows, columns=DRAW_COLUMNS)
    instability = emit_instability(blocks, thresholds, curves_emitted)
    summary = summarize(
        frame,
        criteria,
        master_seed=master_seed,
        iterations=iterations,
        extra_rows=individual_summary(instability.uncertainty, criteria),
    )
    summary.warnings = list(dict.fromkeys(warnings + summary.warnings))
    return ScenarioResult(
        draws=frame,
        summary=summary,
        instability=instability,
        selections=np.zeros(iterations, dtype=np.int64),
        warnings=summary.warnings,
        timings=timings,
    )


def approx_scenario(
    draws: CoefficientDraws,
    population: TargetPopulation,
    thresholds: Sequence[float],
    criteria: CriteriaSpec | Sequence[Criterion] | None = None,
    master_seed: int = 0,
    label: str | None = None,
    variant: str = "base",
    source: CaseMix | None = None,
    instability_sample: int = 2000,
    curves_emitted: int = 200,
    threads: int = 1,
) -> ScenarioResult:
    """Score every coefficient draw as a fitted model and summarise."""
    started = time.perf_counter()
    label = label or draws.provenance
    rows, block = _approximate(
        draws,
        population,
        thresholds,
        master_seed,
        label,
        variant,
        source,
        instability_sample,
        curves_emitted,
        threads,
    )
    return _result(
        rows,
        [block],
        thresholds,
        _as_criteria(criteria),
        master_seed,
        draws.n_draws,
        curves_emitted,
        list(draws.warnings),
        {"total": time.perf_counter() - started},
    )


def fisher_scenario(
    config: ScenarioConfig,
    approximation: Approximation = "mvn",
    mcmc: McmcConfig | None = None,
) -> tuple[ScenarioResult, dict[int, CoefficientDraws]]:
    """Approximate run over every configured n with one reference model.

    The target population is built with the same seed as the full
    simulation, so both paths score against identical outcomes.
    """
    if approximation not in ("mvn", "bayes_ridge", "bayes_lasso"):
        raise ConfigurationError(f"Unknown approximation '{approximation}'")
    if config.reference.is_mixture:
        raise ConfigurationError("Approximations need a single reference model, not a mixture")

    started = time.perf_counter()
    timings: dict[str, float] = {}
    model = config.reference.models[0]
    population = build_population(
        model, config.casemix, child_seed(config.master_seed, 0, role="population")
    )
    info = unit_information(config.casemix, model)
    timings["setup"] = time.perf_counter() - started

    warnings = list(population.warnings)
    if config.iterations < 1000:
        warnings.append(f"{config.iterations} iterations; at least 1000 are recommended")
        logger.warning("Few iterations", iterations=config.iterations)

    rows: list[tuple] = []
    blocks: list[InstabilityBlock] = []
    coefficient_draws: dict[int, CoefficientDraws] = {}
    for n in config.n_values:
        stage = time.perf_counter()
        seed = child_seed(config.master_seed, n, role="draws")
        if approximation == "mvn":
            draws = draw_mvn_models(model, info, n, config.iterations, seed)
        else:
            chain = structs.replace(mcmc or McmcConfig(burn_in=10_000), draws=config.iterations)
            prior = PriorSpec(family=approximation.removeprefix("bayes_"))
            draws = bayes_onesample(model, info, n, prior, chain, seed)
        coefficient_draws[n] = draws
        warnings.extend(draws.warnings)

        n_rows, block = _approximate(
            draws,
            population,
            config.thresholds,
            config.master_seed,
            approximation,
            config.variant,
            config.source,
            config.instability_sample,
            config.curves_emitted,
            config.threads,
        )
        rows.extend(n_rows)
        blocks.append(block)
        timings[f"n={n}"] = time.perf_counter() - stage
        logger.info(
            "Approximation finished", approximation=approximation, n=n, seconds=round(timings[f"n={n}"], 2)
        )

    timings["total"] = time.perf_counter() - started
    result = _result(
        rows,
        blocks,
        config.thresholds,
        config.criteria,
        config.master_seed,
        config.iterations,
        config.curves_emitted,
        warnings,
        timings,
    )
    return result, coefficient_draws
