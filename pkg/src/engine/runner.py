"""
Simulation loop: development sample, fit, evaluate, repeated over
iterations and development sample sizes.
"""

import time
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from msgspec import Struct, field

from ..config import ConfigurationError, SamplanError, logger
from ..devstrat import FittedModel, dump_model, fit_strategy, predict_risks
from ..metrics import (
    BASE_METRICS,
    METRIC_NAMES,
    MetricDraw,
    ReferenceMetrics,
    calibration_curve,
    curve_grid,
    evaluate_model,
    reference_metrics,
)
from ..popgen import TargetPopulation, build_population, draw_sample
from ..seeding import child_seed, stream
from .instability import InstabilityBlock, InstabilityData, emit_instability
from .schemas import ScenarioConfig, SummaryReport
from .summary import individual_summary, summarize

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


DRAW_COLUMNS = [
    "n",
    "variant",
    "strategy",
    "threshold",
    "subgroup",
    "iteration",
    "reference_index",
    "metric",
    "value",
]
OVERALL = "overall"
CHUNKS_PER_WORKER = 4


class StrategyOutcome(Struct):
    strategy: str
    draw: MetricDraw | None = None
    tracked_risks: np.ndarray | None = None
    curve: np.ndarray | None = None
    failure: str | None = None


class IterationOutcome(Struct):
    iteration: int
    reference_index: int
    degenerate: bool
    strategies: list[StrategyOutcome]


class RunContext(Struct):
    """Read-only state shared by every iteration of one run."""

    config: ScenarioConfig
    populations: dict[int, TargetPopulation]
    references: dict[int, ReferenceMetrics]
    selections: np.ndarray
    tracked: np.ndarray
    grid: np.ndarray | None


class ScenarioResult(Struct):
    """Draws, summaries and instability outputs of one run."""

    draws: pd.DataFrame
    summary: SummaryReport
    instability: InstabilityData
    selections: np.ndarray
    warnings: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)


def select_references(config: ScenarioConfig) -> np.ndarray:
    """Reference-model index for every iteration."""
    mixture = config.reference
    if not mixture.is_mixture:
        return np.zeros(config.iterations, dtype=np.int64)
    probabilities = np.asarray(mixture.probabilities, dtype=float)
    probabilities = probabilities / probabilities.sum()
    return np.array(
        [
            stream(config.master_seed, k, role="mixture").choice(len(mixture.models), p=probabilities)
            for k in range(config.iterations)
        ],
        dtype=np.int64,
    )


def build_populations(config: ScenarioConfig, indices: np.ndarray) -> dict[int, TargetPopulation]:
    """Target population per selected reference model on the shared case-mix."""
    populations = {}
    for index in sorted({int(i) for i in indices}):
        model = config.reference.models[index]
        seed = child_seed(config.master_seed, index, role="population")
        populations[index] = build_population(model, config.casemix, seed)
    return populations


def select_tracked(master_seed: int, population: TargetPopulation, count: int) -> np.ndarray:
    """Sorted row indices of the individuals followed across draws."""
    count = min(count, population.n_rows)
    rows = stream(master_seed, role="tracked").choice(population.n_rows, size=count, replace=False)
    return np.sort(rows)


def common_grid(population: TargetPopulation) -> np.ndarray | None:
    try:
        return curve_grid(population.true_risk)
    except SamplanError:
        return None


def _fit_seed(config: ScenarioConfig, n: int, iteration: int, position: int) -> int:
    kind = config.strategies[position].kind
    role = "mcmc" if kind.startswith("bayes") else "fit"
    return child_seed(config.master_seed, n, iteration, position, role=role)


def _store(model: FittedModel, config: ScenarioConfig, n: int, label: str, iteration: int) -> None:
    dump_model(model, Path(config.store_models) / str(n) / label / f"{iteration}.json")


def run_iteration(context: RunContext, n: int, iteration: int) -> IterationOutcome:
    """Steps for one iteration: draw a development sample, fit every strategy, evaluate."""
    config = context.config
    index = int(context.selections[iteration])
    population = context.populations[index]
    model = config.reference.models[index]
    sample = draw_sample(
        config.development_source,
        model,
        n,
        child_seed(config.master_seed, n, iteration, role="sample"),
    )

    outcomes = []
    mle_cache: dict[tuple, FittedModel] = {}
    for position, strategy in enumerate(config.strategies):
        label = strategy.label
        try:
            cache_key = (strategy.max_iter, strategy.tol)
            mle = mle_cache.get(cache_key) if strategy.kind in ("mle", "shrunk") else None
            fitted = fit_strategy(strategy, sample, _fit_seed(config, n, iteration, position), mle=mle)
            if strategy.kind == "mle":
                mle_cache[cache_key] = fitted
            risks = predict_risks(fitted, population.casemix)
            dev_risks = predict_risks(fitted, sample.casemix)
            draw = evaluate_model(
                risks,
                population,
                config.thresholds,
                sample.outcome,
                dev_risks,
                reference=context.references[index],
            )
        except (SamplanError, np.linalg.LinAlgError) as error:
            logger.debug("Strategy failed", strategy=label, n=n, iteration=iteration, error=str(error))
            outcomes.append(StrategyOutcome(strategy=label, failure=f"{type(error).__name__}: {error}"))
            continue

        if config.store_models:
            _store(fitted, config, n, label, iteration)

        curve = None
        if context.grid is not None and iteration < config.curves_emitted:
            try:
                curve = calibration_curve(risks, population.outcome, grid=context.grid).observed
            except SamplanError:
                curve = None

        outcomes.append(
            StrategyOutcome(
                strategy=label,
                draw=draw,
                tracked_risks=risks[context.tracked],
                curve=curve,
            )
        )

    return IterationOutcome(
        iteration=iteration,
        reference_index=index,
        degenerate=sample.degenerate,
        strategies=outcomes,
    )


def _run_chunk(context: RunContext, n: int, iterations: np.ndarray) -> list[IterationOutcome]:
    return [run_iteration(context, n, int(k)) for k in iterations]


def draw_rows(
    n: int,
    variant: str,
    strategies: Sequence[str],
    thresholds: Sequence[float],
    outcomes: list[IterationOutcome],
    labels: list[str],
) -> list[tuple]:
    """Long-format rows ordered by strategy, threshold, subgroup, iteration, metric."""
    thresholds = list(thresholds) or [None]
    rows = []
    for position, label in enumerate(strategies):
        for t_index, threshold in enumerate(thresholds):
            metric_index = None if threshold is None else t_index
            names = BASE_METRICS if threshold is None else METRIC_NAMES
            for subgroup in [OVERALL, *labels]:
                for outcome in outcomes:
                    result = outcome.strategies[position]
                    draw = result.draw
                    if draw is not None and subgroup != OVERALL:
                        draw = (draw.subgroup_breakdowns or {}).get(subgroup)
                    values = {} if draw is None else draw.values(metric_index)
                    for metric in names:
                        rows.append(
                            (
                                n,
                                variant,
                                label,
                                threshold,
                                subgroup,
                                outcome.iteration,
                                outcome.reference_index,
                                metric,
                                values.get(metric, float("nan")),
                            )
                        )
    return rows


def instability_block(
    n: int,
    variant: str,
    label: str,
    results: list[StrategyOutcome],
    tracked: np.ndarray,
    truth: np.ndarray,
    grid: np.ndarray | None,
) -> InstabilityBlock:
    """Tracked estimates and curves of one strategy, one row per iteration."""
    estimates = np.full((len(results), tracked.shape[0]), np.nan)
    curves = []
    for k, result in enumerate(results):
        if result.tracked_risks is not None:
            estimates[k] = result.tracked_risks
        if result.curve is not None:
            curves.append((k, result.curve))
    failures = sum(result.failure is not None for result in results)
    if failures:
        logger.info("Strategy failures", n=n, strategy=label, failures=failures)
    return InstabilityBlock(
        n=n,
        variant=variant,
        strategy=label,
        individual_ids=tracked,
        true_risks=truth,
        estimates=estimates,
        grid=grid,
        curves=curves,
    )


def subgroup_labels(population: TargetPopulation) -> list[str]:
    groups = population.casemix.groups
    if groups is None:
        return []
    return sorted({str(label) for label in groups})


def run_scenario(config: ScenarioConfig) -> ScenarioResult:
    """Repeat sample-fit-evaluate for every configured n and strategy."""
    started = time.perf_counter()
    timings: dict[str, float] = {}
    threads = max(1, config.threads)

    source_rows = config.development_source.n_rows
    too_large = [n for n in config.n_values if n > source_rows]
    if too_large:
        raise ConfigurationError(f"Sample sizes {too_large} exceed the {source_rows} source rows")

    warnings: list[str] = []
    if config.iterations < 1000:
        warnings.append(f"{config.iterations} iterations; at least 1000 are recommended")
        logger.warning("Few iterations", iterations=config.iterations)

    selections = select_references(config)
    populations = build_populations(config, selections)
    for population in populations.values():
        warnings.extend(population.warnings)
    references = {index: reference_metrics(pop, config.thresholds) for index, pop in populations.items()}

    first = populations[int(selections[0])]
    tracked = select_tracked(config.master_seed, first, config.instability_sample)
    grid = common_grid(first)
    timings["setup"] = time.perf_counter() - started

    context = RunContext(
        config=config,
        populations=populations,
        references=references,
        selections=selections,
        tracked=tracked,
        grid=grid,
    )
    labels = subgroup_labels(first)
    truth = np.stack([populations[int(i)].true_risk[tracked] for i in selections])

    logger.info(
        "Scenario started",
        variant=config.variant,
        n_values=config.n_values,
        strategies=[s.label for s in config.strategies],
        iterations=config.iterations,
        threads=threads,
    )

    rows: list[tuple] = []
    blocks: list[InstabilityBlock] = []
    chunks = np.array_split(
        np.arange(config.iterations), min(config.iterations, threads * CHUNKS_PER_WORKER)
    )
    for n in config.n_values:
        stage = time.perf_counter()
        batches = Parallel(n_jobs=threads)(delayed(_run_chunk)(context, n, chunk) for chunk in chunks)
        outcomes = sorted((item for batch in batches for item in batch), key=lambda o: o.iteration)

        degenerate = sum(outcome.degenerate for outcome in outcomes)
        if degenerate:
            logger.info("Degenerate development samples", n=n, count=degenerate)
        rows.extend(
            draw_rows(
                n, config.variant, [s.label for s in config.strategies], config.thresholds, outcomes, labels
            )
        )

        for position, strategy in enumerate(config.strategies):
            results = [outcome.strategies[position] for outcome in outcomes]
            blocks.append(instability_block(n, config.variant, strategy.label, results, tracked, truth, grid))
        timings[f"n={n}"] = time.perf_counter() - stage
        logger.info("Sample size finished", n=n, seconds=round(timings[f"n={n}"], 2))

    draws = pd.DataFrame.from_records(rows, columns=DRAW_COLUMNS)
    instability = emit_instability(blocks, config.thresholds, config.curves_emitted)
    summary = summarize(
        draws,
        config.criteria,
        master_seed=config.master_seed,
        iterations=config.iterations,
        extra_rows=individual_summary(instability.uncertainty, config.criteria),
    )
    summary.warnings = warnings + summary.warnings
    timings["total"] = time.perf_counter() - started
    logger.info("Scenario finished", variant=config.variant, seconds=round(timings["total"], 2))

    return ScenarioResult(
        draws=draws,
        summary=summary,
        instability=instability,
        selections=selections,
        warnings=summary.warnings,
        timings=timings,
    )
