"""
Command line for simulation-based sample size planning of binary-outcome
prediction models.
"""

import time
from pathlib import Path
from typing import Callable, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from src import __version__
from src.config import (
    ConfigurationError,
    SamplanError,
    ScenarioFile,
    SchemaError,
    config as settings,
    configure_logging,
    load_scenario_file,
    logger,
)
from src.engine import (
    ScenarioResult,
    SummaryReport,
    build_casemix,
    build_reference,
    closed_form_sample_size,
    prepare_scenario,
    run_scenario,
    sweep as run_sweep,
    write_csv,
    write_json,
    write_manifest,
    write_reference,
    write_scenario_outputs,
    write_verdict,
)
from src.fisher import fisher_scenario
from src.popgen import build_population
from src.seeding import child_seed

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


EXIT_CONFIG = 2
EXIT_WARNINGS = 3
EXIT_RUNTIME = 4
APPROXIMATIONS = ("mvn", "bayes_ridge", "bayes_lasso")
CONSOLE_METRICS = ("c_stat", "cal_slope", "mape", "rvsi_model")

app = typer.Typer(
    help="Sample size planning for clinical prediction models by simulation",
    add_completion=False,
)
console = Console()


class Escalated(Exception):
    """Scenario-level warnings under --strict."""


ConfigOption = typer.Option(..., "--config", "-c", help="Scenario JSON document")
SampleSizes = typer.Option(None, "--n", help="Development sample size; repeat for several")
Iterations = typer.Option(None, "--iterations", help="Iterations per sample size")
Seed = typer.Option(None, "--seed", help="Master seed")
Threads = typer.Option(None, "--threads", help="Worker processes (default: SAMPLAN_THREADS)")
Strict = typer.Option(False, "--strict", help="Exit with code 3 when the run reports warnings")
Output = typer.Option(None, "--output", "-o", help="Run directory")


def load_config(
    path: Path,
    n: Optional[list[int]] = None,
    iterations: Optional[int] = None,
    seed: Optional[int] = None,
) -> ScenarioFile:
    """Scenario document with command-line overrides applied and revalidated."""
    scenario = load_scenario_file(path)
    overrides = {}
    if n:
        overrides["n_values"] = list(n)
    if iterations is not None:
        overrides["iterations"] = iterations
    if seed is not None:
        overrides["master_seed"] = seed
    if not overrides:
        return scenario
    document = scenario.model_dump()
    document["scenario"].update(overrides)
    try:
        return ScenarioFile.model_validate(document)
    except ValidationError as error:
        details = "; ".join(
            f"{'.'.join(str(part) for part in item['loc'])}: {item['msg']}" for item in error.errors()
        )
        raise ConfigurationError(f"Invalid command-line override: {details}") from error


def output_directory(scenario: ScenarioFile, output: Optional[Path], command: str) -> Path:
    if output is not None:
        return output
    return Path(scenario.outputs.directory or Path(settings.output_dir) / command)


def seeds_of(scenario: ScenarioFile) -> dict[str, int]:
    return {
        "master_seed": scenario.scenario.master_seed,
        "synthesis_seed": scenario.data.synthesis_seed,
        "calibration_seed": settings.calibration_seed,
    }


def show_summary(report: SummaryReport) -> None:
    """Headline metrics per (variant, n, strategy) on the console."""
    table = Table(title="Summary (mean and 95% range)")
    for column in ("variant", "n", "strategy", *CONSOLE_METRICS):
        table.add_column(column, style="cyan" if column in ("variant", "n", "strategy") else None)
    seen = []
    for row in report.rows:
        key = (row.variant, row.n, row.strategy)
        if row.subgroup == "overall" and key not in seen:
            seen.append(key)
    for variant, n, strategy in seen:
        cells = []
        for metric in CONSOLE_METRICS:
            # first threshold row
            row = next(
                (
                    r
                    for r in report.rows
                    if r.metric == metric
                    and r.strategy == strategy
                    and r.n == n
                    and r.variant == variant
                    and r.subgroup == "overall"
                ),
                None,
            )
            if row is None or row.mean is None:
                cells.append("NA")
            else:
                cells.append(f"{row.mean:.3f} ({row.p2_5:.3f} to {row.p97_5:.3f})")
        table.add_row(variant, str(n), strategy, *cells)
    console.print(table)
    for verdict in report.minimal_n:
        found = "none" if verdict.n is None else str(verdict.n)
        console.print(
            f"[bold]Minimal n[/bold] {verdict.variant}/{verdict.strategy}"
            f"{'' if verdict.threshold is None else f' @ {verdict.threshold:g}'}: {found}"
        )


def finish(
    result: ScenarioResult,
    directory: Path,
    command: str,
    scenario: ScenarioFile,
    threads: int,
    started: float,
    strict: bool,
    closed_form=None,
    verdict: bool = False,
) -> None:
    """Write the run directory, manifest last, and apply --strict."""
    echo = scenario.model_dump(mode="json")
    seeds = seeds_of(scenario)
    write_scenario_outputs(result, directory, command, echo, seeds, closed_form=closed_form)
    if verdict:
        write_verdict(directory, result.summary, closed_form)
    timings = dict(result.timings)
    timings["wall_clock"] = time.perf_counter() - started
    write_manifest(directory, command, __version__, echo, seeds, timings, threads=threads)
    show_summary(result.summary)
    for message in result.warnings:
        console.print(f"[yellow]warning:[/yellow] {message}")
    console.print(f"[bold green]Outputs written to[/bold green] {directory}")
    if strict and result.warnings:
        raise Escalated(f"{len(result.warnings)} warnings")


def guarded(action: Callable[[], None]) -> None:
    """Run a command body and map failures to exit codes."""
    try:
        action()
    except (ConfigurationError, SchemaError) as error:
        console.print(f"[bold red]Configuration error:[/bold red] {error}")
        raise typer.Exit(EXIT_CONFIG) from None
    except Escalated as error:
        console.print(f"[bold yellow]Warnings escalated by --strict:[/bold yellow] {error}")
        raise typer.Exit(EXIT_WARNINGS) from None
    except SamplanError as error:
        logger.error("Run failed", error=str(error), kind=type(error).__name__)
        console.print(f"[bold red]{type(error).__name__}:[/bold red] {error}")
        raise typer.Exit(EXIT_RUNTIME) from None


@app.command()
def calibrate(
    config_path: Path = ConfigOption,
    output: Optional[Path] = Output,
):
    """Calibrate the reference model and report closed-form starting sizes."""

    def body():
        started = time.perf_counter()
        scenario = load_config(config_path)
        directory = output_directory(scenario, output, "calibrate")
        directory.mkdir(parents=True, exist_ok=True)
        casemix, _ = build_casemix(scenario.data, config_path.parent)
        try:
            mixture = build_reference(scenario.reference, casemix, config_path.parent)
        except SamplanError as error:
            write_json(
                {
                    "converged": False,
                    "error": str(error),
                    "achieved_cstat": getattr(error, "achieved_cstat", None),
                    "achieved_prevalence": getattr(error, "achieved_prevalence", None),
                    "iterations": getattr(error, "iterations", None),
                },
                directory / "calibration.json",
            )
            raise
        write_reference(mixture, directory)

        model = mixture.models[0]
        population = build_population(
            model, casemix, child_seed(scenario.scenario.master_seed, 0, role="population")
        )
        try:
            closed_form = closed_form_sample_size(population)
        except ValueError as error:
            closed_form = None
            logger.warning("Closed-form size unavailable", error=str(error))
        else:
            write_json(closed_form, directory / "closed_form.json")
        echo = scenario.model_dump(mode="json")
        write_manifest(
            directory,
            "calibrate",
            __version__,
            echo,
            seeds_of(scenario),
            {"wall_clock": time.perf_counter() - started},
        )

        table = Table(title="Reference model")
        for column in ("index", "intercept", "scale", "c-statistic", "prevalence", "iterations"):
            table.add_column(column)
        for index, member in enumerate(mixture.models):
            summary = member.calibration
            table.add_row(
                str(index),
                f"{member.intercept:.6f}",
                f"{member.scale:.6f}",
                "-" if summary is None else f"{summary.achieved_cstat:.4f}",
                "-" if summary is None else f"{summary.achieved_prevalence:.4f}",
                "-" if summary is None else str(summary.iterations),
            )
        console.print(table)
        if closed_form is not None:
            console.print(
                f"[bold]Closed-form starting n:[/bold] {closed_form.recommended} "
                f"(shrinkage {closed_form.n_shrinkage}, optimism {closed_form.n_optimism}, "
                f"precision {closed_form.n_precision})"
            )

    guarded(body)


@app.command()
def simulate(
    config_path: Path = ConfigOption,
    n: Optional[list[int]] = SampleSizes,
    iterations: Optional[int] = Iterations,
    seed: Optional[int] = Seed,
    threads: Optional[int] = Threads,
    strict: bool = Strict,
    output: Optional[Path] = Output,
):
    """Full simulation: sample, fit every strategy, evaluate, summarise."""

    def body():
        started = time.perf_counter()
        scenario = load_config(config_path, n, iterations, seed)
        directory = output_directory(scenario, output, "simulate")
        prepared = prepare_scenario(scenario, config_path.parent, threads, directory)
        result = run_scenario(prepared.config)
        finish(result, directory, "simulate", scenario, prepared.config.threads, started, strict)

    guarded(body)


@app.command()
def fisher(
    config_path: Path = ConfigOption,
    approximation: Optional[str] = typer.Option(
        None, "--approximation", "-a", help="mvn, bayes_ridge or bayes_lasso"
    ),
    n: Optional[list[int]] = SampleSizes,
    iterations: Optional[int] = Iterations,
    seed: Optional[int] = Seed,
    threads: Optional[int] = Threads,
    strict: bool = Strict,
    output: Optional[Path] = Output,
):
    """Fast approximation from the unit Fisher information."""

    def body():
        started = time.perf_counter()
        if approximation is not None and approximation not in APPROXIMATIONS:
            raise ConfigurationError(
                f"Unknown approximation '{approximation}', expected one of {', '.join(APPROXIMATIONS)}"
            )
        scenario = load_config(config_path, n, iterations, seed)
        directory = output_directory(scenario, output, "fisher")
        prepared = prepare_scenario(scenario, config_path.parent, threads, directory)
        chosen = approximation or prepared.approximation
        result, draws = fisher_scenario(prepared.config, chosen, prepared.fisher_mcmc)
        for size, coefficients in draws.items():
            name = "coefficient_draws.csv" if len(draws) == 1 else f"coefficient_draws_{size}.csv"
            write_csv(coefficients.to_frame(), directory / name)
        finish(result, directory, "fisher", scenario, prepared.config.threads, started, strict)

    guarded(body)


@app.command()
def sweep(
    config_path: Path = ConfigOption,
    n: Optional[list[int]] = SampleSizes,
    iterations: Optional[int] = Iterations,
    seed: Optional[int] = Seed,
    threads: Optional[int] = Threads,
    strict: bool = Strict,
    output: Optional[Path] = Output,
):
    """Simulate every n and noise variant, then report the minimal n."""

    def body():
        started = time.perf_counter()
        scenario = load_config(config_path, n, iterations, seed)
        directory = output_directory(scenario, output, "sweep")
        prepared = prepare_scenario(scenario, config_path.parent, threads, directory)
        run = prepared.config
        outcome = run_sweep(run, prepared.variants or None)

        closed_form = None
        if not run.reference.is_mixture:
            population = build_population(
                run.reference.models[0],
                run.casemix,
                child_seed(run.master_seed, 0, role="population"),
            )
            try:
                closed_form = closed_form_sample_size(population)
            except ValueError as error:
                logger.warning("Closed-form size unavailable", error=str(error))
        finish(
            outcome.combined(),
            directory,
            "sweep",
            scenario,
            run.threads,
            started,
            strict,
            closed_form=closed_form,
            verdict=True,
        )

    guarded(body)


@app.command()
def version():
    """Show the version."""
    console.print(f"[bold cyan]samplan[/bold cyan] v{__version__}")


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING or ERROR"),
):
    """Simulation-based sample size planning for binary-outcome prediction models."""
    configure_logging(log_level)


if __name__ == "__main__":
    app()
