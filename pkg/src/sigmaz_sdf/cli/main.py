"""Command-line interface for the SDF simulator."""

from pathlib import Path
from typing import Optional

import pydantic
import structlog
import typer
from rich.console import Console

from sigmaz_sdf.analysis.fitting import fit_omega_eff
from sigmaz_sdf.analysis.reporting import report_generator
from sigmaz_sdf.config.constants import APP_DESCRIPTION, APP_VERSION, ExitCode
from sigmaz_sdf.config.settings import settings
from sigmaz_sdf.exceptions import (
    ConfigurationError,
    FitError,
    InputProcessingError,
    NumericalError,
    SequenceError,
    StorageError,
    SweepPointError,
    ValidationError,
)
from sigmaz_sdf.experiments.engine import SweepEngine
from sigmaz_sdf.experiments.runner import ExperimentRunner
from sigmaz_sdf.input.processor import ConfigLoader, TraceReader
from sigmaz_sdf.storage.file_storage import ResultStorage, RunManifest
from sigmaz_sdf.utils.logging import setup_logging
from sigmaz_sdf.utils.validators import quantity_validator

app = typer.Typer(help=f"sigmaz-sdf {APP_VERSION} - {APP_DESCRIPTION}")
console = Console()
logger = structlog.get_logger()

INVALID_INPUT = (
    ValidationError,
    ConfigurationError,
    InputProcessingError,
    SequenceError,
    pydantic.ValidationError,
)


def _fail(message: str, code: ExitCode) -> typer.Exit:
    console.print(f"❌ {message}", style="red")
    return typer.Exit(int(code))


@app.callback()
def configure(
    log_level: str = typer.Option(
        settings.logging.level, "--log-level", help="DEBUG, INFO, WARNING or ERROR"
    ),
    json_logs: bool = typer.Option(
        settings.logging.format == "json", "--json-logs/--console-logs", help="Log format"
    ),
    debug: bool = typer.Option(settings.debug, "--debug", help="Verbose logging"),
):
    """Simulate and analyse the bichromatic σ_z spin-dependent force."""
    setup_logging(
        level=log_level,
        debug=debug,
        json_logs=json_logs,
        file_path=settings.logging.file_path,
        component="cli",
    )


@app.command()
def run(
    config_path: Path = typer.Argument(..., help="TOML config or run manifest"),
    output_dir: Optional[Path] = typer.Option(
        None, "--output-dir", help="Directory for the CSV and manifest"
    ),
    threads: Optional[int] = typer.Option(
        None, "--threads", min=1, help="Override number of sweep workers"
    ),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="Override the config seed"),
    performance: str = typer.Option(
        settings.execution.performance_mode,
        "--performance",
        help="Performance mode: conservative, balanced, aggressive, maximum",
    ),
    show_rows: int = typer.Option(10, "--show-rows", help="Rows to print after the run"),
):
    """Run an experiment and write its results table and manifest."""
    try:
        config = ConfigLoader().load(config_path)
        if seed is not None:
            config = config.with_seed(seed)
        engine = SweepEngine(
            max_workers=threads or settings.execution.max_workers,
            fail_fast=True,
            performance_mode=performance,
        )
        runner = ExperimentRunner(config, engine=engine)
        console.print(
            f"🚀 Running {config.kind.value} ({len(config.grid())} points, "
            f"{runner.model.value} model)",
            style="bold blue",
        )
        result = runner.run()
    except INVALID_INPUT as e:
        raise _fail(f"Invalid configuration: {e}", ExitCode.VALIDATION)
    except ValueError as e:
        raise _fail(f"Invalid configuration: {e}", ExitCode.VALIDATION)
    except SweepPointError as e:
        raise _fail(
            f"Numerical failure in {e.kind} at sweep point {e.value:.6g}: {e.cause}",
            ExitCode.NUMERICAL,
        )
    except (NumericalError, FitError) as e:
        raise _fail(f"Numerical failure: {e}", ExitCode.NUMERICAL)

    manifest = RunManifest.build(config, runner.integrator_config())
    directory = output_dir or (
        Path(config.output.directory) if config.output.directory else settings.storage.results_dir
    )
    try:
        paths = ResultStorage(directory).save(config.output_name, result, manifest)
    except StorageError as e:
        raise _fail(str(e), ExitCode.FAILURE)

    console.print(report_generator.summary_table(result))
    if show_rows:
        console.print(report_generator.results_table(result, max_rows=show_rows))
    console.print(report_generator.engine_table(engine.get_final_stats()))
    console.print(f"✅ Results written to {paths['csv']}", style="green")
    console.print(f"📄 Manifest {paths['manifest']} ({manifest.manifest_hash[:12]})")


@app.command()
def validate(
    config_path: Path = typer.Argument(..., help="TOML config or run manifest"),
):
    """Validate a config and report the quantities it resolves to."""
    try:
        config = ConfigLoader().load(config_path)
        runner = ExperimentRunner(config)
        derived = runner.derived_quantities()
    except INVALID_INPUT as e:
        raise _fail(f"Invalid configuration: {e}", ExitCode.VALIDATION)
    except ValueError as e:
        raise _fail(f"Invalid configuration: {e}", ExitCode.VALIDATION)

    console.print(report_generator.derived_table(derived, title=f"{config_path.name}"))
    console.print("✅ Configuration is valid", style="green")


@app.command()
def refit(
    trace_path: Path = typer.Argument(..., help="CSV with duration_us and p_up"),
    delta_g: str = typer.Option(..., "--delta-g", help="Force detuning, e.g. '28.6 kHz'"),
    t_ramp: str = typer.Option("5 us", "--t-ramp", help="Ramp time"),
    nbar: float = typer.Option(0.1, "--nbar", min=0.0, help="Mean phonon number"),
    guess: Optional[str] = typer.Option(None, "--guess", help="Initial Ω_B, e.g. '8 kHz'"),
):
    """Fit Ω_eff to an exported or measured Ramsey trace."""
    try:
        points = TraceReader().read(trace_path)
        detuning = quantity_validator.parse_frequency(delta_g)
        ramp = quantity_validator.parse_duration(t_ramp)
        start = quantity_validator.parse_frequency(guess) if guess else None
        fit = fit_omega_eff(points, detuning, ramp, nbar, guess=start)
    except INVALID_INPUT as e:
        raise _fail(f"Invalid input: {e}", ExitCode.VALIDATION)
    except FitError as e:
        raise _fail(f"Fit failed: {e}", ExitCode.NUMERICAL)

    console.print(report_generator.fit_table(fit))
    if not fit.converged:
        raise _fail("Fit did not converge", ExitCode.NUMERICAL)


def main(args=None):
    """Main entry point for the CLI."""
    app()


if __name__ == "__main__":
    main()
