# type: ignore
from collections.abc import Callable
from pathlib import Path
from typing import List, Optional

import typer
from pydantic import ValidationError
from rich import print
from typer.core import TyperGroup
from typing_extensions import Annotated

from edgeforge import __app_name__, __version__
from edgeforge.commands import curves, validation
from edgeforge.utils.config import edge_config
from edgeforge.utils.constants import (
    DEFAULT_MATRIX_SIZE,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_TOL,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_VALIDATION,
    TABLE1_REFERENCE,
)
from edgeforge.utils.errors import NumericalError, ParameterError
from edgeforge.utils.helper import flag_name
from edgeforge.utils.log import setup_logging, stderr_console
from edgeforge.utils.models import CliConfig, Command, OutputFormat

# typer.BadParameter derives from the UsageError of whichever click build typer runs on
UsageError = next(
    cls for cls in typer.BadParameter.__mro__ if cls.__name__ == "UsageError"
)


class EdgeForgeGroup(TyperGroup):
    """Usage errors exit with status 1 instead of click's 2."""

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except UsageError as e:
            e.exit_code = EXIT_VALIDATION
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except UsageError as e:
            e.exit_code = EXIT_VALIDATION
            raise


app = typer.Typer(no_args_is_help=True, cls=EdgeForgeGroup)

HANDLERS: dict[Command, Callable[[CliConfig], int]] = {
    Command.CDF: curves.run_cdf,
    Command.PDF: curves.run_pdf,
    Command.MOMENTS: curves.run_moments,
    Command.TAILS: curves.run_tails,
    Command.MTH: curves.run_mth,
    Command.GEN: curves.run_gen,
    Command.TABLE1: curves.run_table1,
    Command.MC: validation.run_mc,
    Command.CHECK: validation.run_check,
}

GammaOption = Annotated[
    Optional[List[float]],
    typer.Option(
        "--gamma", "-g", help="Thinning parameter in [0, 1]; repeat for several values"
    ),
]
TMinOption = Annotated[float, typer.Option("--t-min", help="Left end of the t grid")]
TMaxOption = Annotated[float, typer.Option("--t-max", help="Right end of the t grid")]
TStepOption = Annotated[float, typer.Option("--t-step", help="Spacing of the t grid")]
QuadPointsOption = Annotated[
    Optional[int],
    typer.Option(
        "--quad-points",
        "-m",
        help="Gauss-Legendre nodes (default from EDGEFORGE_QUAD_POINTS, else 50)",
        show_default=False,
    ),
]
WorkersOption = Annotated[
    Optional[int],
    typer.Option(
        "--workers",
        "-w",
        help="Parallel workers (default from EDGEFORGE_WORKERS, else 1)",
        show_default=False,
    ),
]
FormatOption = Annotated[
    OutputFormat, typer.Option("--format", "-f", help="Output format")
]
OutputOption = Annotated[
    Optional[Path],
    typer.Option("--output", "-o", help="Write to this file instead of stdout"),
]
RefineTolOption = Annotated[
    Optional[float],
    typer.Option(
        "--refine-tol",
        help="Double the nodes for t < -8 until the log-determinants agree to this",
        show_default=False,
    ),
]


def _version_callback(value: bool) -> None:
    if value:
        print(f"{__app_name__} v{__version__}")
        raise typer.Exit()


@app.callback()
def main(
    log_level: Annotated[
        Optional[str],
        typer.Option(
            "--log-level",
            help="DEBUG, INFO, WARNING or ERROR (default from EDGEFORGE_LOG_LEVEL)",
            show_default=False,
        ),
    ] = None,
    version: Annotated[
        Optional[bool],
        typer.Option(
            "--version",
            "-v",
            help="Show the application's version and exit",
            callback=_version_callback,
            is_eager=True,
        ),
    ] = None,
):
    """Edge law of the largest real eigenvalue in the thinned real Ginibre ensemble."""
    try:
        setup_logging(log_level or edge_config.get_log_level())
    except (ValueError, TypeError) as e:
        print(f"[red]{e}[/red]")
        raise typer.Exit(code=EXIT_VALIDATION)


def _validation_message(error: ValidationError) -> str:
    lines = []
    for detail in error.errors():
        field = next((str(part) for part in detail["loc"] if isinstance(part, str)), "")
        prefix = f"{flag_name(field)}: " if field else ""
        lines.append(f"{prefix}{detail['msg']}")
    return "\n".join(lines)


def build_config(command: Command, **flags) -> CliConfig:
    """CliConfig from parsed flags; unset flags fall back to the config layer."""
    values = {key: value for key, value in flags.items() if value is not None}
    if "quad_points" not in values:
        values["quad_points"] = edge_config.get_quad_points()
    if "workers" not in values:
        values["workers"] = edge_config.get_workers()
    return CliConfig(command=command, **values)


def run_command(config: CliConfig) -> int:
    """Dispatch a validated config; returns the process exit status."""
    handler = HANDLERS[config.command]
    try:
        return handler(config)
    except ParameterError as e:
        stderr_console.print(f"[red]{e}[/red]")
        return EXIT_VALIDATION
    except NumericalError as e:
        stderr_console.print(f"[red]Numerical failure: {e}[/red]")
        return EXIT_NUMERICAL


def _execute(command: Command, **flags) -> None:
    try:
        config = build_config(command, **flags)
    except ValidationError as e:
        stderr_console.print(f"[red]{_validation_message(e)}[/red]")
        raise typer.Exit(code=EXIT_VALIDATION)
    except (ValueError, TypeError) as e:
        stderr_console.print(f"[red]{e}[/red]")
        raise typer.Exit(code=EXIT_VALIDATION)

    status = run_command(config)
    if status != EXIT_OK:
        raise typer.Exit(code=status)


@app.command()
def cdf(
    gamma: GammaOption = None,
    t_min: TMinOption = -8.0,
    t_max: TMaxOption = 4.0,
    t_step: TStepOption = 0.5,
    quad_points: QuadPointsOption = None,
    refine_tol: RefineTolOption = None,
    workers: WorkersOption = None,
    format: FormatOption = OutputFormat.CSV,
    output: OutputOption = None,
):
    """P(t; gamma) on a t grid. Columns: gamma,t,cdf."""
    _execute(
        Command.CDF,
        gamma=gamma,
        t_min=t_min,
        t_max=t_max,
        t_step=t_step,
        quad_points=quad_points,
        refine_tol=refine_tol,
        workers=workers,
        format=format,
        output=output,
    )


@app.command()
def pdf(
    gamma: GammaOption = None,
    t_min: TMinOption = -8.0,
    t_max: TMaxOption = 4.0,
    t_step: TStepOption = 0.5,
    quad_points: QuadPointsOption = None,
    refine_tol: RefineTolOption = None,
    workers: WorkersOption = None,
    format: FormatOption = OutputFormat.CSV,
    output: OutputOption = None,
):
    """Density of P(t; gamma) on a t grid. Columns: gamma,t,pdf."""
    _execute(
        Command.PDF,
        gamma=gamma,
        t_min=t_min,
        t_max=t_max,
        t_step=t_step,
        quad_points=quad_points,
        refine_tol=refine_tol,
        workers=workers,
        format=format,
        output=output,
    )


@app.command()
def moments(
    gamma: GammaOption = None,
    quad_points: QuadPointsOption = None,
    workers: WorkersOption = None,
    format: FormatOption = OutputFormat.CSV,
    output: OutputOption = None,
):
    """Moments of the edge law.

    Columns: gamma,mean,variance,skewness,kurtosis,excess_kurtosis,mass.
    """
    _execute(
        Command.MOMENTS,
        gamma=gamma,
        quad_points=quad_points,
        workers=workers,
        format=format,
        output=output,
    )


@app.command()
def tails(
    gamma: GammaOption = None,
    t_min: TMinOption = -12.0,
    t_max: TMaxOption = 6.0,
    t_step: TStepOption = 0.5,
    quad_points: QuadPointsOption = None,
    workers: WorkersOption = None,
    format: FormatOption = OutputFormat.CSV,
    output: OutputOption = None,
):
    """Exact law against its tail asymptotics.

    CSV holds two blocks separated by a blank line:
    gamma,t,exact,right_tail,left_tail and gamma,c1,c0_integral,c0_series.
    """
    _execute(
        Command.TAILS,
        gamma=gamma,
        t_min=t_min,
        t_max=t_max,
        t_step=t_step,
        quad_points=quad_points,
        workers=workers,
        format=format,
        output=output,
    )


@app.command()
def mth(
    order: Annotated[
        int, typer.Option("--order", help="Largest index m of F_1..F_m, at most 4")
    ] = 2,
    t_min: TMinOption = -8.0,
    t_max: TMaxOption = 4.0,
    t_step: TStepOption = 0.5,
    quad_points: QuadPointsOption = None,
    workers: WorkersOption = None,
    format: FormatOption = OutputFormat.CSV,
    output: OutputOption = None,
):
    """Laws of the m largest real eigenvalues. Columns: t,F_1,...,F_m."""
    _execute(
        Command.MTH,
        order=order,
        t_min=t_min,
        t_max=t_max,
        t_step=t_step,
        quad_points=quad_points,
        workers=workers,
        format=format,
        output=output,
    )


@app.command()
def gen(
    t: Annotated[float, typer.Option("--t", help="Edge shift t")] = 0.0,
    lambda_step: Annotated[
        float, typer.Option("--lambda-step", help="Spacing of the lambda grid on [0, 1]")
    ] = 0.05,
    quad_points: QuadPointsOption = None,
    format: FormatOption = OutputFormat.CSV,
    output: OutputOption = None,
):
    """Generating function E((t, oo); lambda). Columns: t,lambda,generating_function."""
    _execute(
        Command.GEN,
        t=t,
        lambda_step=lambda_step,
        quad_points=quad_points,
        format=format,
        output=output,
    )


@app.command()
def table1(
    gamma: GammaOption = None,
    quad_points: QuadPointsOption = None,
    workers: WorkersOption = None,
    format: FormatOption = OutputFormat.CSV,
    output: OutputOption = None,
):
    """Reproduce the reference moment table; exit 3 on a mismatch.

    Columns: gamma,quantity,computed,reference,deviation,tolerance,convention,passed,known_discrepancy.
    """
    _execute(
        Command.TABLE1,
        gamma=gamma or sorted(TABLE1_REFERENCE, reverse=True),
        quad_points=quad_points,
        workers=workers,
        format=format,
        output=output,
    )


@app.command()
def mc(
    gamma: GammaOption = None,
    matrix_size: Annotated[
        int, typer.Option("--matrix-size", "-n", help="Matrix dimension n")
    ] = DEFAULT_MATRIX_SIZE,
    samples: Annotated[
        int, typer.Option("--samples", "-s", help="Number of sampled matrices")
    ] = DEFAULT_SAMPLES,
    seed: Annotated[int, typer.Option("--seed", help="64-bit seed")] = DEFAULT_SEED,
    tol: Annotated[
        float,
        typer.Option("--tol", help="Imaginary parts below tol (1 + max|lambda|) count as real"),
    ] = DEFAULT_TOL,
    quad_points: QuadPointsOption = None,
    workers: WorkersOption = None,
    output: OutputOption = None,
    dump: Annotated[
        Optional[Path],
        typer.Option("--dump", help="Also write the raw runs as JSON lines"),
    ] = None,
):
    """Sample real Ginibre matrices and compare the thinned edge maximum with P(t; gamma).

    Writes one JSON report per gamma: n, gamma, num_samples, seed, empty_samples,
    mean, ks_distance.
    """
    _execute(
        Command.MC,
        gamma=gamma,
        matrix_size=matrix_size,
        samples=samples,
        seed=seed,
        tol=tol,
        quad_points=quad_points,
        workers=workers,
        format=OutputFormat.JSON,
        output=output,
        dump=dump,
    )


@app.command()
def check(
    grid: Annotated[
        str, typer.Option("--grid", help="Identity grid: default or quick")
    ] = "default",
    quad_points: QuadPointsOption = None,
    workers: WorkersOption = None,
    output: OutputOption = None,
):
    """Run the identity suite; one JSON report per identity, exit 3 on a failure."""
    _execute(
        Command.CHECK,
        grid=grid,
        quad_points=quad_points,
        workers=workers,
        format=OutputFormat.JSON,
        output=output,
    )


def run():
    app()


if __name__ == "__main__":
    run()
