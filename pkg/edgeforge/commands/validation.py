"""Handlers behind the validation commands: the Monte Carlo oracle and the identity suite."""

import logging
from functools import partial

import numpy as np
from rich import box
from rich.table import Table

from edgeforge.numerics import edgelaw, ginibre_mc, identities
from edgeforge.utils.constants import EXIT_CHECK_FAILED, EXIT_OK
from edgeforge.utils.log import stderr_console
from edgeforge.utils.models import CliConfig, IdentityReport, McReport, McRun
from edgeforge.utils.writer import write_json_lines

logger = logging.getLogger(__name__)


def _exact_cdf(gamma: float, m: int, t: float) -> float:
    return edgelaw.evaluate(t, gamma, m).cdf


def mc_report(run: McRun, m: int) -> McReport:
    return McReport(
        n=run.n,
        gamma=run.gamma,
        num_samples=run.num_samples,
        seed=run.seed,
        empty_samples=run.empty_samples,
        mean=float(np.mean(run.maxima)) if run.maxima else None,
        ks_distance=ginibre_mc.ks_distance(run, partial(_exact_cdf, run.gamma, m)),
    )


def run_mc(config: CliConfig) -> int:
    runs = [
        ginibre_mc.run(
            config.matrix_size,
            gamma,
            config.samples,
            config.seed,
            config.workers,
            config.tol,
        )
        for gamma in config.gamma
    ]
    reports = [mc_report(run, config.quad_points) for run in runs]
    for report in reports:
        logger.info(
            "mc gamma=%g n=%d samples=%d: ks=%.4f",
            report.gamma,
            report.n,
            report.num_samples,
            report.ks_distance,
        )
    if config.dump is not None:
        write_json_lines(runs, config.dump)
    write_json_lines(reports, config.output)
    return EXIT_OK


def _summary_table(reports: list[IdentityReport]) -> Table:
    table = Table(title="Identity checks", box=box.MARKDOWN)
    table.add_column("Identity", justify="left", style="light_sea_green")
    table.add_column("Parameters", justify="left", style="grey50")
    table.add_column("Error", justify="right")
    table.add_column("Passed", justify="center")
    for report in reports:
        error = report.rel_err if report.metric == "relative" else report.abs_err
        params = " ".join(f"{key}={value:g}" for key, value in report.params.items())
        table.add_row(
            report.name,
            params,
            f"{error:.2e}",
            "[green]✔[/green]" if report.passed else "[red]✘[/red]",
        )
    return table


def run_check(config: CliConfig) -> int:
    reports = identities.run_suite(config.grid, config.quad_points, config.workers)
    write_json_lines(reports, config.output)
    stderr_console.print(_summary_table(reports))

    failed = [report for report in reports if not report.passed]
    if failed:
        stderr_console.print(f"[red]{len(failed)} of {len(reports)} identity checks failed[/red]")
        return EXIT_CHECK_FAILED
    stderr_console.print(f"[green]All {len(reports)} identity checks passed[/green]")
    return EXIT_OK
