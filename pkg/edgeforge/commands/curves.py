"""Handlers behind the data commands: cdf, pdf, moments, tails, mth, gen and table1.

Each handler takes a validated CliConfig, writes its rows and returns an exit code.
"""

import logging
import math

from edgeforge.numerics import edgelaw, tails
from edgeforge.utils.constants import (
    EXIT_CHECK_FAILED,
    EXIT_OK,
    TABLE1_REFERENCE,
    TABLE1_TOL_LOCATION,
    TABLE1_TOL_SHAPE,
    TABLE1_UNREPRODUCED,
)
from edgeforge.utils.errors import ParameterError
from edgeforge.utils.helper import t_grid, unit_grid
from edgeforge.utils.models import (
    CliConfig,
    MomentSummary,
    OutputFormat,
    Table1Row,
    TailCoefficients,
)
from edgeforge.utils.writer import (
    open_output,
    write_csv,
    write_csv_table,
    write_json,
)

logger = logging.getLogger(__name__)

CDF_HEADER = ("gamma", "t", "cdf")
PDF_HEADER = ("gamma", "t", "pdf")
MOMENTS_HEADER = (
    "gamma",
    "mean",
    "variance",
    "skewness",
    "kurtosis",
    "excess_kurtosis",
    "mass",
)
TAIL_CURVE_HEADER = ("gamma", "t", "exact", "right_tail", "left_tail")
TAIL_COEFFICIENT_HEADER = ("gamma", "c1", "c0_integral", "c0_series")
GEN_HEADER = ("t", "lambda", "generating_function")
TABLE1_HEADER = (
    "gamma",
    "quantity",
    "computed",
    "reference",
    "deviation",
    "tolerance",
    "convention",
    "passed",
    "known_discrepancy",
)


def _emit(config: CliConfig, header: tuple[str, ...], rows: list[list]) -> None:
    if config.format is OutputFormat.JSON:
        write_json([dict(zip(header, row)) for row in rows], config.output)
    else:
        write_csv(header, rows, config.output)


def _curve_rows(config: CliConfig, with_pdf: bool) -> list[list]:
    ts = t_grid(config.t_min, config.t_max, config.t_step)
    sweep = edgelaw.pdf_grid if with_pdf else edgelaw.cdf_grid
    rows = []
    for gamma in config.gamma:
        values = sweep(ts, gamma, config.quad_points, config.workers, tol=config.refine_tol)
        rows += [[gamma, float(t), float(v)] for t, v in zip(ts, values)]
    return rows


def run_cdf(config: CliConfig) -> int:
    _emit(config, CDF_HEADER, _curve_rows(config, with_pdf=False))
    return EXIT_OK


def run_pdf(config: CliConfig) -> int:
    _emit(config, PDF_HEADER, _curve_rows(config, with_pdf=True))
    return EXIT_OK


def _moment_row(summary: MomentSummary) -> list:
    return [
        summary.gamma,
        summary.mean,
        summary.variance,
        summary.skewness,
        summary.kurtosis,
        summary.excess_kurtosis,
        summary.mass,
    ]


def run_moments(config: CliConfig) -> int:
    summaries = [
        edgelaw.moments(gamma, config.quad_points, config.workers) for gamma in config.gamma
    ]
    _emit(config, MOMENTS_HEADER, [_moment_row(s) for s in summaries])
    return EXIT_OK


def _left_tail_or_none(t: float, coefficients: TailCoefficients) -> float | None:
    # exp(c1 t + c0) overflows far to the right
    if coefficients.c1 == 0.0:
        return None
    exponent = coefficients.c1 * t + coefficients.c0_series
    return math.exp(exponent) if exponent < 700.0 else None


def run_tails(config: CliConfig) -> int:
    ts = t_grid(config.t_min, config.t_max, config.t_step)
    curves = []
    coefficients = []
    for gamma in config.gamma:
        coefficient = tails.coefficients(gamma)
        exact = edgelaw.cdf_grid(ts, gamma, config.quad_points, config.workers)
        for t, value in zip(ts, exact):
            curves.append(
                [
                    gamma,
                    float(t),
                    float(value),
                    tails.right_tail(float(t), gamma),
                    _left_tail_or_none(float(t), coefficient),
                ]
            )
        coefficients.append(coefficient)

    coefficient_rows = [
        [c.gamma, c.c1, c.c0_integral, c.c0_series] for c in coefficients
    ]
    if config.format is OutputFormat.JSON:
        write_json(
            {
                "curves": [dict(zip(TAIL_CURVE_HEADER, row)) for row in curves],
                "coefficients": [c.model_dump(mode="json") for c in coefficients],
            },
            config.output,
        )
        return EXIT_OK

    with open_output(config.output) as stream:
        write_csv_table(stream, TAIL_CURVE_HEADER, curves)
        stream.write("\n")
        write_csv_table(stream, TAIL_COEFFICIENT_HEADER, coefficient_rows)
    return EXIT_OK


def run_mth(config: CliConfig) -> int:
    ts = t_grid(config.t_min, config.t_max, config.t_step)
    laws = edgelaw.mth_largest_grid(config.order, ts, config.quad_points, config.workers)
    header = ("t", *(f"F_{k}" for k in range(1, config.order + 1)))
    rows = [[float(t), *map(float, row)] for t, row in zip(ts, laws)]
    _emit(config, header, rows)
    return EXIT_OK


def run_gen(config: CliConfig) -> int:
    rows = [
        [config.t, float(lam), edgelaw.generating_function(config.t, float(lam), config.quad_points)]
        for lam in unit_grid(config.lambda_step)
    ]
    _emit(config, GEN_HEADER, rows)
    return EXIT_OK


def table1_rows(summary: MomentSummary) -> list[Table1Row]:
    """Compare moments with the reference table; kurtosis takes the closer convention."""
    mean, variance, skewness, kurtosis = TABLE1_REFERENCE[summary.gamma]
    raw_gap = abs(summary.kurtosis - kurtosis)
    excess_gap = abs(summary.excess_kurtosis - kurtosis)
    convention = "raw" if raw_gap <= excess_gap else "excess"
    logger.warning(
        "gamma=%g: kurtosis matches the %s convention (raw gap %.3g, excess gap %.3g)",
        summary.gamma,
        convention,
        raw_gap,
        excess_gap,
    )
    rows = [
        Table1Row(
            gamma=summary.gamma,
            quantity="mean",
            computed=summary.mean,
            reference=mean,
            tolerance=TABLE1_TOL_LOCATION,
        ),
        Table1Row(
            gamma=summary.gamma,
            quantity="variance",
            computed=summary.variance,
            reference=variance,
            tolerance=TABLE1_TOL_LOCATION,
        ),
        Table1Row(
            gamma=summary.gamma,
            quantity="skewness",
            computed=summary.skewness,
            reference=skewness,
            tolerance=TABLE1_TOL_SHAPE,
        ),
        Table1Row(
            gamma=summary.gamma,
            quantity="kurtosis",
            computed=summary.kurtosis if convention == "raw" else summary.excess_kurtosis,
            reference=kurtosis,
            tolerance=TABLE1_TOL_SHAPE,
            convention=convention,
        ),
    ]
    if summary.gamma not in TABLE1_UNREPRODUCED:
        return rows
    return [row.model_copy(update={"known_discrepancy": not row.passed}) for row in rows]


def run_table1(config: CliConfig) -> int:
    for gamma in config.gamma:
        if gamma not in TABLE1_REFERENCE:
            raise ParameterError(
                f"gamma is expected to be one of {sorted(TABLE1_REFERENCE)}, but got {gamma}"
            )
    rows = [
        row
        for gamma in config.gamma
        for row in table1_rows(edgelaw.moments(gamma, config.quad_points, config.workers))
    ]
    _emit(
        config,
        TABLE1_HEADER,
        [
            [
                r.gamma,
                r.quantity,
                r.computed,
                r.reference,
                r.deviation,
                r.tolerance,
                r.convention,
                r.passed,
                r.known_discrepancy,
            ]
            for r in rows
        ],
    )
    failed = [r for r in rows if not r.passed]
    for r in failed:
        if r.known_discrepancy:
            logger.warning(
                "known discrepancy at gamma=%g: %s=%.6f against the published %.5f; "
                "this thinned reference row is not reproduced by the converged law",
                r.gamma,
                r.quantity,
                r.computed,
                r.reference,
            )
            continue
        logger.error(
            "reference moment mismatch at gamma=%g: %s=%.6f, reference %.5f",
            r.gamma,
            r.quantity,
            r.computed,
            r.reference,
        )
    return EXIT_CHECK_FAILED if failed else EXIT_OK
