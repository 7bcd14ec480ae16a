import json
from unittest.mock import patch

import numpy as np
import pytest
import typer
from typer.testing import CliRunner

from edgeforge import __version__
from edgeforge.main import UsageError, app, build_config
from edgeforge.utils.constants import TABLE1_REFERENCE
from edgeforge.utils.errors import ConvergenceError
from edgeforge.utils.models import (
    Command,
    IdentityReport,
    MomentSummary,
    TailCoefficients,
)

runner = CliRunner()


def _data_lines(output: str) -> list[str]:
    return [line for line in output.splitlines() if line and line[0] in "-0123456789"]


def _reference_summary(gamma: float) -> MomentSummary:
    mean, variance, skewness, kurtosis = TABLE1_REFERENCE[gamma]
    return MomentSummary(
        gamma=gamma, mean=mean, variance=variance, skewness=skewness, kurtosis=kurtosis
    )


@pytest.fixture
def mock_cdf_grid():
    with patch("edgeforge.commands.curves.edgelaw.cdf_grid") as mock_cdf_grid:
        mock_cdf_grid.side_effect = lambda ts, gamma, m, workers, tol=None: np.full(len(ts), 0.5)
        yield mock_cdf_grid


def test_version_option():
    result = runner.invoke(app, ["--version"])

    assert result.exit_code == 0
    assert f"edgeforge v{__version__}" in result.output


def test_cdf_command_without_thinning_is_identically_one():
    result = runner.invoke(
        app,
        ["cdf", "-g", "0", "--t-min", "-5", "--t-max", "5", "--t-step", "1", "-m", "10"],
    )

    assert result.exit_code == 0
    assert "gamma,t,cdf" in result.output
    rows = _data_lines(result.output)
    assert len(rows) == 11
    assert all(row.endswith(",1") for row in rows)


def test_cdf_command_passes_grid_and_flags(mock_cdf_grid):
    result = runner.invoke(
        app,
        ["cdf", "-g", "1", "-g", "0.5", "--t-min", "-1", "--t-max", "1", "-m", "30", "-w", "2"],
    )

    assert result.exit_code == 0
    assert mock_cdf_grid.call_count == 2
    ts, gamma, m, workers = mock_cdf_grid.call_args_list[1].args
    np.testing.assert_allclose(ts, [-1.0, -0.5, 0.0, 0.5, 1.0])
    assert (gamma, m, workers) == (0.5, 30, 2)
    assert mock_cdf_grid.call_args_list[1].kwargs == {"tol": None}
    assert "0.5,1,0.5" in result.output


def test_cdf_command_passes_refine_tol(mock_cdf_grid):
    result = runner.invoke(app, ["cdf", "--t-min", "-12", "--t-max", "-10", "--refine-tol", "1e-9"])

    assert result.exit_code == 0
    assert mock_cdf_grid.call_args.kwargs == {"tol": 1e-9}


def test_cdf_command_where_refine_tol_is_not_positive():
    result = runner.invoke(app, ["cdf", "--refine-tol", "0"])

    assert result.exit_code == 1
    assert "--refine-tol" in result.output


def test_cdf_command_where_t_step_is_zero():
    result = runner.invoke(app, ["cdf", "--t-step", "0"])

    assert result.exit_code == 1
    assert "--t-step" in result.output


def test_cdf_command_where_t_min_is_not_below_t_max():
    result = runner.invoke(app, ["cdf", "--t-min", "2", "--t-max", "2"])

    assert result.exit_code == 1
    assert "t_min is expected to be less than t_max" in result.output


def test_cdf_command_where_gamma_is_out_of_range():
    result = runner.invoke(app, ["cdf", "-g", "1.5"])

    assert result.exit_code == 1
    assert "--gamma" in result.output


def test_cdf_command_where_quad_points_is_not_an_integer():
    result = runner.invoke(app, ["cdf", "--quad-points", "abc"])

    assert result.exit_code == 1


def test_unknown_option_exits_with_validation_status():
    result = runner.invoke(app, ["cdf", "--bogus"])

    assert result.exit_code == 1


def test_usage_errors_are_caught_from_the_click_build_typer_uses():
    assert issubclass(typer.BadParameter, UsageError)
    assert UsageError.__name__ == "UsageError"

    result = runner.invoke(app, ["pdf", "--t-min"])

    assert result.exit_code == 1


def test_cdf_command_where_the_solver_does_not_converge(mock_cdf_grid):
    mock_cdf_grid.side_effect = ConvergenceError("refinement stalled", last=0.5, previous=0.4)

    result = runner.invoke(app, ["cdf"])

    assert result.exit_code == 2
    assert "refinement stalled" in result.output


def test_pdf_command_in_json():
    with patch("edgeforge.commands.curves.edgelaw.pdf_grid") as mock_pdf_grid:
        mock_pdf_grid.return_value = np.array([0.25, 0.125])
        result = runner.invoke(
            app, ["pdf", "--t-min", "0", "--t-max", "1", "--t-step", "1", "-f", "json"]
        )

    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload == [
        {"gamma": 1.0, "t": 0.0, "pdf": 0.25},
        {"gamma": 1.0, "t": 1.0, "pdf": 0.125},
    ]


def test_moments_command():
    with patch("edgeforge.commands.curves.edgelaw.moments") as mock_moments:
        mock_moments.return_value = _reference_summary(1.0)
        result = runner.invoke(app, ["moments"])

    assert result.exit_code == 0
    assert "gamma,mean,variance,skewness,kurtosis,excess_kurtosis,mass" in result.output
    assert "1,-1.30319,3.97536,-1.76969,5.1456,2.1456,1" in result.output


def test_table1_command_that_matches_the_reference():
    with patch("edgeforge.commands.curves.edgelaw.moments") as mock_moments:
        mock_moments.side_effect = lambda gamma, m, workers: _reference_summary(gamma)
        result = runner.invoke(app, ["table1"])

    assert result.exit_code == 0
    assert mock_moments.call_count == len(TABLE1_REFERENCE)
    assert result.output.count(",true") == 4 * len(TABLE1_REFERENCE)


def test_table1_command_where_a_moment_is_off():
    summary = _reference_summary(1.0).model_copy(update={"mean": -1.2})
    with patch("edgeforge.commands.curves.edgelaw.moments", return_value=summary):
        result = runner.invoke(app, ["table1", "-g", "1"])

    assert result.exit_code == 3
    assert "1,mean,-1.2,-1.30319" in result.output


def test_table1_command_where_gamma_has_no_reference():
    result = runner.invoke(app, ["table1", "-g", "0.5"])

    assert result.exit_code == 1
    assert "gamma is expected to be one of" in result.output


def test_tails_command_writes_two_blocks(mock_cdf_grid):
    coefficients = TailCoefficients(
        gamma=1.0, c1=0.5, c0_integral=-0.1, c0_series=-0.1, n_terms=100
    )
    with patch("edgeforge.commands.curves.tails.coefficients", return_value=coefficients):
        result = runner.invoke(app, ["tails", "--t-min", "-1", "--t-max", "0"])

    assert result.exit_code == 0
    assert "gamma,t,exact,right_tail,left_tail" in result.output
    assert "gamma,c1,c0_integral,c0_series" in result.output
    assert "1,0.5,-0.1,-0.1" in result.output


def test_mth_command():
    with patch("edgeforge.commands.curves.edgelaw.mth_largest_grid") as mock_grid:
        mock_grid.return_value = [[0.25, 0.5, 0.75]]
        result = runner.invoke(
            app, ["mth", "--order", "3", "--t-min", "0", "--t-max", "0.5", "--t-step", "1"]
        )

    assert result.exit_code == 0
    assert "t,F_1,F_2,F_3" in result.output
    assert "0,0.25,0.5,0.75" in result.output


def test_mth_command_where_order_is_too_large():
    result = runner.invoke(app, ["mth", "--order", "5"])

    assert result.exit_code == 1
    assert "--order" in result.output


def test_gen_command():
    with patch("edgeforge.commands.curves.edgelaw.generating_function", return_value=0.75):
        result = runner.invoke(app, ["gen", "--t", "1", "--lambda-step", "0.5"])

    assert result.exit_code == 0
    assert _data_lines(result.output) == ["1,0,0.75", "1,0.5,0.75", "1,1,0.75"]


@pytest.fixture
def mock_exact_cdf():
    with patch("edgeforge.commands.validation.edgelaw.evaluate") as mock_evaluate:
        mock_evaluate.return_value.cdf = 0.5
        yield mock_evaluate


def test_mc_command_is_reproducible_across_workers(mock_exact_cdf, tmp_path):
    args = ["mc", "-g", "0.6", "-n", "6", "-s", "30", "--seed", "11"]
    first = runner.invoke(app, [*args, "-o", str(tmp_path / "a.jsonl")])
    second = runner.invoke(app, [*args, "-w", "3", "-o", str(tmp_path / "b.jsonl")])

    assert first.exit_code == 0
    assert second.exit_code == 0
    assert (tmp_path / "a.jsonl").read_text() == (tmp_path / "b.jsonl").read_text()
    report = json.loads((tmp_path / "a.jsonl").read_text())
    assert report["n"] == 6
    assert report["num_samples"] == 30
    assert report["seed"] == 11


def test_mc_command_dumps_raw_runs(mock_exact_cdf, tmp_path):
    dump = tmp_path / "runs.jsonl"

    result = runner.invoke(app, ["mc", "-g", "1", "-g", "0", "-n", "5", "-s", "10", "--dump", str(dump)])

    assert result.exit_code == 0
    runs = [json.loads(line) for line in dump.read_text().splitlines()]
    assert [run["gamma"] for run in runs] == [1.0, 0.0]
    assert runs[1]["empty_samples"] == 10
    assert len(_data_lines(result.stdout)) == 0
    assert len(result.stdout.strip().splitlines()) == 2


def test_mc_command_where_matrix_size_is_too_large():
    result = runner.invoke(app, ["mc", "-n", "1001"])

    assert result.exit_code == 1
    assert "--matrix-size" in result.output


@pytest.mark.parametrize(
    "passed, exit_code", [(True, 0), (False, 3)], ids=["all_pass", "one_fails"]
)
def test_check_command(passed, exit_code):
    report = IdentityReport(
        name="tau_product",
        lhs=1.0,
        rhs=1.0 if passed else 2.0,
        params={"t": 0.0, "gamma": 0.5},
    )
    with patch("edgeforge.commands.validation.identities.run_suite", return_value=[report]) as mock_suite:
        result = runner.invoke(app, ["check", "--grid", "quick", "-m", "40"])

    assert result.exit_code == exit_code
    mock_suite.assert_called_once_with("quick", 40, 1)
    assert '"name": "tau_product"' in result.output


def test_check_command_where_grid_is_unknown():
    result = runner.invoke(app, ["check", "--grid", "huge"])

    assert result.exit_code == 1
    assert "--grid" in result.output


def test_log_level_that_is_unknown():
    result = runner.invoke(app, ["--log-level", "LOUD", "cdf"])

    assert result.exit_code == 1
    assert "Unknown log level 'LOUD'" in result.output


def test_build_config_reads_quad_points_from_environment(monkeypatch):
    monkeypatch.setenv("EDGEFORGE_QUAD_POINTS", "64")
    monkeypatch.setenv("EDGEFORGE_WORKERS", "3")

    config = build_config(Command.CDF, gamma=None, quad_points=None)

    assert config.quad_points == 64
    assert config.workers == 3
    assert config.gamma == [1.0]


def test_build_config_prefers_flags_over_environment(monkeypatch):
    monkeypatch.setenv("EDGEFORGE_QUAD_POINTS", "64")

    assert build_config(Command.CDF, quad_points=80).quad_points == 80
