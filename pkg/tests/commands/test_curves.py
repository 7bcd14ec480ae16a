import json
import logging
from unittest.mock import patch

import numpy as np
import pytest

from edgeforge.commands import curves
from edgeforge.utils.constants import EXIT_CHECK_FAILED, EXIT_OK, TABLE1_REFERENCE
from edgeforge.utils.errors import ParameterError
from edgeforge.utils.models import (
    CliConfig,
    Command,
    MomentSummary,
    OutputFormat,
    TailCoefficients,
)


def _summary(gamma: float, **update) -> MomentSummary:
    mean, variance, skewness, kurtosis = TABLE1_REFERENCE[gamma]
    values = dict(mean=mean, variance=variance, skewness=skewness, kurtosis=kurtosis)
    values.update(update)
    return MomentSummary(gamma=gamma, **values)


def test_run_cdf_writes_one_row_per_gamma_and_t(tmp_path):
    output = tmp_path / "cdf.csv"
    config = CliConfig(
        command=Command.CDF, gamma=[0.0], t_min=-1.0, t_max=1.0, t_step=1.0, quad_points=10, output=output
    )

    assert curves.run_cdf(config) == EXIT_OK
    assert output.read_text().splitlines() == ["gamma,t,cdf", "0,-1,1", "0,0,1", "0,1,1"]


def test_run_pdf_in_json(tmp_path):
    output = tmp_path / "pdf.json"
    config = CliConfig(
        command=Command.PDF,
        gamma=[1.0],
        t_min=0.0,
        t_max=0.5,
        t_step=0.5,
        format=OutputFormat.JSON,
        output=output,
    )
    with patch.object(curves.edgelaw, "pdf_grid", return_value=np.array([0.2, 0.1])):
        assert curves.run_pdf(config) == EXIT_OK

    assert json.loads(output.read_text()) == [
        {"gamma": 1.0, "t": 0.0, "pdf": 0.2},
        {"gamma": 1.0, "t": 0.5, "pdf": 0.1},
    ]


def test_left_tail_is_blank_without_thinning():
    coefficients = TailCoefficients(gamma=1.0, c1=0.0, c0_integral=None, c0_series=0.0, n_terms=1)

    assert curves._left_tail_or_none(-3.0, coefficients) is None


def test_left_tail_is_blank_where_it_overflows():
    coefficients = TailCoefficients(gamma=0.5, c1=1.0, c0_integral=None, c0_series=0.0, n_terms=1)

    assert curves._left_tail_or_none(800.0, coefficients) is None
    assert curves._left_tail_or_none(-2.0, coefficients) == pytest.approx(np.exp(-2.0))


def test_run_tails_in_json(tmp_path):
    output = tmp_path / "tails.json"
    config = CliConfig(
        command=Command.TAILS,
        gamma=[0.5],
        t_min=-2.0,
        t_max=-1.0,
        t_step=1.0,
        format=OutputFormat.JSON,
        output=output,
    )
    coefficients = TailCoefficients(gamma=0.5, c1=0.2, c0_integral=-0.3, c0_series=-0.3, n_terms=50)
    with patch.object(curves.tails, "coefficients", return_value=coefficients), patch.object(
        curves.edgelaw, "cdf_grid", return_value=np.array([0.1, 0.2])
    ):
        assert curves.run_tails(config) == EXIT_OK

    payload = json.loads(output.read_text())
    assert [row["t"] for row in payload["curves"]] == [-2.0, -1.0]
    assert payload["curves"][0]["left_tail"] == pytest.approx(np.exp(-0.7))
    assert payload["coefficients"][0]["c1"] == 0.2


def test_run_gen_covers_both_ends_of_lambda(tmp_path):
    output = tmp_path / "gen.csv"
    config = CliConfig(command=Command.GEN, t=0.5, lambda_step=0.3, output=output)
    with patch.object(curves.edgelaw, "generating_function", return_value=0.5) as mock_gen:
        assert curves.run_gen(config) == EXIT_OK

    lambdas = [call.args[1] for call in mock_gen.call_args_list]
    assert lambdas[0] == 0.0
    assert lambdas[-1] == 1.0
    assert len(output.read_text().splitlines()) == 1 + len(lambdas)


def test_table1_rows_pick_the_closer_kurtosis_convention():
    raw = curves.table1_rows(_summary(0.8))
    excess = curves.table1_rows(_summary(0.8, kurtosis=TABLE1_REFERENCE[0.8][3] + 3.0))

    assert raw[-1].convention == "raw"
    assert excess[-1].convention == "excess"
    assert all(row.passed for row in raw + excess)


def test_table1_rows_use_location_and_shape_tolerances():
    rows = curves.table1_rows(_summary(0.6, mean=TABLE1_REFERENCE[0.6][0] + 1e-3))

    assert [row.quantity for row in rows] == ["mean", "variance", "skewness", "kurtosis"]
    assert not rows[0].passed
    assert rows[2].tolerance > rows[0].tolerance


def test_run_table1_reports_mismatch(tmp_path, caplog):
    config = CliConfig(command=Command.TABLE1, gamma=[0.4], output=tmp_path / "t1.csv")
    with patch.object(curves.edgelaw, "moments", return_value=_summary(0.4, variance=36.0)):
        assert curves.run_table1(config) == EXIT_CHECK_FAILED

    assert "variance" in caplog.text


def test_run_table1_rejects_gamma_without_reference():
    config = CliConfig(command=Command.TABLE1, gamma=[0.3])

    with pytest.raises(ParameterError, match="gamma is expected to be one of"):
        curves.run_table1(config)


def test_table1_rows_flag_known_discrepancies_only_on_unreproduced_rows():
    thinned = curves.table1_rows(_summary(0.6, variance=13.4411, skewness=-1.9288))
    full = curves.table1_rows(_summary(1.0, mean=-1.2))

    assert [row.known_discrepancy for row in thinned] == [False, True, True, False]
    assert not any(row.known_discrepancy for row in full)


def test_run_table1_separates_known_discrepancies_from_mismatches(tmp_path, caplog):
    output = tmp_path / "t1.csv"
    config = CliConfig(command=Command.TABLE1, gamma=[1.0, 0.8], output=output)
    summaries = {
        1.0: _summary(1.0, mean=-1.2),
        0.8: _summary(0.8, variance=6.87394, kurtosis=5.4827 + 3.0),
    }

    with patch.object(curves.edgelaw, "moments", side_effect=lambda gamma, *args: summaries[gamma]):
        with caplog.at_level(logging.WARNING, logger="edgeforge.commands.curves"):
            assert curves.run_table1(config) == EXIT_CHECK_FAILED

    lines = output.read_text().splitlines()
    assert lines[0].endswith(",passed,known_discrepancy")
    assert lines[1].startswith("1,mean,") and lines[1].endswith(",false,false")
    assert lines[6].startswith("0.8,variance,") and lines[6].endswith(",false,true")
    errors = [r.getMessage() for r in caplog.records if r.levelno == logging.ERROR]
    known = [r.getMessage() for r in caplog.records if "known discrepancy" in r.getMessage()]
    assert errors == ["reference moment mismatch at gamma=1: mean=-1.200000, reference -1.30319"]
    assert len(known) == 2
    assert "gamma=0.8: variance=6.873940" in known[0]
