import io
import json

from edgeforge.utils.models import IdentityReport
from edgeforge.utils.writer import (
    format_value,
    write_csv,
    write_csv_table,
    write_json,
    write_json_lines,
)


def test_format_value_uses_twelve_significant_digits():
    assert format_value(1.0 / 3.0) == "0.333333333333"
    assert format_value(1.0) == "1"
    assert format_value(-2.5e-20) == "-2.5e-20"


def test_format_value_special_cases():
    assert format_value(None) == ""
    assert format_value(True) == "true"
    assert format_value(7) == "7"
    assert format_value("mean") == "mean"


def test_write_csv_table_has_header_and_lf_endings():
    stream = io.StringIO()

    write_csv_table(stream, ["gamma", "t", "cdf"], [[1.0, -1.0, 0.25]])

    assert stream.getvalue() == "gamma,t,cdf\n1,-1,0.25\n"


def test_write_csv_to_file(tmp_path):
    output = tmp_path / "out" / "cdf.csv"

    write_csv(["t", "cdf"], [[0.0, 1.0]], output)

    assert output.read_text() == "t,cdf\n0,1\n"


def test_write_json_is_key_sorted(tmp_path):
    output = tmp_path / "payload.json"

    write_json({"b": 1, "a": [1.5]}, output)

    assert output.read_text() == '{"a": [1.5], "b": 1}\n'


def test_write_json_lines_dumps_computed_fields(tmp_path):
    output = tmp_path / "reports.jsonl"
    reports = [
        IdentityReport(name="one", lhs=1.0, rhs=1.0),
        IdentityReport(name="two", lhs=1.0, rhs=2.0),
    ]

    write_json_lines(reports, output)

    lines = [json.loads(line) for line in output.read_text().splitlines()]
    assert [line["name"] for line in lines] == ["one", "two"]
    assert lines[0]["passed"] is True
    assert lines[1]["passed"] is False
