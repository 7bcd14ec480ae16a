import csv
import json
import sys
from collections.abc import Iterable, Sequence
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Any, Iterator

from pydantic import BaseModel

NUMBER_FORMAT = "{:.12g}"


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, str)):
        return str(value)
    return NUMBER_FORMAT.format(float(value))


@contextmanager
def open_output(output: Path | None) -> Iterator[IO[str]]:
    if output is None:
        yield sys.stdout
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    with open(output, "w", newline="") as f:
        yield f


def write_csv_table(
    stream: IO[str], header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])


def write_csv(
    header: Sequence[str], rows: Iterable[Sequence[Any]], output: Path | None = None
) -> None:
    with open_output(output) as stream:
        write_csv_table(stream, header, rows)


def write_json(payload: Any, output: Path | None = None) -> None:
    if isinstance(payload, BaseModel):
        text = json.dumps(payload.model_dump(mode="json"), sort_keys=True)
    else:
        text = json.dumps(payload, sort_keys=True)
    with open_output(output) as stream:
        stream.write(text + "\n")


def write_json_lines(models: Iterable[BaseModel], output: Path | None = None) -> None:
    with open_output(output) as stream:
        for model in models:
            stream.write(json.dumps(model.model_dump(mode="json"), sort_keys=True) + "\n")
