import json
import os
from pathlib import Path
from typing import Any

from edgeforge.utils.constants import (
    DEFAULT_CONFIG_FILE,
    DEFAULT_LOG_LEVEL,
    DEFAULT_QUAD_POINTS,
    DEFAULT_WORKERS,
    ENV_CONFIG,
    ENV_LOG_LEVEL,
    ENV_QUAD_POINTS,
    ENV_WORKERS,
    MAX_QUAD_POINTS,
)


class EdgeForgeConfig:
    """Runtime settings resolved from environment, then JSON file, then defaults."""

    def __init__(self, filepath: Path | None = None) -> None:
        self._filepath = filepath
        self._cached_config: dict[str, dict[Any, Any]] = {}

    @property
    def filepath(self) -> Path:
        if self._filepath is not None:
            return self._filepath
        env_path = os.environ.get(ENV_CONFIG)
        return Path(env_path) if env_path else DEFAULT_CONFIG_FILE

    def get_file_config(self) -> dict:
        return self._load_config(self.filepath)

    def get_quad_points(self) -> int:
        quad_points = self._resolve(
            ENV_QUAD_POINTS, "quad_points", int, DEFAULT_QUAD_POINTS
        )
        if not 2 <= quad_points <= MAX_QUAD_POINTS:
            raise ValueError(
                f"quad_points is expected to be in [2, {MAX_QUAD_POINTS}], but got {quad_points}"
            )
        return quad_points

    def get_workers(self) -> int:
        workers = self._resolve(ENV_WORKERS, "workers", int, DEFAULT_WORKERS)
        if workers < 1:
            raise ValueError(f"workers is expected to be at least 1, but got {workers}")
        return workers

    def get_log_level(self) -> str:
        level = self._resolve(ENV_LOG_LEVEL, "log_level", str, DEFAULT_LOG_LEVEL)
        return level.upper()

    def clear(self) -> None:
        self._cached_config.clear()

    def _resolve(self, env_name: str, field: str, expected_type: type, default: Any):
        raw = os.environ.get(env_name)
        if raw is not None and raw != "":
            try:
                return expected_type(raw)
            except ValueError:
                raise ValueError(
                    f"Environment variable '{env_name}' is expected to be of type {expected_type.__name__}, but got '{raw}'"
                )
        try:
            return self._get_value_from_config(field, expected_type=expected_type)
        except (KeyError, FileNotFoundError):
            return default

    def _load_config(self, filepath: Path) -> dict[Any, Any]:
        filepath_str = str(filepath)
        if filepath_str not in self._cached_config:
            self._cached_config[filepath_str] = self._read_from_file(filepath)
        return self._cached_config.get(filepath_str, {})

    def _read_from_file(self, filepath: Path) -> dict:
        if not filepath.exists():
            raise FileNotFoundError(f"Configuration file '{filepath}' does not exists")

        try:
            with open(filepath, "r") as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"Failed to parse JSON from '{filepath}': {e}")

    def _get_value_from_config(self, field: str, expected_type: Any = None) -> Any:
        file_config = self.get_file_config()
        value = file_config.get(field, None)
        if value is None:
            raise KeyError(f"Field '{field}' is missing in the config file.")
        # bool is an int subclass; reject it for numeric fields
        if expected_type and (
            not isinstance(value, expected_type)
            or (expected_type is int and isinstance(value, bool))
        ):
            raise TypeError(
                f"Field '{field}' is expected to be of type {expected_type.__name__}, but got {type(value).__name__}."
            )
        return value


edge_config = EdgeForgeConfig()
