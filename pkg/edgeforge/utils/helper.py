import logging
import math
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def t_grid(t_min: float, t_max: float, t_step: float) -> np.ndarray:
    """Inclusive grid t_min, t_min + t_step, ... not exceeding t_max."""
    if not t_step > 0.0:
        raise ValueError(f"t_step is expected to be positive, but got {t_step}")
    count = math.floor((t_max - t_min) / t_step + 1e-9) + 1
    return t_min + t_step * np.arange(count, dtype=float)


def unit_grid(step: float) -> np.ndarray:
    """0, step, ..., 1 with the right end always included."""
    grid = t_grid(0.0, 1.0, step)
    if grid[-1] < 1.0 - 1e-12:
        grid = np.append(grid, 1.0)
    return np.clip(grid, 0.0, 1.0)


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """map() over a thread pool; results come back in input order for any worker count."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.debug("mapping %d items over %d workers", len(items), workers)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))


def flag_name(field: str) -> str:
    return "--" + field.replace("_", "-")
