"""Closed-form kernels of the edge law.

All ``*_shifted`` kernels live on half-line coordinates x, y >= 0, i.e. they
are the kernels on [t, oo) pulled back by x -> x + t.
"""

import math
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, field_validator
from scipy import special

INV_SQRT_PI = 1.0 / math.sqrt(math.pi)
T_NORMALIZATION = 1.0 / (2.0 * math.sqrt(2.0 * math.pi))


def s_shifted(t: float, x: ArrayLike, y: ArrayLike):
    """S_t(x, y) = exp(-(x + y + t)^2) / sqrt(pi)."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return INV_SQRT_PI * np.exp(-((x + y + t) ** 2))


def s_shifted_dt(t: float, x: ArrayLike, y: ArrayLike):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    shift = x + y + t
    return -2.0 * shift * INV_SQRT_PI * np.exp(-(shift**2))


def t_kernel(x: ArrayLike, y: ArrayLike):
    """T(x, y) = pi^{-1} int_0^oo exp(-(x+u)^2 - (y+u)^2) du on the whole plane."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return (
        T_NORMALIZATION
        * np.exp(-0.5 * (x - y) ** 2)
        * special.erfc((x + y) / math.sqrt(2.0))
    )


def t_shifted_closed(t: float, x: ArrayLike, y: ArrayLike):
    """T_t(x, y) = T(x + t, y + t); equals the composition of S_t with itself."""
    return t_kernel(np.asarray(x, dtype=float) + t, np.asarray(y, dtype=float) + t)


def t_shifted_dt(t: float, x: ArrayLike, y: ArrayLike):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return -np.exp(-((x + t) ** 2) - (y + t) ** 2) / math.pi


def gaussian_density(x: ArrayLike):
    """g(x) = exp(-x^2) / sqrt(pi)."""
    return INV_SQRT_PI * np.exp(-(np.asarray(x, dtype=float) ** 2))


def gaussian_cdf(x: ArrayLike):
    """G(x) = int_{-oo}^x g."""
    return 0.5 * special.erfc(-np.asarray(x, dtype=float))


def gaussian_sf(x: ArrayLike):
    """1 - G(x), computed without cancellation."""
    return 0.5 * special.erfc(np.asarray(x, dtype=float))


class KernelKind(str, Enum):
    S_SHIFTED = "S_SHIFTED"
    T_SHIFTED = "T_SHIFTED"


class KernelSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: KernelKind
    t: float

    @field_validator("t")
    def validate_t(cls, value):
        if not math.isfinite(value):
            raise ValueError(f"t is expected to be finite, but got {value}")
        return value

    def evaluate(self, x: ArrayLike, y: ArrayLike):
        if self.kind is KernelKind.S_SHIFTED:
            return s_shifted(self.t, x, y)
        return t_shifted_closed(self.t, x, y)

    def evaluate_dt(self, x: ArrayLike, y: ArrayLike):
        if self.kind is KernelKind.S_SHIFTED:
            return s_shifted_dt(self.t, x, y)
        return t_shifted_dt(self.t, x, y)

    def matrix(self, nodes: np.ndarray) -> np.ndarray:
        return self.evaluate(nodes[:, None], nodes[None, :])

    def matrix_dt(self, nodes: np.ndarray) -> np.ndarray:
        return self.evaluate_dt(nodes[:, None], nodes[None, :])
