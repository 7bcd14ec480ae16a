"""Scalar special functions used by the tail formulas.

``erfc`` delegates to :func:`scipy.special.erfc`. The polylogarithm is only
needed at orders 1/2 and 3/2 on [0, 1]: a plain power series is used away
from x = 1 and the expansion about x = 1 in powers of ln x close to it.
"""

import logging
import math
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from numpy.typing import ArrayLike
from scipy import special

from edgeforge.utils.errors import DivergenceError, DomainError

logger = logging.getLogger(__name__)

SERIES_CUTOFF = 0.8
EXPANSION_TERMS = 12


class PolylogOrder(Enum):
    HALF = Fraction(1, 2)
    THREE_HALVES = Fraction(3, 2)

    @property
    def s(self) -> float:
        return float(self.value)

    @classmethod
    def from_value(cls, s: "PolylogOrder | Fraction | float | str") -> "PolylogOrder":
        if isinstance(s, cls):
            return s
        try:
            order = Fraction(s).limit_denominator(16)
        except (TypeError, ValueError):
            raise DomainError(f"polylog order is expected to be 1/2 or 3/2, but got {s!r}")
        for member in cls:
            if member.value == order:
                return member
        raise DomainError(f"polylog order is expected to be 1/2 or 3/2, but got {s}")


def erfc(x: ArrayLike) -> float | np.ndarray:
    """Complementary error function; underflows to 0 for large positive x."""
    values = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError(f"erfc expects finite input, but got {x}")
    result = special.erfc(values)
    if result.ndim == 0:
        return float(result)
    return result


@lru_cache(maxsize=None)
def zeta_three_halves() -> float:
    return float(special.zeta(1.5))


@lru_cache(maxsize=None)
def _zeta(s: float) -> float:
    # scipy's Riemann zeta is unreliable below 1; mpmath covers the negative half-integers
    return float(mpmath.zeta(s))


def _polylog_series(s: float, x: float) -> float:
    if x == 0.0:
        return 0.0
    n_terms = int(math.ceil(math.log(1e-18) / math.log(x))) + 8
    n = np.arange(1, n_terms + 1, dtype=float)
    # accumulate smallest terms first
    terms = np.exp(n * math.log(x) - s * np.log(n))
    return float(np.sum(terms[::-1]))


def _polylog_near_one(s: float, x: float) -> float:
    mu = math.log(x)
    value = math.gamma(1.0 - s) * (-mu) ** (s - 1.0)
    power = 1.0
    for k in range(EXPANSION_TERMS + 1):
        if k > 0:
            power *= mu / k
        value += _zeta(s - k) * power
    return value


def polylog(s: PolylogOrder | Fraction | float, x: float) -> float:
    """Li_s(x) = sum_{n>=1} x^n / n^s for s in {1/2, 3/2} and 0 <= x <= 1."""
    order = PolylogOrder.from_value(s)
    if not math.isfinite(x) or x < 0.0 or x > 1.0:
        raise DomainError(f"polylog argument is expected to be in [0, 1], but got {x}")

    if x == 1.0:
        if order is PolylogOrder.HALF:
            raise DivergenceError("Li_{1/2}(1) diverges")
        return zeta_three_halves()
    if x <= SERIES_CUTOFF:
        return _polylog_series(order.s, x)
    return _polylog_near_one(order.s, x)
