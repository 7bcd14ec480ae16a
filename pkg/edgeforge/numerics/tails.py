"""Right and left tail asymptotics of P(t; gamma) and their constants."""

import logging
import math
from functools import lru_cache

import numpy as np
from scipy import integrate, signal, special

from edgeforge.numerics.specfun import PolylogOrder, erfc, polylog
from edgeforge.utils.constants import DEFAULT_SERIES_TERMS, LEFT_TAIL_THRESHOLD
from edgeforge.utils.errors import ConvergenceError, DomainError, ParameterError
from edgeforge.utils.models import TailCoefficients

logger = logging.getLogger(__name__)

MIN_SERIES_TERMS = 100
SERIES_TOL = 1e-8
MAX_TAIL_TERMS = 10_000_000
C1_PREFACTOR = 1.0 / (2.0 * math.sqrt(2.0 * math.pi))


def _gamma_bar(gamma: float) -> float:
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma is expected to be in [0, 1], but got {gamma}")
    return gamma * (2.0 - gamma)


def right_tail(t: float, gamma: float) -> float:
    """1 - (gamma / 4) erfc(t)."""
    return 1.0 - 0.25 * gamma * erfc(t)


def c1(gamma: float) -> float:
    return C1_PREFACTOR * polylog(PolylogOrder.THREE_HALVES, _gamma_bar(gamma))


def _c0_integrand(x: float) -> float:
    if x == 0.0:
        return -math.pi
    li = polylog(PolylogOrder.HALF, x)
    return (li * li - math.pi * x / (1.0 - x)) / x


def c0_integral(gamma: float) -> float:
    """c0 from its integral representation; gamma = 1 is only reachable by series."""
    gamma_bar = _gamma_bar(gamma)
    if gamma == 1.0:
        raise DomainError("c0_integral is singular at gamma = 1, use c0_series")
    if gamma_bar == 0.0:
        return 0.0
    value, abserr = integrate.quad(
        _c0_integrand, 0.0, gamma_bar, epsabs=1e-13, epsrel=1e-12, limit=200
    )
    if not math.isfinite(value) or abserr > 1e-10:
        raise ConvergenceError(
            f"c0 integral did not converge at gamma={gamma} (error estimate {abserr:.3g})",
            last=value,
        )
    return 0.5 * math.log(2.0 / (2.0 - gamma)) + value / (4.0 * math.pi)


@lru_cache(maxsize=8)
def _a_coefficients(n_max: int) -> np.ndarray:
    root = np.zeros(n_max + 1)
    root[1:] = 1.0 / np.sqrt(np.arange(1, n_max + 1, dtype=float))
    # (root * root)[n] = sum_{m=1}^{n-1} (m (n - m))^{-1/2}
    inner = signal.fftconvolve(root, root)[: n_max + 1]
    coefficients = inner[1:] - math.pi
    coefficients[0] = -math.pi
    coefficients.setflags(write=False)
    return coefficients


def a_coefficients(n_max: int = DEFAULT_SERIES_TERMS) -> np.ndarray:
    """a_n = -pi + sum_{m=1}^{n-1} (m (n - m))^{-1/2} for n = 1..n_max."""
    if n_max < 1:
        raise ParameterError(f"n_max is expected to be positive, but got {n_max}")
    return _a_coefficients(int(n_max))


def _fit_asymptotics(a: np.ndarray, lo: int, hi: int) -> tuple[float, float]:
    """Least-squares a_n ~ c1 n^{-1/2} + c3 n^{-3/2} on lo <= n <= hi."""
    n = np.arange(lo, hi + 1, dtype=float)
    design = np.column_stack([n**-0.5, n**-1.5])
    (coef_half, coef_three_halves), *_ = np.linalg.lstsq(design, a[lo - 1 : hi], rcond=None)
    return float(coef_half), float(coef_three_halves)


def _asymptotic_tail(coef: tuple[float, float], n_max: int, gamma_bar: float) -> float:
    """sum_{n > n_max} (c1 n^{-3/2} + c3 n^{-5/2}) gamma_bar^n."""
    coef_half, coef_three_halves = coef
    if gamma_bar == 1.0:
        return coef_half * float(special.zeta(1.5, n_max + 1)) + coef_three_halves * float(
            special.zeta(2.5, n_max + 1)
        )
    extra = math.ceil(math.log(1e-18) / math.log(gamma_bar))
    if extra > MAX_TAIL_TERMS:
        raise ConvergenceError(
            f"gamma_bar={gamma_bar} is too close to 1 for n_max={n_max}; increase n_max"
        )
    n = np.arange(n_max + 1, n_max + extra + 1, dtype=float)
    weights = np.exp(n * math.log(gamma_bar))
    return float(np.sum((coef_half * n**-1.5 + coef_three_halves * n**-2.5) * weights))


def _series_tail(a: np.ndarray, gamma_bar: float, tol: float) -> float:
    n_max = a.size
    if gamma_bar < 1.0:
        bound = math.pi * gamma_bar ** (n_max + 1) / ((n_max + 1) * (1.0 - gamma_bar))
        if bound / (4.0 * math.pi) <= tol:
            return 0.0
    fine = _fit_asymptotics(a, n_max // 2, n_max)
    coarse = _fit_asymptotics(a, n_max // 4, n_max // 2)
    tail = _asymptotic_tail(fine, n_max, gamma_bar)
    error = abs(tail - _asymptotic_tail(coarse, n_max, gamma_bar))
    logger.debug(
        "c0 tail extrapolated: gamma_bar=%g tail=%.3g error=%.3g", gamma_bar, tail, error
    )
    if error / (4.0 * math.pi) > tol:
        raise ConvergenceError(
            f"n_max={n_max} is insufficient for tol={tol} at gamma_bar={gamma_bar}",
            last=tail,
        )
    return tail


def c0_series(
    gamma: float, n_max: int = DEFAULT_SERIES_TERMS, tol: float = SERIES_TOL
) -> float:
    """c0 = ln(2/(2-gamma))/2 + (1/4pi) sum_n a_n gamma_bar^n / n with a tail estimate."""
    gamma_bar = _gamma_bar(gamma)
    if n_max < MIN_SERIES_TERMS:
        raise ParameterError(
            f"n_max is expected to be at least {MIN_SERIES_TERMS}, but got {n_max}"
        )
    if gamma_bar == 0.0:
        return 0.0
    a = a_coefficients(n_max)
    n = np.arange(1, n_max + 1, dtype=float)
    terms = a / n * np.exp(n * math.log(gamma_bar))
    partial = float(np.sum(terms[::-1]))
    total = partial + _series_tail(a, gamma_bar, tol)
    return 0.5 * math.log(2.0 / (2.0 - gamma)) + total / (4.0 * math.pi)


def left_tail(t: float, gamma: float, n_max: int = DEFAULT_SERIES_TERMS) -> float:
    """exp(c1 t + c0)."""
    return math.exp(c1(gamma) * t + c0_series(gamma, n_max))


def left_tail_start(
    gamma: float,
    threshold: float = LEFT_TAIL_THRESHOLD,
    n_max: int = DEFAULT_SERIES_TERMS,
) -> float:
    """t at which the left tail asymptotics reaches the given threshold."""
    slope = c1(gamma)
    if slope == 0.0:
        raise DomainError("left tail is flat at gamma = 0")
    return (math.log(threshold) - c0_series(gamma, n_max)) / slope


def coefficients(gamma: float, n_max: int = DEFAULT_SERIES_TERMS) -> TailCoefficients:
    return TailCoefficients(
        gamma=gamma,
        c1=c1(gamma),
        c0_integral=None if gamma == 1.0 else c0_integral(gamma),
        c0_series=c0_series(gamma, n_max),
        n_terms=n_max,
    )
