"""Distribution-level API for the edge law P(t; gamma).

P(t; gamma) = A e^{L+} + B e^{L-}, with L-/+ = log det(1 -/+ sqrt(gamma_bar) S_t),
A = sqrt((1 - sqrt(gamma_bar)) / (2 (2 - gamma))) and
B = sqrt((1 + sqrt(gamma_bar)) / (2 (2 - gamma))).
"""

import logging
import math
from functools import partial

import numpy as np
from numpy.polynomial import Chebyshev

from edgeforge.numerics import fredholm, tails
from edgeforge.numerics.kernels import KernelKind, KernelSpec
from edgeforge.numerics.quadrature import QuadratureRule, composite
from edgeforge.utils.constants import DEFAULT_QUAD_POINTS, LEFT_TAIL_THRESHOLD
from edgeforge.utils.errors import (
    DegenerateLawError,
    DomainError,
    NumericalConsistencyError,
    NumericalError,
    ParameterError,
)
from edgeforge.utils.helper import ordered_map
from edgeforge.utils.models import EdgeLawPoint, MomentSummary

logger = logging.getLogger(__name__)

CLIP_TOL = 1e-8
DERIVATIVE_STEP = 1e-3
LAMBDA_WINDOW = (0.75, 1.0)
LAMBDA_NODES = 12
LAMBDA_DEGREE = 8
MAX_ORDER = 4
MOMENT_RIGHT_END = 8.0
MOMENT_SPLIT = -20.0
MOMENT_PANEL_NEAR = 2.0
MOMENT_PANEL_FAR = 6.0
MOMENT_PANEL_NODES = 12


def gamma_bar(gamma: float) -> float:
    """gamma (2 - gamma)."""
    if not (math.isfinite(gamma) and 0.0 <= gamma <= 1.0):
        raise DomainError(f"gamma is expected to be in [0, 1], but got {gamma}")
    return gamma * (2.0 - gamma)


def mixture_weights(gamma: float) -> tuple[float, float]:
    """(A, B) multiplying det(1 + sqrt(gamma_bar) S_t) and det(1 - sqrt(gamma_bar) S_t)."""
    root = math.sqrt(gamma_bar(gamma))
    denominator = 2.0 * (2.0 - gamma)
    return math.sqrt((1.0 - root) / denominator), math.sqrt((1.0 + root) / denominator)


def _clip_unit(value: float, what: str, t: float) -> float:
    if value < -CLIP_TOL or value > 1.0 + CLIP_TOL:
        raise NumericalConsistencyError(f"{what}={value} is outside [0, 1] at t={t}")
    if value < 0.0 or value > 1.0:
        logger.warning("clipping %s=%.3g into [0, 1] at t=%g", what, value, t)
    return min(1.0, max(0.0, value))


def evaluate(
    t: float,
    gamma: float,
    m: int = DEFAULT_QUAD_POINTS,
    with_pdf: bool = False,
    tol: float | None = None,
) -> EdgeLawPoint:
    """P(t; gamma), optionally with its density; tol refines the rule for t < -8."""
    if not math.isfinite(t):
        raise ParameterError(f"t is expected to be finite, but got {t}")
    g_bar = gamma_bar(gamma)
    if g_bar == 0.0:
        return EdgeLawPoint(
            t=t,
            gamma=gamma,
            gamma_bar=g_bar,
            logdet_minus=0.0,
            logdet_plus=0.0,
            mu=0.0,
            cdf=1.0,
            pdf=0.0 if with_pdf else None,
        )

    minus, plus = fredholm.build_pair(t, g_bar, m, tol=tol)
    weight_plus, weight_minus = mixture_weights(gamma)
    det_plus = math.exp(plus.logabsdet)
    det_minus = math.exp(minus.logabsdet)
    cdf_value = weight_plus * det_plus + weight_minus * det_minus

    pdf_value = None
    if with_pdf:
        pdf_value = (
            weight_plus * det_plus * plus.logdet_dt()
            + weight_minus * det_minus * minus.logdet_dt()
        )
        if pdf_value < 0.0:
            if pdf_value < -CLIP_TOL:
                raise NumericalConsistencyError(f"pdf={pdf_value} is negative at t={t}")
            logger.warning("clipping pdf=%.3g to 0 at t=%g, gamma=%g", pdf_value, t, gamma)
            pdf_value = 0.0

    return EdgeLawPoint(
        t=t,
        gamma=gamma,
        gamma_bar=g_bar,
        logdet_minus=minus.logabsdet,
        logdet_plus=plus.logabsdet,
        mu=plus.logabsdet - minus.logabsdet,
        cdf=_clip_unit(cdf_value, "cdf", t),
        pdf=pdf_value,
    )


def cdf(
    t: float, gamma: float, m: int = DEFAULT_QUAD_POINTS, tol: float | None = None
) -> EdgeLawPoint:
    return evaluate(t, gamma, m, tol=tol)


def pdf(
    t: float, gamma: float, m: int = DEFAULT_QUAD_POINTS, tol: float | None = None
) -> float:
    point = evaluate(t, gamma, m, with_pdf=True, tol=tol)
    return float(point.pdf or 0.0)


def mu(t: float, gamma_bar: float, m: int = DEFAULT_QUAD_POINTS) -> float:
    """log det(1 + sqrt(gamma_bar) S_t) - log det(1 - sqrt(gamma_bar) S_t)."""
    if gamma_bar == 1.0 and t < -8.0:
        logger.warning("mu at gamma_bar=1 is near-singular for t=%g", t)
    logdet_minus, logdet_plus = fredholm.det_pair(t, gamma_bar, m)
    return logdet_plus - logdet_minus


def cdf_via_mu(t: float, gamma: float, m: int = DEFAULT_QUAD_POINTS) -> float:
    """P from sqrt(det(1 - gamma_bar T_t)) and the cosh/sinh form in mu."""
    g_bar = gamma_bar(gamma)
    if g_bar == 0.0:
        return 1.0
    mu_value = mu(t, g_bar, m)
    radicand = (
        gamma - 1.0 - math.cosh(mu_value) + math.sqrt(g_bar) * math.sinh(mu_value)
    ) / (gamma - 2.0)
    value = math.exp(0.5 * fredholm.logdet_t(t, g_bar, m)) * math.sqrt(max(radicand, 0.0))
    return _clip_unit(value, "cdf_via_mu", t)


def _logdet_t_dt(t: float, a: float, m: int) -> float:
    kernel = KernelSpec(kind=KernelKind.T_SHIFTED, t=t)
    return fredholm.build(kernel, a, m).logdet_dt()


def y_abs(
    x: float, a: float, m: int = DEFAULT_QUAD_POINTS, h: float = DERIVATIVE_STEP
) -> float:
    """|y(x; a)| from |y(t/2; a)|^2 = -4 d^2/dt^2 log det(1 - a T_t) at t = 2x."""
    if not 0.0 <= a <= 1.0:
        raise ParameterError(f"a is expected to be in [0, 1], but got {a}")
    if a == 0.0:
        return 0.0
    t = 2.0 * x

    def central(step: float) -> float:
        return (_logdet_t_dt(t + step, a, m) - _logdet_t_dt(t - step, a, m)) / (2.0 * step)

    # Richardson on the central difference of the analytic first derivative
    second = (4.0 * central(0.5 * h) - central(h)) / 3.0
    scale = max(1.0, abs(_logdet_t_dt(t, a, m)))
    if second > 1e-9 * scale:
        raise NumericalConsistencyError(
            f"d^2/dt^2 log det(1 - a T_t) = {second:.3g} is positive at t={t}, a={a}"
        )
    return math.sqrt(max(-4.0 * second, 0.0))


def generating_function(t: float, lam: float, m: int = DEFAULT_QUAD_POINTS) -> float:
    """E((t, oo); lambda) = sum_m E(m; (t, oo)) (1 - lambda)^m, which equals P(t; lambda)."""
    if not 0.0 <= lam <= 1.0:
        raise ParameterError(f"lambda is expected to be in [0, 1], but got {lam}")
    return evaluate(t, lam, m).cdf


def _lambda_nodes(count: int = LAMBDA_NODES) -> np.ndarray:
    lo, hi = LAMBDA_WINDOW
    k = np.arange(count)
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos((2 * k + 1) * np.pi / (2 * count))


def mth_largest_cdfs(
    order: int, t: float, m: int = DEFAULT_QUAD_POINTS, degree: int = LAMBDA_DEGREE
) -> list[float]:
    """[F_1(t), ..., F_order(t)] for the k-th largest real eigenvalues.

    F_{k+1} - F_k = ((-1)^k / k!) d^k/dlambda^k E((t, oo); lambda) at lambda = 1,
    with the derivatives taken from one Chebyshev least-squares fit on [0.75, 1].
    """
    if not 1 <= order <= MAX_ORDER:
        raise ParameterError(f"order is expected to be in [1, {MAX_ORDER}], but got {order}")
    first = generating_function(t, 1.0, m)
    if order == 1:
        return [first]

    lambdas = _lambda_nodes()
    values = np.array([generating_function(t, float(lam), m) for lam in lambdas])
    fit, (_, rank, _, _) = Chebyshev.fit(
        lambdas, values, degree, domain=list(LAMBDA_WINDOW), full=True
    )
    if rank < degree + 1:
        raise NumericalError(
            f"lambda fit is rank deficient ({rank} < {degree + 1}) at t={t}"
        )

    laws = [first]
    total = first
    for k in range(1, order):
        total += (-1) ** k / math.factorial(k) * float(fit.deriv(k)(1.0))
        laws.append(_clip_unit(total, f"F_{k + 1}", t))
    return laws


def mth_largest_cdf(
    order: int, t: float, m: int = DEFAULT_QUAD_POINTS, degree: int = LAMBDA_DEGREE
) -> float:
    """F_order(t), the law of the order-th largest real eigenvalue."""
    return mth_largest_cdfs(order, t, m, degree)[-1]


def mth_largest_grid(
    order: int, ts: np.ndarray, m: int = DEFAULT_QUAD_POINTS, workers: int = 1
) -> np.ndarray:
    """Rows (F_1(t), ..., F_order(t)) for every t."""
    rows = ordered_map(partial(_mth_row, order, m), list(ts), workers)
    return np.array(rows, dtype=float).reshape(len(ts), order)


def _mth_row(order: int, m: int, t: float) -> list[float]:
    return mth_largest_cdfs(order, float(t), m)


def _cdf_at(gamma: float, m: int, tol: float | None, t: float) -> float:
    return evaluate(float(t), gamma, m, tol=tol).cdf


def _pdf_at(gamma: float, m: int, tol: float | None, t: float) -> float:
    return pdf(float(t), gamma, m, tol)


def cdf_grid(
    ts: np.ndarray,
    gamma: float,
    m: int = DEFAULT_QUAD_POINTS,
    workers: int = 1,
    tol: float | None = None,
) -> np.ndarray:
    return np.array(ordered_map(partial(_cdf_at, gamma, m, tol), list(ts), workers))


def pdf_grid(
    ts: np.ndarray,
    gamma: float,
    m: int = DEFAULT_QUAD_POINTS,
    workers: int = 1,
    tol: float | None = None,
) -> np.ndarray:
    return np.array(ordered_map(partial(_pdf_at, gamma, m, tol), list(ts), workers))


def moment_breakpoints(t_min: float, t_max: float = MOMENT_RIGHT_END) -> np.ndarray:
    """Panel edges: wide panels left of -20, width-2 panels on the bulk."""
    split = max(MOMENT_SPLIT, t_min)
    far_panels = math.ceil((split - t_min) / MOMENT_PANEL_FAR) if split > t_min else 0
    near_panels = math.ceil((t_max - split) / MOMENT_PANEL_NEAR)
    far = np.linspace(t_min, split, far_panels + 1) if far_panels else np.array([split])
    near = np.linspace(split, t_max, near_panels + 1)
    return np.concatenate([far[:-1], near])


def _moment_density(
    rule: QuadratureRule, gamma: float, m: int, workers: int
) -> np.ndarray:
    """pdf on the rule nodes.

    Left of fredholm.RESOLVABLE_FROM the tail density c1 exp(c1 t + c0) stands in.
    """
    far = rule.nodes < fredholm.RESOLVABLE_FROM
    density = np.empty_like(rule.nodes)
    density[~far] = pdf_grid(rule.nodes[~far], gamma, m, workers)
    if np.any(far):
        slope = tails.c1(gamma)
        density[far] = slope * np.exp(slope * rule.nodes[far] + tails.c0_series(gamma))
        logger.info(
            "moments gamma=%g: left tail asymptote used on %d nodes below t=%g, mass %.3g",
            gamma,
            int(np.count_nonzero(far)),
            fredholm.RESOLVABLE_FROM,
            rule.integrate(np.where(far, density, 0.0)),
        )
    return density


def moments(
    gamma: float, m: int = DEFAULT_QUAD_POINTS, workers: int = 1
) -> MomentSummary:
    """Mean, variance, skewness and (raw) kurtosis of P(.; gamma)."""
    if gamma_bar(gamma) == 0.0:
        raise DegenerateLawError("the gamma = 0 law has no finite moments")

    t_min = tails.left_tail_start(gamma, LEFT_TAIL_THRESHOLD)
    rule = composite(moment_breakpoints(t_min), MOMENT_PANEL_NODES)
    logger.debug("moments gamma=%g on [%g, %g] with %d nodes", gamma, t_min, MOMENT_RIGHT_END, rule.size)

    density = _moment_density(rule, gamma, m, workers)
    mass = rule.integrate(density)
    mean = rule.integrate(rule.nodes * density) / mass
    centered = rule.nodes - mean
    variance = rule.integrate(centered**2 * density) / mass
    third = rule.integrate(centered**3 * density) / mass
    fourth = rule.integrate(centered**4 * density) / mass
    return MomentSummary(
        gamma=gamma,
        mean=mean,
        variance=variance,
        skewness=third / variance**1.5,
        kurtosis=fourth / variance**2,
        mass=mass,
    )
