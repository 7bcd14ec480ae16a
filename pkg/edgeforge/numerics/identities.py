"""Numerical oracles for the operator and integral identities behind the edge law.

Every check evaluates both sides independently and returns an
:class:`IdentityReport`. Functions on the whole line are split into the
Nystrom grid on [t, t + U(t)] and a Gauss-Legendre grid on (t - 14, t) to
the left of the edge.
"""

import logging
import math
from enum import Enum
from functools import partial
from typing import Callable, Literal

import numpy as np

from edgeforge.numerics import edgelaw, fredholm
from edgeforge.numerics.kernels import (
    KernelKind,
    KernelSpec,
    gaussian_cdf,
    gaussian_density,
    gaussian_sf,
    t_kernel,
)
from edgeforge.numerics.quadrature import affine_map, gauss_legendre
from edgeforge.utils.constants import DEFAULT_QUAD_POINTS, MAX_QUAD_POINTS
from edgeforge.utils.errors import ParameterError
from edgeforge.utils.helper import ordered_map
from edgeforge.utils.models import IdentityReport

logger = logging.getLogger(__name__)

LEFT_WIDTH = 14.0
LEFT_NODES = 96
CONTOUR_HALF_WIDTH = 12.0
CONTOUR_MIN_NODES = 200

TOL_FACTORIZATION = 1e-10
TOL_CDF_FORMS = 1e-10
TOL_GENERATING = 1e-9
TOL_RESOLVENT = 1e-8
TOL_TAU = 1e-7
TOL_TAU_PRODUCT = 1e-10
TOL_MU_LIMIT = 1e-3
TOL_KERNEL_POWERS = 1e-6
TOL_CONTOUR = 1e-8


class Interval(str, Enum):
    POSITIVE_HALF = "POSITIVE_HALF"
    NEGATIVE_HALF = "NEGATIVE_HALF"


class PowerIdentity(str, Enum):
    SHIFTED_INTERVAL = "SHIFTED_INTERVAL"
    TOTAL_MASS = "TOTAL_MASS"


class _LineGrid:
    """Nystrom system for 1 - gamma_bar T chi_t on [t, oo) plus a left grid below t."""

    def __init__(self, t: float, gamma_bar: float, m: int) -> None:
        self.t = t
        self.gamma_bar = gamma_bar
        kernel = KernelSpec(kind=KernelKind.T_SHIFTED, t=t)
        self.system = fredholm.build(kernel, gamma_bar, m)
        self.right_nodes = t + self.system.rule.nodes
        self.right_weights = self.system.rule.weights
        left = affine_map(gauss_legendre(LEFT_NODES), t - LEFT_WIDTH, t)
        self.left_nodes = left.nodes
        self.left_weights = left.weights

    def _shifted_kernel(self, x: np.ndarray, s: np.ndarray) -> np.ndarray:
        # x absolute, s in half-line coordinates of the Nystrom rule
        return t_kernel(x, s + self.t)

    def solve(self, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Values of (1 - gamma_bar T chi_t)^{-1} f on the right grid."""
        return self.system.resolvent_apply(lambda s: f(s + self.t))

    def extend(
        self,
        f: Callable[[np.ndarray], np.ndarray],
        right_values: np.ndarray,
        points: np.ndarray,
    ) -> np.ndarray:
        """h(x) = f(x) + gamma_bar int_t^oo T(x, y) h(y) dy at arbitrary x."""
        return self.system.interpolate(self._shifted_kernel, f, right_values, points)

    def integrate_right(self, values: np.ndarray) -> float:
        return float(np.dot(self.right_weights, values))

    def integrate_left(self, values: np.ndarray) -> float:
        return float(np.dot(self.left_weights, values))

    def transfer(self) -> np.ndarray:
        """Matrix of T(x_i, x_j) w_j on the right grid."""
        return t_kernel(self.right_nodes[:, None], self.right_nodes[None, :]) * self.right_weights[None, :]


def _params(**values: float) -> dict[str, float]:
    return {key: float(value) for key, value in values.items()}


def check_factorization(
    t: float, gamma: float, m: int = DEFAULT_QUAD_POINTS
) -> IdentityReport:
    """det(1 - gamma_bar T_t) = det(1 - sqrt(gamma_bar) S_t) det(1 + sqrt(gamma_bar) S_t)."""
    g_bar = edgelaw.gamma_bar(gamma)
    logdet_minus, logdet_plus = fredholm.det_pair(t, g_bar, m)
    return IdentityReport(
        name="factorization",
        lhs=math.exp(fredholm.logdet_t(t, g_bar, m)),
        rhs=math.exp(logdet_minus + logdet_plus),
        params=_params(t=t, gamma=gamma),
        tolerance=TOL_FACTORIZATION,
    )


def check_cdf_forms(t: float, gamma: float, m: int = DEFAULT_QUAD_POINTS) -> IdentityReport:
    """Convex combination of two determinants against the cosh/sinh form in mu."""
    return IdentityReport(
        name="cdf_forms",
        lhs=edgelaw.cdf(t, gamma, m).cdf,
        rhs=edgelaw.cdf_via_mu(t, gamma, m),
        params=_params(t=t, gamma=gamma),
        tolerance=TOL_CDF_FORMS,
        metric="absolute",
    )


def check_generating_function(
    t: float, lam: float, m: int = DEFAULT_QUAD_POINTS
) -> IdentityReport:
    """E((t, oo); lambda) rebuilt from det(1 - lambda_bar T_t), mu and the radical."""
    lam_bar = edgelaw.gamma_bar(lam)
    if lam_bar == 0.0:
        rebuilt = 1.0
    else:
        mu_value = edgelaw.mu(t, lam_bar, m)
        radicand = (
            lam - 1.0 - math.cosh(mu_value) + math.sqrt(lam_bar) * math.sinh(mu_value)
        ) / (lam - 2.0)
        rebuilt = math.sqrt(math.exp(fredholm.logdet_t(t, lam_bar, m)) * max(radicand, 0.0))
    return IdentityReport(
        name="generating_function",
        lhs=rebuilt,
        rhs=edgelaw.generating_function(t, lam, m),
        params=_params(t=t, gamma=lam),
        tolerance=TOL_GENERATING,
        metric="absolute",
    )


def check_resolvent_identities(
    t: float, gamma: float, m: int = DEFAULT_QUAD_POINTS
) -> list[IdentityReport]:
    """The four resolvent identities with g, G and R = gamma_bar T chi_t (1 - gamma_bar chi_t T chi_t)^{-1}."""
    g_bar = edgelaw.gamma_bar(gamma)
    grid = _LineGrid(t, g_bar, m)
    params = _params(t=t, gamma=gamma)

    h_g = grid.solve(gaussian_density)
    h_g_left = grid.extend(gaussian_density, h_g, grid.left_nodes)
    h_big_g = grid.solve(gaussian_cdf)

    def source(x: np.ndarray) -> np.ndarray:
        return g_bar * t_kernel(x, t)

    resolvent = grid.solve(source)
    resolvent_left = grid.extend(source, resolvent, grid.left_nodes)

    # (1 - gamma_bar T chi_t)^{-1} G at the edge, by Nystrom extension
    h_big_g_at_t = float(grid.extend(gaussian_cdf, h_big_g, np.array([t]))[0])
    # g integrates in closed form; the correction decays within the left grid
    below_edge = float(gaussian_cdf(t)) + grid.integrate_left(
        h_g_left - gaussian_density(grid.left_nodes)
    )
    right_mass = grid.integrate_right(resolvent)
    left_mass = grid.integrate_left(resolvent_left)

    reports = [
        IdentityReport(
            name="resolvent_edge_value",
            lhs=h_big_g_at_t,
            rhs=below_edge,
            params=params,
            tolerance=TOL_RESOLVENT,
        ),
        IdentityReport(
            name="resolvent_right_mass",
            lhs=right_mass,
            rhs=g_bar * grid.integrate_right(gaussian_sf(grid.right_nodes) * h_g),
            params=params,
            tolerance=TOL_RESOLVENT,
        ),
        IdentityReport(
            name="resolvent_left_mass",
            lhs=left_mass,
            rhs=g_bar * grid.integrate_right(gaussian_cdf(grid.right_nodes) * h_g),
            params=params,
            tolerance=TOL_RESOLVENT,
        ),
        IdentityReport(
            name="resolvent_total_mass",
            lhs=1.0 + right_mass,
            rhs=below_edge + grid.integrate_right(h_g),
            params=params,
            tolerance=TOL_RESOLVENT,
        ),
    ]
    return reports


def _tau(grid: _LineGrid, h_g: np.ndarray, sign: int) -> float:
    root = math.sqrt(grid.gamma_bar)
    bracket = 1.0 + sign * root * gaussian_sf(grid.right_nodes)
    return 1.0 + sign * root * grid.integrate_right(bracket * h_g)


def tau_values(t: float, gamma: float, m: int = DEFAULT_QUAD_POINTS) -> tuple[float, float]:
    """(tau_1, tau_2) from their inner-product representation."""
    g_bar = edgelaw.gamma_bar(gamma)
    grid = _LineGrid(t, g_bar, m)
    h_g = grid.solve(gaussian_density)
    return _tau(grid, h_g, +1), _tau(grid, h_g, -1)


def check_tau_forms(t: float, gamma: float, m: int = DEFAULT_QUAD_POINTS) -> IdentityReport:
    """tau_1 as an inner product against the determinant ratio e^mu."""
    tau_1, tau_2 = tau_values(t, gamma, m)
    return IdentityReport(
        name="tau_forms",
        lhs=tau_1,
        rhs=math.exp(edgelaw.mu(t, edgelaw.gamma_bar(gamma), m)),
        params=_params(t=t, gamma=gamma, tau_product=tau_1 * tau_2),
        tolerance=TOL_TAU,
    )


def check_tau_product(t: float, gamma: float, m: int = DEFAULT_QUAD_POINTS) -> IdentityReport:
    tau_1, tau_2 = tau_values(t, gamma, m)
    return IdentityReport(
        name="tau_product",
        lhs=tau_1 * tau_2,
        rhs=1.0,
        params=_params(t=t, gamma=gamma),
        tolerance=TOL_TAU_PRODUCT,
        metric="absolute",
    )


def check_mu_limit(
    gamma_bar: float, t: float = -12.0, m: int = DEFAULT_QUAD_POINTS
) -> IdentityReport:
    """mu(t; gamma_bar) against its t -> -oo limit (1/2) ln((1 + r) / (1 - r)), r = sqrt(gamma_bar)."""
    if not 0.0 <= gamma_bar < 1.0:
        raise ParameterError(f"gamma_bar is expected to be in [0, 1), but got {gamma_bar}")
    root = math.sqrt(gamma_bar)
    return IdentityReport(
        name="mu_limit",
        lhs=edgelaw.mu(t, gamma_bar, m),
        rhs=0.5 * math.log((1.0 + root) / (1.0 - root)),
        params=_params(t=t, gamma_bar=gamma_bar),
        tolerance=TOL_MU_LIMIT,
        metric="absolute",
    )


def check_kernel_powers(
    k: int,
    t: float,
    gamma_bar: float,
    interval: Interval = Interval.POSITIVE_HALF,
    identity: PowerIdentity = PowerIdentity.SHIFTED_INTERVAL,
    m: int = DEFAULT_QUAD_POINTS,
) -> IdentityReport:
    """k-th power identities for K = T (phi = psi = g), both sides scaled by gamma_bar^k.

    SHIFTED_INTERVAL: int_I (T chi_t)^k (x + t, t) dx = int_t^oo Phi(u) ((T chi_t)^{k-1} g)(u) du
    with Phi = 1 - G for I = (0, oo) and Phi = G for I = (-oo, 0).
    TOTAL_MASS: int ((T chi_t)^k g)(x) dx = int_0^oo (T chi_t)^k (t, u + t) du.
    """
    if not 1 <= k <= 3:
        raise ParameterError(f"k is expected to be in [1, 3], but got {k}")
    if not 0.0 <= gamma_bar <= 1.0:
        raise ParameterError(f"gamma_bar is expected to be in [0, 1], but got {gamma_bar}")

    grid = _LineGrid(t, 0.0, m)
    transfer = grid.transfer()
    powered = np.linalg.matrix_power(transfer, k - 1)
    x_right, w_right = grid.right_nodes, grid.right_weights
    x_left = grid.left_nodes
    g_right = gaussian_density(x_right)

    if identity is PowerIdentity.SHIFTED_INTERVAL:
        # v_k(x) = (T chi_t)^k (x, t) for x on the right grid
        v_right = powered @ t_kernel(x_right, t)
        if interval is Interval.POSITIVE_HALF:
            lhs = grid.integrate_right(v_right)
            phi = gaussian_sf(x_right)
        else:
            if k == 1:
                v_left = t_kernel(x_left, t)
            else:
                previous = np.linalg.matrix_power(transfer, k - 2) @ t_kernel(x_right, t)
                v_left = t_kernel(x_left[:, None], x_right[None, :]) @ (w_right * previous)
            lhs = grid.integrate_left(v_left)
            phi = gaussian_cdf(x_right)
        rhs = grid.integrate_right(phi * (powered @ g_right))
    else:
        applied = powered @ g_right
        right_part = transfer @ applied
        left_part = t_kernel(x_left[:, None], x_right[None, :]) @ (w_right * applied)
        lhs = grid.integrate_right(right_part) + grid.integrate_left(left_part)
        # (T chi_t)^k (t, y) = T(t, .) (W T)^{k-1} and W T is the transpose of T W
        row = t_kernel(t, x_right) @ np.linalg.matrix_power(transfer.T, k - 1)
        rhs = grid.integrate_right(row)

    scale = gamma_bar**k
    return IdentityReport(
        name=f"kernel_power_{identity.value.lower()}",
        lhs=scale * lhs,
        rhs=scale * rhs,
        params=_params(
            k=k, t=t, gamma_bar=gamma_bar, negative_half=interval is Interval.NEGATIVE_HALF
        ),
        tolerance=TOL_KERNEL_POWERS,
    )


def contour_nodes(a: float, b: float, omega: float) -> tuple[float, int]:
    """Half width and node count of the tensor rule for the contour integral."""
    half_width = CONTOUR_HALF_WIDTH / math.sqrt(min(a, b))
    nodes = max(CONTOUR_MIN_NODES, math.ceil(15.0 * half_width / omega))
    return half_width, min(nodes, MAX_QUAD_POINTS)


def check_gaussian_contour(a: float, b: float, omega: float = 1.0) -> IdentityReport:
    """int_{R + i omega} int_R exp(-a l^2/2 - b s^2/2) / (s - l)^2 ds dl = -2 pi sqrt(ab) / (a + b)."""
    if not (a > 0.0 and b > 0.0 and omega > 0.0):
        raise ParameterError(f"a, b and omega must be positive, but got {a}, {b}, {omega}")
    half_width, count = contour_nodes(a, b, omega)
    rule = affine_map(gauss_legendre(count), -half_width, half_width)
    lam = rule.nodes + 1j * omega
    s = rule.nodes
    integrand = (
        np.exp(-0.5 * a * lam[:, None] ** 2 - 0.5 * b * s[None, :] ** 2)
        / (s[None, :] - lam[:, None]) ** 2
    )
    value = rule.weights @ integrand @ rule.weights
    if abs(value.imag) > 1e-6 * abs(value):
        logger.warning("contour integral has imaginary part %.3g", value.imag)
    return IdentityReport(
        name="gaussian_contour",
        lhs=float(value.real),
        rhs=-2.0 * math.pi * math.sqrt(a * b) / (a + b),
        params=_params(a=a, b=b, omega=omega, nodes=count),
        tolerance=TOL_CONTOUR,
    )


SUITE_GRIDS: dict[str, tuple[tuple[float, ...], tuple[float, ...]]] = {
    "default": ((-8.0, -4.0, -2.0, 0.0, 2.0), (0.2, 0.5, 0.8, 1.0)),
    "quick": ((-2.0, 0.0, 2.0), (0.5, 1.0)),
}
MU_LIMIT_GAMMA_BARS = (0.25, 0.5, 0.75)
KERNEL_POWER_TIMES = (-2.0, 0.0, 2.0)
KERNEL_POWER_GAMMA_BAR = 0.75
CONTOUR_CASES = ((1.0, 1.0), (2.0, 1.0), (3.0, 0.5))


def _point_checks(m: int, point: tuple[float, float]) -> list[IdentityReport]:
    t, gamma = point
    reports = [
        check_factorization(t, gamma, m),
        check_cdf_forms(t, gamma, m),
        check_generating_function(t, gamma, m),
        *check_resolvent_identities(t, gamma, m),
        check_tau_forms(t, gamma, m),
        check_tau_product(t, gamma, m),
    ]
    return reports


def _suite_tasks(
    grid: Literal["default", "quick"], m: int
) -> list[Callable[[], list[IdentityReport]]]:
    if grid not in SUITE_GRIDS:
        raise ParameterError(f"grid is expected to be one of {sorted(SUITE_GRIDS)}, but got {grid}")
    ts, gammas = SUITE_GRIDS[grid]
    tasks: list[Callable[[], list[IdentityReport]]] = [
        partial(_point_checks, m, (t, gamma)) for t in ts for gamma in gammas
    ]
    tasks += [
        partial(lambda g: [check_mu_limit(g, -12.0, m)], g) for g in MU_LIMIT_GAMMA_BARS
    ]
    for t in KERNEL_POWER_TIMES:
        for k in (1, 2, 3):
            tasks.append(
                partial(
                    lambda k, t: [
                        check_kernel_powers(k, t, KERNEL_POWER_GAMMA_BAR, Interval.POSITIVE_HALF, m=m),
                        check_kernel_powers(k, t, KERNEL_POWER_GAMMA_BAR, Interval.NEGATIVE_HALF, m=m),
                        check_kernel_powers(
                            k, t, KERNEL_POWER_GAMMA_BAR, identity=PowerIdentity.TOTAL_MASS, m=m
                        ),
                    ],
                    k,
                    t,
                )
            )
    tasks += [partial(lambda a, b: [check_gaussian_contour(a, b)], a, b) for a, b in CONTOUR_CASES]
    return tasks


def run_suite(
    grid: Literal["default", "quick"] = "default",
    m: int = DEFAULT_QUAD_POINTS,
    workers: int = 1,
) -> list[IdentityReport]:
    """All identity checks on the named grid, in a fixed order for any worker count."""
    results = ordered_map(lambda task: task(), _suite_tasks(grid, m), workers)
    reports = [report for batch in results for report in batch]
    failed = sum(not report.passed for report in reports)
    logger.info("identity suite '%s': %d checks, %d failed", grid, len(reports), failed)
    return reports
