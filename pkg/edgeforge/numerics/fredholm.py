"""Nystrom discretization of 1 - z K on the truncated half-line (0, U(t)).

The matrix is the symmetric form I - z W^{1/2} K W^{1/2}; its pivoted LU gives
log|det| and sign, and the same factorization is reused for resolvent
actions and for Jacobi's formula d/dt log det = -z tr(A^{-1} W^{1/2} K' W^{1/2}).
"""

import logging
import math
from collections.abc import Callable

import numpy as np
from scipy import linalg

from edgeforge.numerics.kernels import KernelKind, KernelSpec
from edgeforge.numerics.quadrature import (
    QuadratureRule,
    affine_map,
    gauss_legendre,
    refine_until,
)
from edgeforge.utils.constants import DEFAULT_QUAD_POINTS, MAX_QUAD_POINTS
from edgeforge.utils.errors import (
    ConvergenceError,
    ParameterError,
    PositivityViolationError,
    SingularityError,
)

logger = logging.getLogger(__name__)

TRUNCATION_MARGIN = 10.0
NODES_PER_UNIT = 5
REFINE_BELOW = -8.0
# leftmost t whose (0, U(t)) still gets NODES_PER_UNIT nodes per unit under the cap
RESOLVABLE_FROM = TRUNCATION_MARGIN - MAX_QUAD_POINTS / NODES_PER_UNIT


def truncation_bound(t: float) -> float:
    """U(t) = max(10, 10 - t)."""
    return max(TRUNCATION_MARGIN, TRUNCATION_MARGIN - t)


def nodes_for(t: float, m: int = DEFAULT_QUAD_POINTS) -> int:
    """Node count used at edge shift t: at least m, at least 5 per unit of (0, U)."""
    return min(MAX_QUAD_POINTS, max(m, math.ceil(NODES_PER_UNIT * truncation_bound(t))))


def check_resolution(t: float) -> None:
    """Raise when the node cap cannot give (0, U(t)) NODES_PER_UNIT nodes per unit."""
    bound = truncation_bound(t)
    needed = math.ceil(NODES_PER_UNIT * bound)
    if needed > MAX_QUAD_POINTS:
        raise ConvergenceError(
            f"t={t} needs {needed} nodes on (0, {bound:g}) but at most {MAX_QUAD_POINTS} "
            f"are allowed; S_t is only resolved for t >= {RESOLVABLE_FROM:g}"
        )


def half_line_rule(t: float, m: int = DEFAULT_QUAD_POINTS) -> QuadratureRule:
    check_resolution(t)
    return affine_map(gauss_legendre(nodes_for(t, m)), 0.0, truncation_bound(t))


class NystromSystem:
    """Factorized I - z W^{1/2} K W^{1/2} on a fixed rule; read-only after build."""

    def __init__(self, rule: QuadratureRule, kernel: KernelSpec, z: float) -> None:
        self.rule = rule
        self.kernel = kernel
        self.z = float(z)
        self.sqrt_weights = np.sqrt(rule.weights)
        self.weighted_kernel = (
            self.sqrt_weights[:, None]
            * kernel.matrix(rule.nodes)
            * self.sqrt_weights[None, :]
        )
        self.matrix = np.eye(rule.size) - self.z * self.weighted_kernel
        self._lu, self._piv = linalg.lu_factor(self.matrix, check_finite=True)

        pivots = np.diag(self._lu)
        if np.any(pivots == 0.0) or not np.all(np.isfinite(pivots)):
            raise SingularityError(
                f"Nystrom matrix is singular for {kernel.kind.value} at t={kernel.t}, z={z}"
            )
        swaps = np.count_nonzero(self._piv != np.arange(rule.size))
        self.sign = float((-1) ** swaps * np.prod(np.sign(pivots)))
        self.logabsdet = float(np.sum(np.log(np.abs(pivots))))

    @property
    def size(self) -> int:
        return self.rule.size

    def solve(self, values: np.ndarray) -> np.ndarray:
        return linalg.lu_solve((self._lu, self._piv), values)

    def resolvent_apply(self, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Node values of (1 - z K)^{-1} f."""
        rhs = self.sqrt_weights * np.asarray(f(self.rule.nodes), dtype=float)
        return self.solve(rhs) / self.sqrt_weights

    def interpolate(
        self,
        kernel_at: Callable[[np.ndarray, np.ndarray], np.ndarray],
        f: Callable[[np.ndarray], np.ndarray],
        node_values: np.ndarray,
        points: np.ndarray,
    ) -> np.ndarray:
        """Nystrom extension h(x) = f(x) + z sum_j w_j K(x, x_j) h_j at arbitrary x."""
        coupling = kernel_at(points[:, None], self.rule.nodes[None, :])
        return f(points) + self.z * coupling @ (self.rule.weights * node_values)

    def logdet_dt(self) -> float:
        if self.z == 0.0:
            return 0.0
        weighted_dt = (
            self.sqrt_weights[:, None]
            * self.kernel.matrix_dt(self.rule.nodes)
            * self.sqrt_weights[None, :]
        )
        return float(-self.z * np.trace(self.solve(weighted_dt)))

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(linalg.eigvalsh(self.weighted_kernel))))


def build(
    kernel: KernelSpec,
    z: float,
    m: int = DEFAULT_QUAD_POINTS,
    rule: QuadratureRule | None = None,
) -> NystromSystem:
    if m < 2:
        raise ParameterError(f"m is expected to be at least 2, but got {m}")
    if abs(z) > 1.0 + 1e-12:
        raise ParameterError(f"coupling z is expected to satisfy |z| <= 1, but got {z}")
    rule = rule if rule is not None else half_line_rule(kernel.t, m)
    system = NystromSystem(rule=rule, kernel=kernel, z=z)
    logger.debug(
        "nystrom %s t=%g z=%g nodes=%d logdet=%.16g",
        kernel.kind.value,
        kernel.t,
        z,
        rule.size,
        system.logabsdet,
    )
    return system


def _check_gamma_bar(gamma_bar: float) -> None:
    if not 0.0 <= gamma_bar <= 1.0:
        raise ParameterError(f"gamma_bar is expected to be in [0, 1], but got {gamma_bar}")


def build_pair(
    t: float,
    gamma_bar: float,
    m: int = DEFAULT_QUAD_POINTS,
    rule: QuadratureRule | None = None,
    tol: float | None = None,
) -> tuple[NystromSystem, NystromSystem]:
    """Factorized 1 - sqrt(gamma_bar) S_t and 1 + sqrt(gamma_bar) S_t on one rule.

    With tol set and t < REFINE_BELOW the node count is doubled until the
    summed log-determinants agree to tol.
    """
    _check_gamma_bar(gamma_bar)
    if rule is None and tol is not None and t < REFINE_BELOW:
        return _refined_pair(t, gamma_bar, m, tol)
    kernel = KernelSpec(kind=KernelKind.S_SHIFTED, t=t)
    rule = rule if rule is not None else half_line_rule(t, m)
    root = math.sqrt(gamma_bar)
    minus = build(kernel, root, m, rule=rule)
    plus = build(kernel, -root, m, rule=rule)
    for name, system in (("1 - sqrt(gamma_bar) S_t", minus), ("1 + sqrt(gamma_bar) S_t", plus)):
        if system.sign <= 0.0:
            raise PositivityViolationError(
                f"det({name}) is not positive at t={t}, gamma_bar={gamma_bar}; "
                f"increase the number of quadrature points"
            )
    return minus, plus


def det_pair(
    t: float,
    gamma_bar: float,
    m: int = DEFAULT_QUAD_POINTS,
    tol: float | None = None,
) -> tuple[float, float]:
    """(log det(1 - sqrt(gamma_bar) S_t), log det(1 + sqrt(gamma_bar) S_t))."""
    _check_gamma_bar(gamma_bar)
    if gamma_bar == 0.0:
        return 0.0, 0.0
    minus, plus = build_pair(t, gamma_bar, m, tol=tol)
    return minus.logabsdet, plus.logabsdet


def _refined_pair(
    t: float, gamma_bar: float, m: int, tol: float
) -> tuple[NystromSystem, NystromSystem]:
    check_resolution(t)
    bound = truncation_bound(t)
    pairs: dict[int, tuple[NystromSystem, NystromSystem]] = {}

    def evaluate(rule: QuadratureRule) -> float:
        minus, plus = build_pair(t, gamma_bar, m, rule=affine_map(rule, 0.0, bound))
        pairs[rule.size] = (minus, plus)
        return minus.logabsdet + plus.logabsdet

    _, m_used = refine_until(evaluate, nodes_for(t, m), tol)
    logger.debug("nystrom pair refined at t=%g to %d nodes", t, m_used)
    return pairs[m_used]


def resolvent_apply(
    system: NystromSystem, f: Callable[[np.ndarray], np.ndarray]
) -> np.ndarray:
    return system.resolvent_apply(f)


def logdet_dt(
    t: float, gamma_bar: float, m: int = DEFAULT_QUAD_POINTS
) -> tuple[float, float]:
    """d/dt of (log det(1 - sqrt(gamma_bar) S_t), log det(1 + sqrt(gamma_bar) S_t))."""
    _check_gamma_bar(gamma_bar)
    if gamma_bar == 0.0:
        return 0.0, 0.0
    minus, plus = build_pair(t, gamma_bar, m)
    return minus.logdet_dt(), plus.logdet_dt()


def logdet_t(t: float, a: float, m: int = DEFAULT_QUAD_POINTS) -> float:
    """log det(1 - a T_t) built directly from the closed form of T_t."""
    if not 0.0 <= a <= 1.0:
        raise ParameterError(f"a is expected to be in [0, 1], but got {a}")
    if a == 0.0:
        return 0.0
    system = build(KernelSpec(kind=KernelKind.T_SHIFTED, t=t), a, m)
    if system.sign <= 0.0:
        raise PositivityViolationError(f"det(1 - a T_t) is not positive at t={t}, a={a}")
    return system.logabsdet
