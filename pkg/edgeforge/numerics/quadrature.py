import logging
from collections.abc import Callable
from functools import lru_cache

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy import special

from edgeforge.utils.constants import MAX_QUAD_POINTS
from edgeforge.utils.errors import ConvergenceError, ParameterError

logger = logging.getLogger(__name__)


class QuadratureRule(BaseModel):
    """Nodes and positive weights of an interpolatory rule on (a, b)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]

    @field_validator("nodes", "weights", mode="before")
    def validate_array(cls, value):
        array = np.array(value, dtype=float).reshape(-1)
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def validate_rule(self):
        a, b = self.interval
        if not a < b:
            raise ValueError(f"interval is expected to satisfy a < b, but got ({a}, {b})")
        if self.nodes.shape != self.weights.shape or self.nodes.size == 0:
            raise ValueError("nodes and weights must be non-empty and of equal length")
        if np.any(self.weights <= 0.0):
            raise ValueError("weights must be strictly positive")
        if np.any(np.diff(self.nodes) <= 0.0):
            raise ValueError("nodes must be strictly increasing")
        if self.nodes[0] <= a or self.nodes[-1] >= b:
            raise ValueError(f"nodes must lie inside ({a}, {b})")
        if abs(self.weights.sum() - (b - a)) > 1e-12 * max(1.0, b - a):
            raise ValueError(
                f"weights are expected to sum to {b - a}, but got {self.weights.sum()}"
            )
        return self

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=64)
def _legendre(m: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = special.roots_legendre(m)
    return nodes, weights


def gauss_legendre(m: int) -> QuadratureRule:
    """Gauss-Legendre rule with m nodes on (-1, 1)."""
    if not 1 <= m <= MAX_QUAD_POINTS:
        raise ParameterError(
            f"number of nodes is expected to be in [1, {MAX_QUAD_POINTS}], but got {m}"
        )
    nodes, weights = _legendre(int(m))
    return QuadratureRule(nodes=nodes, weights=weights, interval=(-1.0, 1.0))


def affine_map(rule: QuadratureRule, a: float, b: float) -> QuadratureRule:
    if not (np.isfinite(a) and np.isfinite(b)) or a >= b:
        raise ParameterError(f"interval is expected to satisfy a < b, but got ({a}, {b})")
    lo, hi = rule.interval
    scale = (b - a) / (hi - lo)
    nodes = a + (rule.nodes - lo) * scale
    return QuadratureRule(nodes=nodes, weights=rule.weights * scale, interval=(a, b))


def composite(
    breakpoints: np.ndarray | list[float], m: int
) -> QuadratureRule:
    """m-point Gauss-Legendre on every panel between consecutive breakpoints."""
    edges = np.asarray(breakpoints, dtype=float)
    if edges.size < 2 or np.any(np.diff(edges) <= 0.0):
        raise ParameterError("breakpoints must be strictly increasing, at least two")
    base = gauss_legendre(m)
    panels = [affine_map(base, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])]
    return QuadratureRule(
        nodes=np.concatenate([p.nodes for p in panels]),
        weights=np.concatenate([p.weights for p in panels]),
        interval=(float(edges[0]), float(edges[-1])),
    )


def refine_until(
    evaluate: Callable[[QuadratureRule], float],
    m0: int,
    tol: float,
    m_max: int = MAX_QUAD_POINTS,
) -> tuple[float, int]:
    """Double the node count from m0 until two successive values agree to tol."""
    m = m0
    value = evaluate(gauss_legendre(m))
    previous: float | None = None
    while 2 * m <= m_max:
        m *= 2
        previous, value = value, evaluate(gauss_legendre(m))
        logger.debug("refine m=%d value=%.16g delta=%.3g", m, value, value - previous)
        if tol > 0 and abs(value - previous) <= tol:
            return value, m
    raise ConvergenceError(
        f"no convergence to tol={tol} by m={m}", last=value, previous=previous
    )
