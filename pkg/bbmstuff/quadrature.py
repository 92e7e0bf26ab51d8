"""Gauss-Legendre building blocks shared by the integrators.

Everything here is deterministic: a rule is a pure function of its arguments,
and `integrate` always reduces in the same order.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from bbmstuff.errors import DomainError
from bbmstuff.util import blocked_sum


@lru_cache(maxsize=64)
def _leggauss(m: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(m)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(m: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the m-point rule on [-1, 1].

    >>> nodes, weights = gauss_legendre(3)
    >>> float(round(weights.sum(), 12))
    2.0
    """
    if m < 1:
        raise DomainError("need at least one Gauss-Legendre node")
    return _leggauss(m)


def panel_rule(edges: np.ndarray, m: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite m-point rule over consecutive panels.

    `edges` has shape ``(..., P + 1)`` and is sorted along the last axis; the
    result has shape ``(..., P * m)``. Zero-width panels get zero weight.

    >>> nodes, weights = panel_rule(np.array([0.0, 0.5, 2.0]), 4)
    >>> float(round(np.sum(weights * nodes**2), 12))
    2.666666666667
    """
    edges = np.asarray(edges, dtype=float)
    xi, wi = gauss_legendre(m)
    lo = edges[..., :-1, None]
    half = 0.5 * (edges[..., 1:, None] - lo)
    nodes = lo + half * (xi + 1.0)
    weights = half * wi
    shape = edges.shape[:-1] + (-1,)
    return nodes.reshape(shape), weights.reshape(shape)


def dyadic_edges(levels: int, top: float = 1.0) -> np.ndarray:
    """Edges ``top * 2**-k`` for ``k = levels, ..., 0``, increasing.

    >>> dyadic_edges(3).tolist()
    [0.125, 0.25, 0.5, 1.0]
    """
    if levels < 1:
        raise DomainError("dyadic mesh needs at least one level")
    return top * np.exp2(-np.arange(levels, -1, -1, dtype=float))


def uniform_edges(lo: float, hi: float, width: float) -> np.ndarray:
    """Edges of equal panels no wider than `width` covering ``[lo, hi]``."""
    count = max(1, int(np.ceil((hi - lo) / width - 1e-12)))
    return np.linspace(lo, hi, count + 1)


@dataclass(frozen=True)
class SpatialRule:
    """A tensor quadrature rule over a box in R^n."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def dimension(self) -> int:
        return self.nodes.shape[1]

    def __len__(self):
        return len(self.weights)


def tensor_rule(
    lows: Sequence[float],
    highs: Sequence[float],
    panels: int,
    points: int,
    breaks: Sequence[Sequence[float]] = (),
) -> SpatialRule:
    """Tensor product of composite Gauss-Legendre rules, one per axis.

    Each axis is split into `panels` equal panels, refined further at any
    coordinate listed in ``breaks[axis]`` that falls inside the box.

    >>> rule = tensor_rule([-1.0, 0.0], [1.0, 3.0], panels=2, points=3)
    >>> float(round(rule.weights.sum(), 12))
    6.0
    """
    lows = np.atleast_1d(np.asarray(lows, dtype=float))
    highs = np.atleast_1d(np.asarray(highs, dtype=float))
    if lows.shape != highs.shape or np.any(highs <= lows):
        raise DomainError("box needs lows < highs on every axis")
    axes_nodes = []
    axes_weights = []
    for axis, (lo, hi) in enumerate(zip(lows, highs)):
        edges = np.linspace(lo, hi, panels + 1)
        if axis < len(breaks):
            inner = [b for b in breaks[axis] if lo < b < hi]
            edges = np.unique(np.concatenate([edges, inner]))
        nodes, weights = panel_rule(edges, points)
        axes_nodes.append(nodes)
        axes_weights.append(weights)
    grids = np.meshgrid(*axes_nodes, indexing="ij")
    wgrids = np.meshgrid(*axes_weights, indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.prod(np.stack([w.ravel() for w in wgrids], axis=-1), axis=-1)
    return SpatialRule(nodes, weights)


def integrate(rule: SpatialRule, integrand: Callable[[np.ndarray], np.ndarray]):
    """Apply `rule` to a vectorised integrand of points ``(M, n)``."""
    values = np.asarray(integrand(rule.nodes), dtype=float)
    return blocked_sum(rule.weights * values)
