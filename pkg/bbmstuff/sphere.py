"""Quadrature on the unit sphere and its moments.

``K(n, kappa) = (1 / kappa) * integral of |w_n|**kappa over S^{n-1}``

>>> rule = sphere_rule(1)
>>> rule.nodes.ravel().tolist(), rule.weights.tolist()
([-1.0, 1.0], [1.0, 1.0])
>>> float(moment_K(1, 2.0, rule))
1.0
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.special import digamma, gamma

from bbmstuff.errors import DomainError
from bbmstuff.quadrature import gauss_legendre


logger = logging.getLogger(__name__)

#: Orders used when no rule is passed. Equispaced circle rules converge only
#: algebraically for non-integer moments, hence the large n = 2 order.
DEFAULT_ORDER = {1: 1, 2: 8192, 3: 64}


@dataclass(frozen=True)
class SphereRule:
    """Nodes on S^{n-1} (rows) with positive weights summing to its area."""

    dimension: int
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.weights)

    @property
    def axial(self) -> np.ndarray:
        """The last coordinate of every node."""
        return self.nodes[:, -1]

    def folded(self) -> Tuple[np.ndarray, np.ndarray]:
        """Distinct values of ``|w_n|`` with their summed weights.

        Integrands that only see ``|w_n|`` can use this much shorter rule.

        >>> values, weights = sphere_rule(2, 8).folded()
        >>> len(values), float(round(weights.sum() / np.pi, 12))
        (3, 2.0)
        """
        key = np.round(np.abs(self.axial), 14)
        values, inverse = np.unique(key, return_inverse=True)
        weights = np.bincount(inverse, weights=self.weights)
        return values, weights


def _freeze(*arrays):
    for array in arrays:
        array.setflags(write=False)


@lru_cache(maxsize=16)
def sphere_rule(n: int, order: Optional[int] = None) -> SphereRule:
    """A deterministic rule on S^{n-1} for n in {1, 2, 3}.

    n = 2 uses `order` equispaced angles; n = 3 uses Gauss-Legendre in the
    polar cosine, split at the equator, times ``2 * order`` azimuths.

    >>> float(round(sphere_rule(2, 64).weights.sum() / np.pi, 12))
    2.0
    >>> sphere_rule(4)
    Traceback (most recent call last):
    ...
    bbmstuff.errors.DomainError: sphere rules exist for n in (1, 2, 3), got 4
    """
    if n not in DEFAULT_ORDER:
        raise DomainError(f"sphere rules exist for n in (1, 2, 3), got {n}")
    order = DEFAULT_ORDER[n] if order is None else int(order)
    if order < 1:
        raise DomainError("sphere rule order must be positive")

    if n == 1:
        nodes = np.array([[-1.0], [1.0]])
        weights = np.ones(2)
    elif n == 2:
        theta = 2.0 * np.pi * np.arange(order) / order
        nodes = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        weights = np.full(order, 2.0 * np.pi / order)
    else:
        xi, wi = gauss_legendre(order)
        z = np.concatenate([0.5 * (xi - 1.0), 0.5 * (xi + 1.0)])
        wz = np.concatenate([0.5 * wi, 0.5 * wi])
        azimuths = 2 * order
        phi = 2.0 * np.pi * np.arange(azimuths) / azimuths
        zz, pp = np.meshgrid(z, phi, indexing="ij")
        ring = np.sqrt(1.0 - zz**2)
        nodes = np.stack(
            [ring * np.cos(pp), ring * np.sin(pp), zz], axis=-1
        ).reshape(-1, 3)
        weights = np.repeat(wz * (2.0 * np.pi / azimuths), azimuths)
    _freeze(nodes, weights)
    logger.debug("sphere rule n=%d order=%d: %d nodes", n, order, len(weights))
    return SphereRule(n, nodes, weights)


def _rule_for(n: int, rule: Optional[SphereRule]) -> SphereRule:
    rule = sphere_rule(n) if rule is None else rule
    if rule.dimension != n:
        raise DomainError(
            f"rule has dimension {rule.dimension}, expected {n}"
        )
    return rule


def _check_kappa(kappa: float):
    if not kappa > 0.0:
        raise DomainError(f"moment exponent must be positive, got {kappa}")


def moment_K(n: int, kappa: float, rule: Optional[SphereRule] = None):
    """``(1/kappa) * sum(weights * |w_n|**kappa)``.

    >>> float(round(moment_K(2, 2.0, sphere_rule(2, 64)) / np.pi, 12))
    0.5
    """
    _check_kappa(kappa)
    rule = _rule_for(n, rule)
    return float(np.sum(rule.weights * np.abs(rule.axial) ** kappa) / kappa)


def moment_Klog(n: int, p: float, rule: Optional[SphereRule] = None):
    """``(1/p) * sum(weights * |w_n|**p * log|w_n|)``, zero where w_n = 0.

    >>> moment_Klog(1, 2.5)
    0.0
    """
    rule = _rule_for(n, rule)
    w = np.abs(rule.axial)
    alive = w >= 1e-300
    safe = np.where(alive, w, 1.0)
    values = np.where(alive, safe**p * np.log(safe), 0.0)
    return float(np.sum(rule.weights * values) / p)


def _axial_integral(n: int, kappa: float) -> float:
    return (
        2.0
        * np.pi ** ((n - 1) / 2.0)
        * gamma((kappa + 1.0) / 2.0)
        / gamma((n + kappa) / 2.0)
    )


def moment_K_exact(n: int, kappa: float) -> float:
    """The Gamma-function closed form of `moment_K`.

    >>> round(moment_K_exact(2, 2.0) / np.pi, 12)
    0.5
    >>> round(moment_K_exact(3, 2.0) / np.pi, 12)
    0.666666666667
    """
    _check_kappa(kappa)
    if n < 1:
        raise DomainError("dimension must be positive")
    return float(_axial_integral(n, kappa) / kappa)


def moment_Klog_exact(n: int, p: float) -> float:
    """The kappa-derivative of the closed form, divided by p.

    >>> moment_Klog_exact(1, 3.0)
    0.0
    """
    _check_kappa(p)
    if n < 1:
        raise DomainError("dimension must be positive")
    spread = digamma((p + 1.0) / 2.0) - digamma((n + p) / 2.0)
    return float(_axial_integral(n, p) * 0.5 * spread / p)


def surface_measure(n: int) -> float:
    """Area of S^{n-1}, that is ``n * ball_volume(n)``.

    >>> [round(surface_measure(n) / np.pi, 12) for n in (2, 3)]
    [2.0, 4.0]
    >>> round(surface_measure(1), 12)
    2.0
    """
    if n < 1:
        raise DomainError(f"dimension must be positive, got {n}")
    if n == 1:
        return 2.0
    return float(2.0 * np.pi ** (n / 2.0) / gamma(n / 2.0))


def ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n.

    >>> round(ball_volume(2) / np.pi, 12)
    1.0
    """
    if n < 1:
        raise DomainError(f"dimension must be positive, got {n}")
    return float(np.pi ** (n / 2.0) / gamma(n / 2.0 + 1.0))


def sample_sphere(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """`m` uniform points on S^{n-1} from normalized Gaussians."""
    if n < 1:
        raise DomainError(f"dimension must be positive, got {n}")
    if n == 1:
        return rng.choice([-1.0, 1.0], size=(m, 1))
    z = rng.standard_normal((m, n))
    return z / np.linalg.norm(z, axis=-1, keepdims=True)
