"""Luxemburg norms ``inf {lambda > 0 : modular(u / lambda) <= 1}``.

Any nonincreasing ``lambda -> modular(u / lambda)`` works:

>>> result = luxemburg(NormQuery(), lambda lam: 4.0 / lam**2)
>>> round(result.value, 6)
2.0
>>> luxemburg(NormQuery(), lambda lam: 0.0).value
0.0
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from bbmstuff.errors import BisectionFailure, ContractViolation, DomainError
from bbmstuff.functions import TestFunction
from bbmstuff.limit import H0Evaluator
from bbmstuff.modular import SamplingPlan, sample_differences
from bbmstuff.quadrature import SpatialRule
from bbmstuff.young import YoungFunction


logger = logging.getLogger(__name__)

#: Relative increase of the modular tolerated before calling it non-monotone.
MONOTONE_SLACK = 1e-12

NORM_COLUMNS = ["s", "scaled_seminorm", "gradient_norm", "ratio", "error"]


class Target(str, Enum):
    ORLICZ = "orlicz"
    GRADIENT = "gradient"
    SEMINORM = "seminorm"
    SCALED = "scaled"


@dataclass(frozen=True)
class NormQuery:
    target: Target = Target.SCALED
    tol: float = 1e-8
    max_iter: int = 200

    def __post_init__(self):
        if not self.tol > 0.0:
            raise DomainError("bisection tolerance must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be positive")
        object.__setattr__(self, "target", Target(self.target))


@dataclass(frozen=True)
class NormResult:
    """`value` is the upper end of the final bracket, so the modular there is
    at most 1. `error` adds the propagated modular error to the bracket width.
    """

    value: float
    bracket: Tuple[float, float]
    iterations: int
    error: float = 0.0

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


class _Monotone:
    """Wraps a modular and rejects evidence that it increases in lambda."""

    def __init__(self, modular: Callable[[float], float]):
        self.modular = modular
        self.seen: Dict[float, float] = {}

    def __call__(self, lam: float) -> float:
        value = float(self.modular(lam))
        for other, known in self.seen.items():
            lo, hi = (other, known), (lam, value)
            if lam < other:
                lo, hi = hi, lo
            if hi[1] > lo[1] * (1.0 + MONOTONE_SLACK) + 1e-300:
                raise ContractViolation(
                    f"modular increases from {lo[1]:.6g} at {lo[0]:.6g} "
                    f"to {hi[1]:.6g} at {hi[0]:.6g}"
                )
        self.seen[lam] = value
        return value


def luxemburg(
    query: NormQuery,
    modular: Callable[[float], float],
    modular_error: float = 0.0,
    p_minus: float = 1.0,
) -> NormResult:
    """Bisect on lambda until the bracket is narrower than ``tol * lambda``.

    The bracket starts at lambda = 1 and is doubled or halved until it
    straddles the level 1. `modular_error` is an absolute error of the
    modular near the root; it enters the reported error as
    ``error * lambda / p_minus``.
    """
    m = _Monotone(modular)
    if m(1.0) == 0.0:
        return NormResult(0.0, (0.0, 0.0), 0)

    iterations = 0
    lo, hi = 1.0, 1.0
    if m(1.0) <= 1.0:
        lo = 0.5
        while m(lo) <= 1.0:
            hi, lo = lo, 0.5 * lo
            iterations += 1
            if iterations >= query.max_iter:
                raise BisectionFailure("could not bracket from above", (lo, hi))
    else:
        hi = 2.0
        while m(hi) > 1.0:
            lo, hi = hi, 2.0 * hi
            iterations += 1
            if iterations >= query.max_iter:
                raise BisectionFailure("could not bracket from below", (lo, hi))
    logger.debug("bracket [%g, %g] after %d steps", lo, hi, iterations)

    while hi - lo > query.tol * hi:
        if iterations >= query.max_iter:
            raise BisectionFailure("bisection did not converge", (lo, hi))
        mid = 0.5 * (lo + hi)
        if m(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
        iterations += 1
    error = (hi - lo) + modular_error * hi / p_minus
    return NormResult(hi, (lo, hi), iterations, error)


# Entry points


def orlicz_norm(
    spec: YoungFunction,
    field: Callable[[np.ndarray], np.ndarray],
    domain_quad: SpatialRule,
    query: NormQuery = NormQuery(Target.ORLICZ),
) -> NormResult:
    """``|| f ||`` for the diagonal Young function ``G(x, x, .)``."""
    x, weights = domain_quad.nodes, domain_quad.weights
    magnitude = np.abs(field(x))
    bound = spec.bind(x, x)

    def modular(lam):
        return float(np.sum(weights * bound.G(magnitude / lam)))

    return luxemburg(query, modular, p_minus=spec.bounds.p_minus)


def _h0_norm(ev: H0Evaluator, x, weights, magnitude, query) -> NormResult:
    def modular(lam):
        return float(np.sum(weights * ev(x, magnitude / lam)))

    return luxemburg(query, modular, p_minus=ev.spec.bounds.p_minus)


def gradient_norm(
    ev: H0Evaluator,
    u: TestFunction,
    domain_quad: Optional[SpatialRule] = None,
    query: NormQuery = NormQuery(Target.GRADIENT),
) -> NormResult:
    """``|| grad u ||`` for H0."""
    if u.is_zero:
        return NormResult(0.0, (0.0, 0.0), 0)
    domain_quad = u.spatial_rule() if domain_quad is None else domain_quad
    x = domain_quad.nodes
    magnitude = np.linalg.norm(u.grad(x), axis=-1)
    return _h0_norm(ev, x, domain_quad.weights, magnitude, query)


def _fractional_norm(spec, u, s, plan, query, scaled: bool) -> NormResult:
    sample = sample_differences(spec, u, s, plan)

    def modular(lam):
        result = sample.evaluate(lam)
        return result.scaled_value if scaled else result.value

    at_one = sample.evaluate(1.0)
    if scaled:
        error = at_one.scaled_stderr or (1.0 - s) * at_one.tail_bound
    else:
        error = at_one.mc_stderr or at_one.tail_bound
    return luxemburg(query, modular, error, spec.bounds.p_minus)


def seminorm(
    spec: YoungFunction,
    u: TestFunction,
    s: float,
    plan: SamplingPlan,
    query: NormQuery = NormQuery(Target.SEMINORM),
) -> NormResult:
    """``[u]`` for the unscaled modular."""
    return _fractional_norm(spec, u, s, plan, query, scaled=False)


def scaled_seminorm(
    spec: YoungFunction,
    u: TestFunction,
    s: float,
    plan: SamplingPlan,
    tol: float = 1e-8,
) -> NormResult:
    """``[[u]]``, the norm for ``(1 - s)`` times the modular."""
    query = NormQuery(Target.SCALED, tol=tol)
    return _fractional_norm(spec, u, s, plan, query, scaled=True)


@dataclass(frozen=True)
class EquivalenceReport:
    """Both directions of the modular/norm comparison for one field.

    Slacks are ``lhs - rhs`` of the implied inequality, or ``-inf`` when the
    premise does not hold. The check passes when both are at most 0.
    """

    C: float
    modular: float
    norm: float
    norm_slack: float
    modular_slack: float

    @property
    def passed(self) -> bool:
        return self.norm_slack <= 0.0 and self.modular_slack <= 0.0


def check_modular_norm_equivalence(
    young: Union[YoungFunction, H0Evaluator],
    field: Callable[[np.ndarray], np.ndarray],
    C: float,
    domain_quad: SpatialRule,
    query: NormQuery = NormQuery(Target.ORLICZ),
) -> EquivalenceReport:
    """``modular <= C`` implies ``norm <= C**(1/p-)``, and ``norm <= C``
    implies ``modular <= C**p+``, for ``C >= 1``.

    Both sides carry a relative allowance of ``10 * query.tol`` for the
    bisection.
    """
    if C < 1.0:
        raise DomainError("the comparison needs C >= 1")
    x, weights = domain_quad.nodes, domain_quad.weights
    magnitude = np.abs(field(x))
    if isinstance(young, H0Evaluator):
        bounds = young.spec.bounds
        modular = float(np.sum(weights * young(x, magnitude)))
        norm = _h0_norm(young, x, weights, magnitude, query).value
    else:
        bounds = young.bounds
        modular = float(np.sum(weights * young.G(x, x, magnitude)))
        norm = orlicz_norm(young, field, domain_quad, query).value
    allowance = 1.0 + 10.0 * query.tol
    norm_slack = modular_slack = -np.inf
    if modular <= C:
        norm_slack = norm - C ** (1.0 / bounds.p_minus) * allowance
    if norm <= C:
        modular_slack = modular - C**bounds.p_plus * allowance
    return EquivalenceReport(C, modular, norm, norm_slack, modular_slack)


def norm_inequality_study(
    spec: YoungFunction,
    u: TestFunction,
    s_grid: Sequence[float],
    plan: SamplingPlan,
    ev: Optional[H0Evaluator] = None,
    tol: float = 1e-8,
    workers: int = 1,
) -> pd.DataFrame:
    """``[[u]]`` against ``|| grad u ||`` along the s grid.

    Columns: ``s, scaled_seminorm, gradient_norm, ratio, error``; the ratio
    is 0 when both norms vanish and `error` is the reported error of
    ``[[u]]``. The grid points are independent and run on `workers` threads.
    """
    if ev is None:
        ev = H0Evaluator.for_spec(spec, dimension=u.dimension)
    limit = gradient_norm(ev, u, query=NormQuery(Target.GRADIENT, tol=tol))

    def row(s):
        norm = scaled_seminorm(spec, u, s, plan, tol)
        ratio = norm.value / limit.value if limit.value > 0.0 else 0.0
        logger.info("s=%g [[u]]=%.6g ratio=%.6f", s, norm.value, ratio)
        return {
            "s": s,
            "scaled_seminorm": norm.value,
            "gradient_norm": limit.value,
            "ratio": ratio,
            "error": norm.error,
        }

    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(row, s_grid))
    return pd.DataFrame(rows, columns=NORM_COLUMNS)
