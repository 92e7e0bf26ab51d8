"""The limit Young function

``H0(x, t) = integral over r in (0, 1] and w on the sphere of
G(x, x, t |w_n| r) dS dr / r``

and what is built from it: closed forms for the power, double phase,
logarithmic and variable exponent families, the anisotropic limit
``2 * integral of G(x, x, t r) dr / r``, the sandwich constants and the
gradient energy ``integral of H0(x, |grad u|)``.

Only ``|w_n|`` enters the integrand, so the generic path runs on the folded
sphere rule (`SphereRule.folded`).

>>> from bbmstuff.young import Power
>>> ev = H0Evaluator.for_spec(Power(2.0), sphere_rule(1), closed=False)
>>> round(float(ev(np.zeros(1), 1.0)), 12)
1.0
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from bbmstuff.errors import DomainError, TailBoundError
from bbmstuff.functions import TestFunction
from bbmstuff.quadrature import (
    SpatialRule,
    dyadic_edges,
    integrate,
    panel_rule,
)
from bbmstuff.sphere import (
    SphereRule,
    moment_K,
    moment_Klog,
    sphere_rule,
    surface_measure,
)
from bbmstuff.young import (
    DoublePhase,
    Power,
    PowerLog,
    SpaceFree,
    VariableExponent,
    YoungFunction,
)


logger = logging.getLogger(__name__)

#: Upper bound on ``points * folded nodes * radial nodes`` per numpy batch.
BATCH_SIZE = 4_000_000


class Variant(str, Enum):
    GENERIC = "generic-quadrature"
    POWER = "closed-power"
    LOG = "closed-log"
    VAREXP = "closed-varexp"
    ANISO = "anisotropic"


def _as_points(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != n:
        raise DomainError(f"points must have last axis {n}, got {x.shape}")
    return x


def _as_levels(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise DomainError("H0 is only defined for t >= 0")
    return t


def _folded_moments(values, weights, kappa) -> np.ndarray:
    """``(1/kappa) sum_j W_j |w_n|_j**kappa`` for an array of exponents."""
    kappa = np.asarray(kappa, dtype=float)
    powers = values ** kappa[..., None]
    return np.sum(weights * powers, axis=-1) / kappa


def radial_h0(
    spec: YoungFunction,
    x: np.ndarray,
    t: np.ndarray,
    values: np.ndarray,
    weights: np.ndarray,
    levels: int = 40,
    points: int = 10,
) -> Tuple[np.ndarray, np.ndarray]:
    """Generic quadrature of ``sum_j W_j integral G(x, x, t a_j r) dr / r``.

    `x` has shape ``(M, n)`` and `t` shape ``(M,)``; ``(a_j, W_j)`` is a
    one-dimensional rule in ``|w_n|``. The r-integral runs over dyadic panels
    down to ``2**-levels`` with extra breakpoints where ``t a_j r`` hits a
    kink of the density. Returns the values and the bound on the neglected
    ``(0, 2**-levels)`` piece, both of shape ``(M,)``.
    """
    base = dyadic_edges(levels)
    kinks = spec.kinks()
    M, J = len(t), len(values)
    per_point = J * len(base) * points
    chunk = max(1, BATCH_SIZE // max(per_point, 1))
    out = np.empty(M)
    for start in range(0, M, chunk):
        xs, ts = x[start : start + chunk], t[start : start + chunk]
        scale = ts[:, None] * values[None, :]
        if kinks:
            with np.errstate(divide="ignore"):
                extra = [
                    np.clip(np.divide(k, scale), base[0], 1.0) for k in kinks
                ]
            grid = np.broadcast_to(base, scale.shape + base.shape)
            edges = np.sort(
                np.concatenate([grid, np.stack(extra, axis=-1)], axis=-1),
                axis=-1,
            )
        else:
            edges = base
        r, w = panel_rule(edges, points)
        tau = scale[..., None] * r
        point = xs[:, None, None, :]
        G = spec.bind(point, point).G(tau)
        inner = np.sum(w / r * G, axis=-1)
        out[start : start + chunk] = inner @ weights

    b = spec.bounds
    growth = np.maximum(t**b.p_minus, t**b.p_plus)
    axial = float(np.sum(weights * values**b.p_minus))
    tail = b.c2 * growth * axial * 2.0 ** (-levels * b.p_minus) / b.p_minus
    return out, tail


def h0_closed_power(
    spec: YoungFunction, x: np.ndarray, t, rule: SphereRule
) -> np.ndarray:
    """``K(n, p) t**p``, or ``K(n, q) t**q + a(x, x) K(n, p) t**p``.

    >>> float(h0_closed_power(Power(2.0), np.zeros(1), 3.0, sphere_rule(1)))
    9.0
    """
    n = rule.dimension
    t = _as_levels(t)
    if isinstance(spec, Power) or (
        isinstance(spec, SpaceFree) and spec.scalar == "power"
    ):
        return moment_K(n, spec.p, rule) * t**spec.p
    if isinstance(spec, DoublePhase):
        a = spec.coefficient(x, x)
        return (
            moment_K(n, spec.q, rule) * t**spec.q
            + a * moment_K(n, spec.p, rule) * t**spec.p
        )
    raise DomainError(f"no closed power form for {spec.KIND}")


def _log_radial(tau: np.ndarray, p: float) -> np.ndarray:
    """``integral_0^1 tau**p r**p (log+ (tau r) + 1) dr / r``."""
    big = np.maximum(tau, 1.0)
    above = big**p / p * ((p - 1.0) / p + np.log(big)) + 1.0 / p**2
    return np.where(tau <= 1.0, tau**p / p, above)


def h0_closed_log(a_diag, p: float, n: int, t, rule: Optional[SphereRule]):
    """The logarithmic family, assembled node by node on the sphere.

    Each node contributes ``tau**p / p`` when ``tau = t |w_n| <= 1`` and
    ``tau**p / p ((p - 1) / p + log tau) + 1 / p**2`` otherwise.

    >>> float(h0_closed_log(1.0, 2.0, 1, 0.5, sphere_rule(1)))
    0.25
    """
    rule = sphere_rule(n) if rule is None else rule
    values, weights = rule.folded()
    t = _as_levels(t)
    tau = t[..., None] * values
    return np.asarray(a_diag) * (_log_radial(tau, p) @ weights)


def h0_closed_log_grouped(a_diag, p: float, n: int, t, rule=None):
    """The grouped two-branch form ``a t**p K(n, p)`` for ``t <= 1`` and

    ``a (t**p (K(n, p) ((p - 1) / p + log t) + Klog(n, p)) + |S| / p**2)``

    for ``t > 1``. The second branch equals `h0_closed_log` only when every
    node has ``t |w_n| > 1``, which in practice means n = 1.

    >>> v = h0_closed_log_grouped(1.0, 2.0, 1, 2.0)
    >>> round(float(v - h0_closed_log(1.0, 2.0, 1, 2.0, None)), 12)
    0.0
    """
    rule = sphere_rule(n) if rule is None else rule
    t = _as_levels(t)
    K = moment_K(n, p, rule)
    Klog = moment_Klog(n, p, rule)
    big = np.maximum(t, 1.0)
    above = big**p * (K * ((p - 1.0) / p + np.log(big)) + Klog)
    above = above + surface_measure(n) / p**2
    return np.asarray(a_diag) * np.where(t <= 1.0, K * t**p, above)


def h0_closed_varexp(a_diag, p_diag, n: int, t, rule=None):
    """``a K(n, p) t**p`` with the exponent taken on the diagonal.

    >>> float(h0_closed_varexp(1.0, 2.0, 1, 3.0))
    9.0
    """
    rule = sphere_rule(n) if rule is None else rule
    values, weights = rule.folded()
    t = _as_levels(t)
    p_diag = np.asarray(p_diag, dtype=float)
    K = _folded_moments(values, weights, p_diag)
    return np.asarray(a_diag) * K * t**p_diag


@dataclass(frozen=True)
class H0Evaluator:
    """H0 for one Young function on one sphere rule.

    `variant` picks the generic radial quadrature, one of the closed forms or
    the anisotropic limit. Calls are vectorised over points ``(..., n)`` and
    levels broadcasting against ``points[..., 0]``.
    """

    spec: YoungFunction
    rule: SphereRule
    radial_levels: int = 40
    variant: Variant = Variant.GENERIC
    radial_points: int = 10
    tail_tol: float = 1e-12

    def __post_init__(self):
        if self.radial_levels < 1:
            raise DomainError("radial_levels must be positive")
        object.__setattr__(self, "variant", Variant(self.variant))

    @classmethod
    def for_spec(
        cls,
        spec: YoungFunction,
        rule: Optional[SphereRule] = None,
        dimension: int = 1,
        closed: bool = True,
        **kwargs,
    ) -> "H0Evaluator":
        """The closed form for the spec's family when `closed`, else generic."""
        rule = sphere_rule(dimension) if rule is None else rule
        variant = Variant.GENERIC
        if closed:
            if isinstance(spec, (Power, DoublePhase)) or (
                isinstance(spec, SpaceFree) and spec.scalar == "power"
            ):
                variant = Variant.POWER
            elif isinstance(spec, PowerLog):
                variant = Variant.LOG
            elif isinstance(spec, VariableExponent):
                variant = Variant.VAREXP
        return cls(spec, rule, variant=variant, **kwargs)

    @classmethod
    def anisotropic(cls, spec: YoungFunction, dimension: int = 1, **kwargs):
        rule = sphere_rule(dimension)
        return cls(spec, rule, variant=Variant.ANISO, **kwargs)

    def generic(self) -> "H0Evaluator":
        return replace(self, variant=Variant.GENERIC)

    @property
    def dimension(self) -> int:
        return self.rule.dimension

    def evaluate(self, x, t) -> Tuple[np.ndarray, np.ndarray]:
        """Values and the bound on their neglected radial tail."""
        x = _as_points(x, self.dimension)
        t = _as_levels(t)
        shape = np.broadcast_shapes(x.shape[:-1], t.shape)
        xs = np.broadcast_to(x, shape + x.shape[-1:]).reshape(
            -1, self.dimension
        )
        ts = np.broadcast_to(t, shape).ravel()
        if self.variant in (Variant.GENERIC, Variant.ANISO):
            if self.variant is Variant.ANISO:
                values, weights = np.ones(1), np.full(1, 2.0)
            else:
                values, weights = self.rule.folded()
            out, tail = radial_h0(
                self.spec,
                xs,
                ts,
                values,
                weights,
                self.radial_levels,
                self.radial_points,
            )
            scale = np.maximum(out, 0.0)
            bad = (tail > self.tail_tol * scale) & (tail > 0.0)
            if np.any(bad):
                ratio = tail[bad] / np.maximum(scale[bad], 1e-300)
                worst = float(np.max(ratio))
                raise TailBoundError(
                    f"insufficient radial depth {self.radial_levels}",
                    worst,
                    self.tail_tol,
                )
            return out.reshape(shape), tail.reshape(shape)
        out = self._closed(xs, ts)
        return np.broadcast_to(out, ts.shape).reshape(shape), np.zeros(shape)

    def _closed(self, x, t):
        spec, n = self.spec, self.dimension
        if self.variant is Variant.POWER:
            return h0_closed_power(spec, x, t, self.rule)
        if self.variant is Variant.LOG:
            a = spec.coefficient(x, x)
            return h0_closed_log(a, spec.p, n, t, self.rule)
        a, p = spec.coefficient(x, x), spec.exponent(x, x)
        return h0_closed_varexp(a, p, n, t, self.rule)

    def __call__(self, x, t) -> np.ndarray:
        return self.evaluate(x, t)[0]


def h0_eval(ev: H0Evaluator, x, t) -> np.ndarray:
    """H0(x, t) through whatever variant `ev` was built with."""
    return ev(x, t)


def h0_aniso(spec: YoungFunction, x, t, radial_levels: int = 40):
    """``2 * integral_0^1 G(x, x, t r) dr / r`` by radial quadrature.

    >>> round(float(h0_aniso(Power(3.0), np.zeros(1), 1.5)), 12)
    2.25
    """
    x = np.asarray(x, dtype=float)
    ev = H0Evaluator.anisotropic(
        spec, dimension=x.shape[-1], radial_levels=radial_levels
    )
    return ev(x, t)


def h0_density(ev: H0Evaluator, x, t, step: float = 1e-6) -> np.ndarray:
    """Central difference of H0 in t, one-sided at t = 0."""
    t = _as_levels(t)
    lo = np.maximum(t - step, 0.0)
    hi = t + step
    return (ev(x, hi) - ev(x, lo)) / (hi - lo)


def sandwich_constants(
    spec: YoungFunction, n: int, rule: Optional[SphereRule] = None
) -> Tuple[float, float]:
    """``(K(n, p+), |S^{n-1}| / p-)`` bracketing ``H0 / G(x, x, .)``.

    >>> sandwich_constants(Power(2.0), 1)
    (1.0, 1.0)
    """
    b = spec.bounds
    rule = sphere_rule(n) if rule is None else rule
    return moment_K(n, b.p_plus, rule), surface_measure(n) / b.p_minus


def sandwich_slack(ev: H0Evaluator, x, t) -> np.ndarray:
    """Relative slack of the sandwich at each sample; negative means broken."""
    lower, upper = sandwich_constants(ev.spec, ev.dimension, ev.rule)
    diagonal = ev.spec.G(x, x, t)
    value = ev(x, t)
    scale = np.maximum(diagonal, 1e-300)
    low, high = value - lower * diagonal, upper * diagonal - value
    return np.minimum(low, high) / scale


def grad_energy(
    ev: H0Evaluator, u: TestFunction, domain_quad: Optional[SpatialRule] = None
) -> float:
    """``integral of H0(x, |grad u(x)|) dx`` over the support box of `u`."""
    if u.is_zero:
        return 0.0
    domain_quad = u.spatial_rule() if domain_quad is None else domain_quad

    def integrand(x):
        return ev(x, np.linalg.norm(u.grad(x), axis=-1))

    return integrate(domain_quad, integrand)


def partial_energy(
    ev: H0Evaluator,
    u: TestFunction,
    k: int,
    domain_quad: Optional[SpatialRule] = None,
) -> float:
    """``integral of H0(x, |du / dx_k|) dx`` for the axis ``1 <= k <= n``."""
    if not 1 <= k <= u.dimension:
        raise DomainError(f"axis {k} out of range for n={u.dimension}")
    if u.is_zero:
        return 0.0
    domain_quad = u.spatial_rule() if domain_quad is None else domain_quad
    return integrate(domain_quad, lambda x: ev(x, np.abs(u.partial(x, k - 1))))
