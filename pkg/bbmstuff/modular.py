"""The fractional modular

``J(u) = double integral of G(x, y, |u(x) - u(y)| / |x - y|**s)
dx dy / |x - y|**n``

for compactly supported u, in polar coordinates ``y = x - r w``.

The integral is split the way the convergence argument splits it:

near
    ``r <= far_cutoff`` for x in the box ``D`` (support box of u grown by
    ``far_cutoff``). With ``rho = r**(1 - s)`` the measure ``(1 - s) dr / r``
    becomes ``drho / rho`` and the argument becomes ``Q * rho`` with the
    difference quotient ``Q = |u(x) - u(x - r w)| / r``, so the scaled near
    field is computed directly and stays well conditioned as s -> 1.
far
    ``r > far_cutoff`` for x in D: Gauss-Legendre panels up to the diameter
    of D, then ``sigma = (r / R)**-s`` maps the rest of the ray onto (0, 1].
exterior
    x outside D. Then ``u(x) = 0``, and swapping the roles of x and y turns
    it into rays leaving D from points y of the support, again in sigma.

`sample_differences` materializes every node (weights, argument at
``lambda = 1`` and coefficients of G), so `DifferenceSample.evaluate` gives
the modular of ``u / lambda`` without integrating again.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from bbmstuff.errors import DomainError, TailBoundError
from bbmstuff.functions import TestFunction
from bbmstuff.limit import H0Evaluator
from bbmstuff.quadrature import (
    SpatialRule,
    dyadic_edges,
    integrate,
    panel_rule,
    tensor_rule,
    uniform_edges,
)
from bbmstuff.sphere import sample_sphere, sphere_rule
from bbmstuff.util import blocked_sum, pairwise_sum
from bbmstuff.young import BoundYoung, YoungFunction


logger = logging.getLogger(__name__)

TENSOR = "tensor"
MONTE_CARLO = "monte-carlo"

#: Difference quotients switch to the midpoint gradient below this r.
MIDPOINT_BELOW = 1e-3
#: Largest radius evaluated on the sigma-mapped rays.
R_CEILING = 1e150

SPATIAL_PANELS = {1: 32, 2: 8, 3: 4}
SPHERE_ORDER = {1: 1, 2: 32, 3: 6}


@dataclass(frozen=True)
class SamplingPlan:
    """Everything that decides where the integrand is evaluated.

    Zero for `spatial_panels` or `sphere_order` picks a per-dimension
    default. `chunk_size` fixes the work units (x nodes for the tensor path,
    samples per block for Monte Carlo); results never depend on `workers`.

    >>> SamplingPlan(radial_levels=4)
    Traceback (most recent call last):
    ...
    bbmstuff.errors.DomainError: radial_levels must be at least 8, got 4
    """

    method: str = TENSOR
    spatial_panels: int = 0
    spatial_points: int = 8
    sphere_order: int = 0
    radial_levels: int = 16
    radial_points: int = 8
    use_rho_substitution: bool = True
    far_cutoff: float = 1.0
    far_radial_levels: int = 16
    far_panel_width: float = 0.25
    samples: int = 100_000
    seed: int = 0
    workers: int = 1
    chunk_size: int = 256
    tail_tol: float = 1e-6

    def __post_init__(self):
        if self.method not in (TENSOR, MONTE_CARLO):
            raise DomainError(f"unknown sampling method {self.method!r}")
        if not self.far_cutoff > 0.0:
            raise DomainError("far_cutoff must be positive")
        if self.radial_levels < 8:
            raise DomainError(
                f"radial_levels must be at least 8, got {self.radial_levels}"
            )
        if self.method == MONTE_CARLO and self.samples < 1000:
            raise DomainError("Monte Carlo needs at least 1000 samples")
        if min(self.spatial_points, self.radial_points) < 1:
            raise DomainError("quadrature orders must be positive")
        if self.far_radial_levels < 1 or self.far_panel_width <= 0.0:
            raise DomainError("far field mesh must be non-empty")
        if self.workers < 1 or self.chunk_size < 1:
            raise DomainError("workers and chunk_size must be positive")

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


@dataclass(frozen=True)
class ModularResult:
    """One evaluation of the modular; `value` is unscaled.

    ``value == near_field + far_field`` as summed; `scaled_value` is
    ``(1 - s) * value`` computed without dividing the near field by
    ``1 - s`` first.
    """

    s: float
    value: float
    near_field: float
    far_field: float
    tail_bound: float
    mc_stderr: Optional[float]
    scaled_value: float
    scaled_stderr: Optional[float]
    far_bound: float

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


@dataclass
class _Part:
    region: str
    weights: np.ndarray
    args: np.ndarray
    coefficients: Dict[str, np.ndarray]

    def values(self, spec: YoungFunction, lam: float) -> np.ndarray:
        bound = BoundYoung(spec, self.coefficients)
        return self.weights * bound.G(self.args / lam)


def _growth(b, a: float) -> float:
    return max(a**b.p_minus, a**b.p_plus)


@dataclass
class DifferenceSample:
    """Frozen integration nodes for one (spec, u, s, plan).

    ``evaluate(lam)`` returns the `ModularResult` of ``u / lam``. Radial
    breakpoints at the kinks of ``spec`` are placed for ``lam = 1`` only, so
    away from 1 a kinked integrand converges at the plain panel rate. Build
    a fresh sample with ``u.scale(1 / lam)`` when that accuracy matters.
    """

    spec: YoungFunction
    s: float
    method: str
    near_scaled: bool
    parts: List[_Part]
    volumes: Tuple[float, float]
    area: float
    sup_u: float
    sup_grad: float
    floors: Tuple[float, float]
    reaches: Tuple[float, float]
    far_cutoff: float
    tail_tol: float
    samples: int = 0

    def _region(self, region: str) -> List[_Part]:
        return [p for p in self.parts if p.region == region]

    def bounds(self, lam: float) -> Tuple[float, float, float]:
        """Near tail, far tails (both unscaled) and the far field bound."""
        b, s = self.spec.bounds, self.s
        v_box, v_supp = self.volumes
        near_floor, sigma_floor = self.floors
        diameter, cutoff = self.reaches
        grad = _growth(b, self.sup_grad / lam) if self.sup_grad else 0.0
        if self.method == MONTE_CARLO:
            near_tail = far_tail = 0.0
        else:
            near_tail = v_box * self.area * b.c2 * grad / b.p_minus
            if self.near_scaled:
                near_tail *= near_floor**b.p_minus / (1.0 - s)
            else:
                power = (1.0 - s) * b.p_minus
                near_tail *= near_floor**power / (1.0 - s)
            ray = sigma_floor**b.p_minus / (s * b.p_minus)
            far_tail = (
                self.area
                * b.c2
                * ray
                * (
                    v_box * _growth(b, self.sup_u / lam * diameter**-s)
                    + v_supp * _growth(b, self.sup_u / lam * cutoff**-s)
                )
            )
        c = self.far_cutoff
        decay = (c ** (-s * b.p_minus) + c ** (-s * b.p_plus)) / (s * b.p_minus)
        far_bound = (
            (v_box * 2.0**b.p_plus + v_supp)
            * b.c2
            * _growth(b, self.sup_u / lam)
            * self.area
            * decay
        )
        return near_tail, far_tail, far_bound

    def evaluate(self, lam: float = 1.0, check_tails: bool = True):
        if not lam > 0.0:
            raise DomainError("lambda must be positive")
        s = self.s
        near_parts = [p.values(self.spec, lam) for p in self._region("near")]
        far_parts = [p.values(self.spec, lam) for p in self._region("far")]
        to_scaled = 1.0 if self.near_scaled else 1.0 - s
        to_unscaled = 1.0 / (1.0 - s) if self.near_scaled else 1.0

        mc_stderr = scaled_stderr = None
        if self.method == MONTE_CARLO:
            N = self.samples
            near_z = sum(near_parts) if near_parts else np.zeros(N)
            far_z = sum(far_parts) if far_parts else np.zeros(N)
            near_raw = blocked_sum(near_z) / N
            far = blocked_sum(far_z) / N
            z_scaled = near_z * to_scaled + (1.0 - s) * far_z
            z_value = near_z * to_unscaled + far_z
            scaled_stderr = float(np.std(z_scaled, ddof=1) / np.sqrt(N))
            mc_stderr = float(np.std(z_value, ddof=1) / np.sqrt(N))
        else:
            near_raw = pairwise_sum([blocked_sum(v) for v in near_parts])
            far = pairwise_sum([blocked_sum(v) for v in far_parts])

        near = near_raw * to_unscaled
        scaled = near_raw * to_scaled + (1.0 - s) * far
        value = near + far
        near_tail, far_tail, far_bound = self.bounds(lam)
        tail = near_tail + far_tail
        if check_tails and tail > 0.0 and tail > self.tail_tol * value:
            raise TailBoundError(
                f"truncation tail too large at s={s}",
                tail,
                self.tail_tol * value,
            )
        logger.debug(
            "s=%g lam=%g near=%.6e far=%.6e tail=%.2e", s, lam, near, far, tail
        )
        return ModularResult(
            s=s,
            value=value,
            near_field=near,
            far_field=far,
            tail_bound=tail,
            mc_stderr=mc_stderr,
            scaled_value=scaled,
            scaled_stderr=scaled_stderr,
            far_bound=far_bound,
        )


# Geometry shared by the tensor and Monte Carlo builders


@dataclass(frozen=True)
class _Geometry:
    spec: YoungFunction
    u: TestFunction
    s: float
    plan: SamplingPlan
    directions: np.ndarray
    direction_weights: np.ndarray
    axis: Optional[int]
    box_low: np.ndarray
    box_high: np.ndarray

    @property
    def n(self) -> int:
        return self.u.dimension

    @property
    def area(self) -> float:
        return float(np.sum(self.direction_weights))

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.box_high - self.box_low))

    @property
    def box_volume(self) -> float:
        return float(np.prod(self.box_high - self.box_low))

    @property
    def support_volume(self) -> float:
        lows, highs = self.u.support_box()
        return float(np.prod(highs - lows))

    @property
    def rho_top(self) -> float:
        return self.plan.far_cutoff ** (1.0 - self.s)

    def rho_edges(self) -> np.ndarray:
        """Dyadic in rho, merged with the images of dyadic r edges."""
        levels, c = self.plan.radial_levels, self.plan.far_cutoff
        own = dyadic_edges(levels, self.rho_top)
        mapped = dyadic_edges(levels, c) ** (1.0 - self.s)
        edges = np.unique(np.concatenate([own, mapped]))
        return edges[edges >= own[0]]

    def r_edges(self) -> np.ndarray:
        return dyadic_edges(self.plan.radial_levels, self.plan.far_cutoff)

    def near_floor(self) -> float:
        if self.plan.use_rho_substitution:
            return self.rho_top * 2.0**-self.plan.radial_levels
        return self.plan.far_cutoff * 2.0**-self.plan.radial_levels

    def pick_directions(self, rng, m: int) -> np.ndarray:
        if self.axis is None:
            return sample_sphere(self.n, m, rng)
        signs = rng.choice([-1.0, 1.0], size=m)
        w = np.zeros((m, self.n))
        w[:, self.axis] = signs
        return w

    def exit_distance(self, y: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Distance along w from y (inside the box) to the box boundary."""
        with np.errstate(divide="ignore", invalid="ignore"):
            up = (self.box_high - y) / w
            down = (self.box_low - y) / w
        exits = np.where(w > 0.0, up, np.where(w < 0.0, down, np.inf))
        return np.min(exits, axis=-1)


def _geometry(spec, u, s, plan, axis=None) -> _Geometry:
    n = u.dimension
    if axis is None:
        rule = sphere_rule(n, plan.sphere_order or SPHERE_ORDER[n])
        directions, weights = rule.nodes, rule.weights
    else:
        directions = np.zeros((2, n))
        directions[0, axis], directions[1, axis] = -1.0, 1.0
        weights = np.ones(2)
    lows, highs = u.support_box()
    c = plan.far_cutoff
    return _Geometry(
        spec, u, s, plan, directions, weights, axis, lows - c, highs + c
    )


def _quotient(g: _Geometry, x, w, r, ux) -> np.ndarray:
    """``|u(x) - u(x - r w)| / r`` with the midpoint gradient for small r."""
    u = g.u
    r_ = r[..., None]
    far = r >= MIDPOINT_BELOW
    safe = np.where(far, r, 1.0)
    direct = np.abs(ux - u(x - r_ * w)) / safe
    close = ~far
    if np.any(close):
        xb = np.broadcast_to(x, r.shape + x.shape[-1:])[close]
        wb = np.broadcast_to(w, r.shape + w.shape[-1:])[close]
        mid = xb - 0.5 * r[close][:, None] * wb
        direct[close] = np.abs(np.sum(u.grad(mid) * wb, axis=-1))
    return direct


def _sigma_rule(plan: SamplingPlan):
    return panel_rule(dyadic_edges(plan.far_radial_levels), plan.radial_points)


def _sigma_map(reach: np.ndarray, sigma: np.ndarray, s: float) -> np.ndarray:
    return np.minimum(reach * np.exp(-np.log(sigma) / s), R_CEILING)


def _coefficients(spec: YoungFunction, x, y, shape) -> Dict[str, np.ndarray]:
    if not spec.spatial:
        return spec.coefficients(None, None)
    coefficients = spec.coefficients(x, y)
    return {
        k: np.broadcast_to(v, shape).ravel() for k, v in coefficients.items()
    }


def _part(region, spec, weights, args, x, y) -> _Part:
    shape = np.broadcast_shapes(weights.shape, args.shape)
    weights = np.broadcast_to(weights, shape).ravel()
    args = np.broadcast_to(args, shape).ravel()
    coefficients = _coefficients(spec, x, y, shape)
    return _Part(region, weights, args, coefficients)


def _compact(parts: Sequence[_Part]) -> List[_Part]:
    """Concatenate per-region chunks, dropping nodes with a zero argument."""
    merged = []
    for region in ("near", "far"):
        chunks = [p for p in parts if p.region == region]
        if not chunks:
            continue
        keep = [p.args > 0.0 for p in chunks]
        weights = np.concatenate([p.weights[k] for p, k in zip(chunks, keep)])
        args = np.concatenate([p.args[k] for p, k in zip(chunks, keep)])
        coefficients = {}
        for key, value in chunks[0].coefficients.items():
            if np.ndim(value) == 0:
                coefficients[key] = value
            else:
                coefficients[key] = np.concatenate(
                    [p.coefficients[key][k] for p, k in zip(chunks, keep)]
                )
        merged.append(_Part(region, weights, args, coefficients))
    return merged


# Tensor builder


def _tensor_near(g: _Geometry, x: np.ndarray, wx: np.ndarray) -> _Part:
    spec, s, plan = g.spec, g.s, g.plan
    w, ww = g.directions, g.direction_weights
    ux = g.u(x)[:, None, None]
    xb = x[:, None, None, :]
    wb = w[None, :, None, :]
    kinks = spec.kinks()
    rho_plan = plan.use_rho_substitution
    base = g.rho_edges() if rho_plan else g.r_edges()
    if kinks:
        slope = np.abs(g.u.grad(x) @ w.T)
        with np.errstate(divide="ignore", over="ignore"):
            extra = [np.divide(k, slope) for k in kinks]
            if not rho_plan:
                extra = [e ** (1.0 / (1.0 - s)) for e in extra]
        extra = [np.clip(e, base[0], base[-1]) for e in extra]
        grid = np.broadcast_to(base, slope.shape + base.shape)
        edges = np.sort(
            np.concatenate([grid, np.stack(extra, axis=-1)], axis=-1), axis=-1
        )
        nodes, weights = panel_rule(edges, plan.radial_points)
    else:
        nodes, weights = panel_rule(base, plan.radial_points)
        nodes, weights = nodes[None, None, :], weights[None, None, :]
    if rho_plan:
        r = np.exp(np.log(nodes) / (1.0 - s))
        stretch = nodes
    else:
        r = nodes
        stretch = nodes ** (1.0 - s)
    r = np.broadcast_to(r, (len(x), len(w), r.shape[-1]))
    Q = _quotient(g, xb, wb, r, ux)
    args = Q * stretch
    node_weights = wx[:, None, None] * ww[None, :, None] * weights / nodes
    y = xb - r[..., None] * wb
    return _part("near", spec, node_weights, args, xb, y)


def _tensor_far(g: _Geometry, x: np.ndarray, wx: np.ndarray) -> List[_Part]:
    spec, s, plan = g.spec, g.s, g.plan
    w, ww = g.directions, g.direction_weights
    ux = g.u(x)
    xb = x[:, None, None, :]
    wb = w[None, :, None, :]
    R = g.diameter
    parts = []

    edges = uniform_edges(plan.far_cutoff, R, plan.far_panel_width)
    r, wr = panel_rule(edges, plan.radial_points)
    y = xb - r[None, None, :, None] * wb
    args = np.abs(ux[:, None, None] - g.u(y)) / r**s
    weights = wx[:, None, None] * ww[None, :, None] * wr / r
    parts.append(_part("far", spec, weights, args, xb, y))

    sigma, wsig = _sigma_rule(plan)
    r = _sigma_map(R, sigma, s)
    y = xb - r[None, None, :, None] * wb
    args = np.abs(ux)[:, None, None] * R**-s * sigma
    weights = wx[:, None, None] * ww[None, :, None] * wsig / (s * sigma)
    parts.append(_part("far", spec, weights, args, xb, y))
    return parts


def _tensor_exterior(g: _Geometry, y: np.ndarray, wy: np.ndarray) -> _Part:
    spec, s, plan = g.spec, g.s, g.plan
    w, ww = g.directions, g.direction_weights
    uy = np.abs(g.u(y))
    r0 = g.exit_distance(y[:, None, :], w[None, :, :])
    sigma, wsig = _sigma_rule(plan)
    r = _sigma_map(r0[..., None], sigma, s)
    yb = y[:, None, None, :]
    x = yb + r[..., None] * w[None, :, None, :]
    args = uy[:, None, None] * r0[..., None] ** -s * sigma
    weights = wy[:, None, None] * ww[None, :, None] * wsig / (s * sigma)
    return _part("far", spec, weights, args, x, yb)


def _chunks(rule: SpatialRule, size: int) -> Iterator[Tuple]:
    for start in range(0, len(rule), size):
        stop = start + size
        yield rule.nodes[start:stop], rule.weights[start:stop]


def _tensor_parts(g: _Geometry) -> List[_Part]:
    plan, u = g.plan, g.u
    n = u.dimension
    panels = plan.spatial_panels or SPATIAL_PANELS[n]
    lows, highs = u.support_box()
    breaks = [
        [lows[i], highs[i], *(u.breaks[i] if i < len(u.breaks) else ())]
        for i in range(n)
    ]
    box = tensor_rule(
        g.box_low, g.box_high, panels, plan.spatial_points, breaks
    )
    support = u.spatial_rule(panels, plan.spatial_points)

    def near_far(chunk):
        x, wx = chunk
        return [_tensor_near(g, x, wx), *_tensor_far(g, x, wx)]

    def exterior(chunk):
        return [_tensor_exterior(g, *chunk)]

    jobs = [(near_far, c) for c in _chunks(box, plan.chunk_size)]
    jobs += [(exterior, c) for c in _chunks(support, plan.chunk_size)]
    with ThreadPoolExecutor(max_workers=plan.workers) as pool:
        results = list(pool.map(lambda job: job[0](job[1]), jobs))
    logger.debug(
        "tensor sample: %d box nodes, %d support nodes, %d chunks",
        len(box),
        len(support),
        len(jobs),
    )
    return _compact([p for parts in results for p in parts])


# Monte Carlo builder


def _mc_block(g: _Geometry, seed, m: int) -> List[_Part]:
    spec, s, plan = g.spec, g.s, g.plan
    rng = np.random.default_rng(seed)
    volume, area = g.box_volume, g.area
    c, R = plan.far_cutoff, g.diameter

    x = rng.uniform(g.box_low, g.box_high, (m, g.n))
    w = g.pick_directions(rng, m)
    ux = g.u(x)

    # r drawn with density proportional to r**-s on (0, c], i.e. rho uniform
    rho = g.rho_top * (1.0 - rng.random(m))
    r = np.exp(np.log(rho) / (1.0 - s))
    Q = _quotient(g, x, w, r, ux)
    y = x - r[:, None] * w
    near = _part("near", spec, volume * area * g.rho_top / rho, Q * rho, x, y)

    r = rng.uniform(c, R, m)
    y = x - r[:, None] * w
    args = np.abs(ux - g.u(y)) / r**s
    far = _part("far", spec, volume * area * (R - c) / r, args, x, y)

    sigma = 1.0 - rng.random(m)
    r = _sigma_map(R, sigma, s)
    y = x - r[:, None] * w
    args = np.abs(ux) * R**-s * sigma
    tail = _part("far", spec, volume * area / (s * sigma), args, x, y)

    lows, highs = g.u.support_box()
    y = rng.uniform(lows, highs, (m, g.n))
    w = g.pick_directions(rng, m)
    r0 = g.exit_distance(y, w)
    sigma = 1.0 - rng.random(m)
    r = _sigma_map(r0, sigma, s)
    x = y + r[:, None] * w
    args = np.abs(g.u(y)) * r0**-s * sigma
    weights = g.support_volume * area / (s * sigma)
    exterior = _part("far", spec, weights, args, x, y)
    return [near, far, tail, exterior]


def _mc_parts(g: _Geometry) -> List[_Part]:
    plan = g.plan
    sizes = [
        min(plan.chunk_size, plan.samples - start)
        for start in range(0, plan.samples, plan.chunk_size)
    ]
    seeds = np.random.SeedSequence(plan.seed).spawn(len(sizes))
    with ThreadPoolExecutor(max_workers=plan.workers) as pool:
        blocks = list(pool.map(lambda a: _mc_block(g, *a), zip(seeds, sizes)))
    merged = []
    for index, region in enumerate(("near", "far", "far", "far")):
        chunk = [b[index] for b in blocks]
        coefficients = {}
        for key, value in chunk[0].coefficients.items():
            if np.ndim(value) == 0:
                coefficients[key] = value
            else:
                coefficients[key] = np.concatenate(
                    [p.coefficients[key] for p in chunk]
                )
        merged.append(
            _Part(
                region,
                np.concatenate([p.weights for p in chunk]),
                np.concatenate([p.args for p in chunk]),
                coefficients,
            )
        )
    return merged


def _check_s(s: float):
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s}")


def sample_differences(
    spec: YoungFunction,
    u: TestFunction,
    s: float,
    plan: SamplingPlan,
    axis: Optional[int] = None,
) -> DifferenceSample:
    """Build the integration nodes of the modular of `u`.

    With `axis` (zero-based) only the directions ``+-e_axis`` are used, each
    with weight 1, which gives the directional modular.
    """
    _check_s(s)
    if axis is not None and not 0 <= axis < u.dimension:
        raise DomainError(f"axis {axis} out of range for n={u.dimension}")
    g = _geometry(spec, u, s, plan, axis)
    if u.is_zero:
        parts = []
    elif plan.method == MONTE_CARLO:
        parts = _mc_parts(g)
    else:
        parts = _tensor_parts(g)
    near_scaled = plan.use_rho_substitution or plan.method == MONTE_CARLO
    sigma_floor = 2.0**-plan.far_radial_levels
    return DifferenceSample(
        spec=spec,
        s=s,
        method=plan.method,
        near_scaled=near_scaled,
        parts=parts,
        volumes=(g.box_volume, g.support_volume),
        area=g.area,
        sup_u=u.sup_u,
        sup_grad=u.sup_grad,
        floors=(g.near_floor(), sigma_floor),
        reaches=(g.diameter, plan.far_cutoff),
        far_cutoff=plan.far_cutoff,
        tail_tol=plan.tail_tol,
        samples=plan.samples if plan.method == MONTE_CARLO else 0,
    )


def modular_Js(
    spec: YoungFunction, u: TestFunction, s: float, plan: SamplingPlan
) -> ModularResult:
    """The modular of `u` with its near/far split and diagnostics."""
    return sample_differences(spec, u, s, plan).evaluate()


def scaled_modular(
    spec: YoungFunction, u: TestFunction, s: float, plan: SamplingPlan
) -> float:
    """``(1 - s) * modular_Js(...).value``."""
    return modular_Js(spec, u, s, plan).scaled_value


def modular_aniso(
    spec: YoungFunction,
    u: TestFunction,
    s: float,
    k: int,
    plan: SamplingPlan,
) -> ModularResult:
    """The directional modular along the axis ``1 <= k <= n``."""
    if not 1 <= k <= u.dimension:
        raise DomainError(f"axis {k} out of range for n={u.dimension}")
    return sample_differences(spec, u, s, plan, axis=k - 1).evaluate()


def local_modular(young, field, domain_quad: SpatialRule) -> float:
    """``integral of young(x, |field(x)|) dx``.

    `young` is an `H0Evaluator` or a Young function, used on the diagonal.
    """
    if isinstance(young, H0Evaluator):

        def integrand(x):
            return young(x, np.abs(field(x)))

    else:

        def integrand(x):
            return young.G(x, x, np.abs(field(x)))

    return integrate(domain_quad, integrand)
