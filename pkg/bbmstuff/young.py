"""Generalized Young functions G(x, y, t).

A Young function here is a frozen dataclass that knows its closed form, its
density g = dG/dt and its declared growth bounds. Point arguments are arrays
whose last axis is the space dimension; leading axes broadcast against `t`.

Variants register themselves by name when they are defined, so configuration
files can refer to them as plain strings:

>>> sorted(YoungFunction.registry())
['doublephase', 'power', 'powerlog', 'spacefree', 'varexp']
>>> float(eval_G(Power(2.0), None, None, 3.0))
9.0
>>> float(eval_g(Power(2.0), None, None, 3.0))
6.0
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, ClassVar, Dict, Mapping, Optional, Tuple

import numpy as np
from scipy.optimize import bisect

from bbmstuff.errors import ContractViolation, DomainError


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GrowthBounds:
    """Declared constants: ``p_minus <= t g / G <= p_plus`` and
    ``c1 <= G(x, y, 1) <= c2``.

    >>> GrowthBounds(2.0, 3.0, 1.0, 2.0).p_plus
    3.0
    >>> GrowthBounds(3.0, 2.0, 1.0, 1.0)
    Traceback (most recent call last):
    ...
    bbmstuff.errors.DomainError: need 1 < p_minus <= p_plus < inf, got 3.0, 2.0
    """

    p_minus: float
    p_plus: float
    c1: float
    c2: float

    def __post_init__(self):
        if not (1.0 < self.p_minus <= self.p_plus < np.inf):
            raise DomainError(
                "need 1 < p_minus <= p_plus < inf, "
                f"got {self.p_minus}, {self.p_plus}"
            )
        if not (0.0 < self.c1 <= self.c2 < np.inf):
            raise DomainError(
                f"need 0 < c1 <= c2 < inf, got {self.c1}, {self.c2}"
            )

    def to_dict(self) -> Dict[str, float]:
        return {
            "p_minus": self.p_minus,
            "p_plus": self.p_plus,
            "c1": self.c1,
            "c2": self.c2,
        }


def _leading_shape(x, y) -> Tuple[int, ...]:
    return np.broadcast_shapes(np.shape(x)[:-1], np.shape(y)[:-1])


def smooth_bump(z: np.ndarray, width: float = 1.0) -> np.ndarray:
    """The C-infinity bump ``exp(1 - 1 / (1 - |z / width|**2))``, peak 1.

    >>> float(smooth_bump(np.zeros(2)))
    1.0
    >>> float(smooth_bump(np.array([1.0, 0.0])))
    0.0
    """
    q = np.sum((np.asarray(z, dtype=float) / width) ** 2, axis=-1)
    inside = q < 1.0
    safe = np.where(inside, q, 0.0)
    return np.where(inside, np.exp(1.0 - 1.0 / (1.0 - safe)), 0.0)


# Point fields


@dataclass(frozen=True)
class PointField:
    """A named function of ``(x, y)`` with declared bounds.

    Only registered built-ins can be constructed from configuration, see
    `coefficient_field` and `exponent_field`.
    """

    kind: str
    params: Tuple[Tuple[str, float], ...]
    lower: float
    upper: float
    evaluator: Callable = field(compare=False, repr=False)

    def __call__(self, x, y) -> np.ndarray:
        return np.broadcast_to(self.evaluator(x, y), _leading_shape(x, y))

    def to_dict(self) -> Dict[str, object]:
        return {"kind": self.kind, **dict(self.params)}


class CoefficientField(PointField):
    """A coefficient ``0 < a_minus <= a(x, y) <= a_plus``."""


class ExponentField(PointField):
    """An exponent ``1 < p_minus <= p(x, y) <= p_plus``."""


_COEFFICIENTS: Dict[str, Callable[..., CoefficientField]] = {}
_EXPONENTS: Dict[str, Callable[..., ExponentField]] = {}


def _registers(table, kind):
    def decorate(builder):
        table[kind] = builder
        return builder

    return decorate


@_registers(_COEFFICIENTS, "constant")
def _constant_coefficient(value: float = 1.0) -> CoefficientField:
    return CoefficientField(
        "constant",
        (("value", value),),
        value,
        value,
        lambda x, y: np.full(_leading_shape(x, y), value),
    )


@_registers(_COEFFICIENTS, "smooth-bump-modulated")
def _bump_coefficient(
    base: float = 1.0, amp: float = 0.5, width: float = 1.0, center=0.0
) -> CoefficientField:
    return CoefficientField(
        "smooth-bump-modulated",
        (("base", base), ("amp", amp), ("width", width), ("center", center)),
        base,
        base + amp,
        lambda x, y: base + amp * smooth_bump(np.asarray(y) - center, width),
    )


@_registers(_COEFFICIENTS, "product-bump")
def _product_coefficient(
    base: float = 1.0, amp: float = 0.5, width: float = 1.0
) -> CoefficientField:
    return CoefficientField(
        "product-bump",
        (("base", base), ("amp", amp), ("width", width)),
        base,
        base + amp,
        lambda x, y: base
        + amp * smooth_bump(x, width) * smooth_bump(y, width),
    )


@_registers(_EXPONENTS, "constant")
def _constant_exponent(value: float = 2.0) -> ExponentField:
    return ExponentField(
        "constant",
        (("value", value),),
        value,
        value,
        lambda x, y: np.full(_leading_shape(x, y), value),
    )


@_registers(_EXPONENTS, "smooth-bump-modulated")
def _bump_exponent(
    base: float = 2.0, amp: float = 0.5, width: float = 1.0, center=0.0
) -> ExponentField:
    return ExponentField(
        "smooth-bump-modulated",
        (("base", base), ("amp", amp), ("width", width), ("center", center)),
        base,
        base + amp,
        lambda x, y: base + amp * smooth_bump(np.asarray(y) - center, width),
    )


@_registers(_EXPONENTS, "distance-clipped")
def _distance_exponent(base: float = 2.0, cap: float = 3.0) -> ExponentField:
    def evaluate(x, y):
        dist = np.linalg.norm(np.asarray(x) - np.asarray(y), axis=-1)
        return np.clip(base + dist, base, cap)

    return ExponentField(
        "distance-clipped", (("base", base), ("cap", cap)), base, cap, evaluate
    )


def coefficient_field(kind: str, **params: float) -> CoefficientField:
    """Build a registered coefficient field.

    >>> a = coefficient_field("constant", value=2.0)
    >>> float(a(np.zeros(1), np.ones(1)))
    2.0
    """
    try:
        built = _COEFFICIENTS[kind](**params)
    except KeyError:
        raise DomainError(f"unknown coefficient field {kind!r}") from None
    if built.lower <= 0.0 or built.upper < built.lower:
        raise DomainError("coefficient bounds must satisfy 0 < lower <= upper")
    return built


def exponent_field(kind: str, **params: float) -> ExponentField:
    """Build a registered exponent field."""
    try:
        built = _EXPONENTS[kind](**params)
    except KeyError:
        raise DomainError(f"unknown exponent field {kind!r}") from None
    if built.lower <= 1.0 or built.upper < built.lower:
        raise DomainError("exponent bounds must satisfy 1 < lower <= upper")
    return built


def _field_from_dict(builder, data: Optional[Mapping]):
    if data is None:
        return builder("constant")
    params = {k: float(v) for k, v in data.items() if k != "kind"}
    return builder(str(data.get("kind", "constant")), **params)


# Scalar Young functions for the space-free family

_SCALARS: Dict[str, Tuple[Callable, Callable, Callable]] = {
    # name: (A, A', declared bounds from p)
    "power": (
        lambda t, p: t**p,
        lambda t, p: p * t ** (p - 1.0),
        lambda p: GrowthBounds(p, p, 1.0, 1.0),
    ),
    "plog1p": (
        lambda t, p: t**p * np.log1p(t),
        lambda t, p: p * t ** (p - 1.0) * np.log1p(t) + t**p / (1.0 + t),
        lambda p: GrowthBounds(p, p + 1.0, np.log(2.0), np.log(2.0)),
    ),
}


def _check_t(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise DomainError("Young functions are only defined for t >= 0")
    return t


class YoungFunction(ABC):
    """Base class of the closed family of variants.

    Subclasses pass ``kind=...`` in their class statement and are then
    available through `YoungFunction.registry`.
    """

    KIND: ClassVar[str]
    _REGISTRY: ClassVar[Dict[str, type]] = {}
    bounds: GrowthBounds

    def __init_subclass__(cls, kind: Optional[str] = None, **kwargs) -> None:
        super().__init_subclass__(**kwargs)
        if kind is not None:
            cls.KIND = kind
            YoungFunction._REGISTRY[kind] = cls

    @staticmethod
    def registry() -> Dict[str, type]:
        return dict(YoungFunction._REGISTRY)

    def _declare(self, bounds: GrowthBounds):
        if self.bounds is None:
            object.__setattr__(self, "bounds", bounds)

    # subclasses implement these three on pre-evaluated coefficients

    def coefficients(self, x, y) -> Dict[str, np.ndarray]:
        return {}

    @abstractmethod
    def _G(self, c: Mapping[str, np.ndarray], t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def _g(self, c: Mapping[str, np.ndarray], t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def spatial(self) -> bool:
        """Whether G depends on (x, y) at all."""
        return True

    def kinks(self) -> Tuple[float, ...]:
        """Values of t where the density jumps."""
        return ()

    def G(self, x, y, t) -> np.ndarray:
        return self._G(self.coefficients(x, y), _check_t(t))

    def g(self, x, y, t) -> np.ndarray:
        return self._g(self.coefficients(x, y), _check_t(t))

    def bind(self, x, y) -> "BoundYoung":
        """Freeze the coefficients at fixed point pairs."""
        return BoundYoung(self, self.coefficients(x, y))

    @abstractmethod
    def params(self) -> Dict[str, object]:
        raise NotImplementedError

    def to_dict(self) -> Dict[str, object]:
        return {
            "kind": self.KIND,
            **self.params(),
            "bounds": self.bounds.to_dict(),
        }


@dataclass(frozen=True)
class BoundYoung:
    """A Young function with its coefficients already evaluated."""

    spec: YoungFunction
    coefficients: Mapping[str, np.ndarray]

    def G(self, t) -> np.ndarray:
        return self.spec._G(self.coefficients, np.asarray(t, dtype=float))

    def g(self, t) -> np.ndarray:
        return self.spec._g(self.coefficients, np.asarray(t, dtype=float))


@dataclass(frozen=True)
class Power(YoungFunction, kind="power"):
    """``G = t**p``."""

    p: float
    bounds: Optional[GrowthBounds] = None

    def __post_init__(self):
        self._declare(GrowthBounds(self.p, self.p, 1.0, 1.0))

    @property
    def spatial(self):
        return False

    def _G(self, c, t):
        return t**self.p

    def _g(self, c, t):
        return self.p * t ** (self.p - 1.0)

    def params(self):
        return {"p": self.p}


@dataclass(frozen=True)
class PowerLog(YoungFunction, kind="powerlog"):
    """``G = a(x, y) t**p (log+ t + 1)``.

    The density jumps at t = 1; the right-continuous branch is used there.
    ``t g / G`` stays in ``[p, p + 1]``.

    >>> spec = PowerLog(2.0)
    >>> float(spec.G(None, None, np.e)) == float(np.e**2 * 2.0)
    True
    >>> float(spec.g(None, None, 1.0))
    3.0
    """

    p: float
    coefficient: CoefficientField = field(
        default_factory=lambda: coefficient_field("constant")
    )
    bounds: Optional[GrowthBounds] = None

    def __post_init__(self):
        a = self.coefficient
        self._declare(GrowthBounds(self.p, self.p + 1.0, a.lower, a.upper))

    @property
    def spatial(self):
        return self.coefficient.kind != "constant"

    def coefficients(self, x, y):
        if not self.spatial:
            return {"a": np.asarray(self.coefficient.lower)}
        return {"a": self.coefficient(x, y)}

    def kinks(self):
        return (1.0,)

    def _G(self, c, t):
        return c["a"] * t**self.p * (np.log(np.maximum(t, 1.0)) + 1.0)

    def _g(self, c, t):
        p = self.p
        below = p * t ** (p - 1.0)
        above = t ** (p - 1.0) * (p * (np.log(np.maximum(t, 1.0)) + 1.0) + 1.0)
        return c["a"] * np.where(t < 1.0, below, above)

    def params(self):
        return {"p": self.p, "coefficient": self.coefficient.to_dict()}


@dataclass(frozen=True)
class DoublePhase(YoungFunction, kind="doublephase"):
    """``G = t**q + a(x, y) t**p`` with ``q <= p``.

    >>> float(DoublePhase(2.0, 3.0).G(None, None, 2.0))
    12.0
    """

    q: float
    p: float
    coefficient: CoefficientField = field(
        default_factory=lambda: coefficient_field("constant")
    )
    bounds: Optional[GrowthBounds] = None

    def __post_init__(self):
        if self.q > self.p:
            raise DomainError("double phase needs q <= p")
        a = self.coefficient
        self._declare(
            GrowthBounds(self.q, self.p, 1.0 + a.lower, 1.0 + a.upper)
        )

    @property
    def spatial(self):
        return self.coefficient.kind != "constant"

    def coefficients(self, x, y):
        if not self.spatial:
            return {"a": np.asarray(self.coefficient.lower)}
        return {"a": self.coefficient(x, y)}

    def _G(self, c, t):
        return t**self.q + c["a"] * t**self.p

    def _g(self, c, t):
        return self.q * t ** (self.q - 1.0) + c["a"] * self.p * t ** (
            self.p - 1.0
        )

    def params(self):
        return {
            "q": self.q,
            "p": self.p,
            "coefficient": self.coefficient.to_dict(),
        }


@dataclass(frozen=True)
class VariableExponent(YoungFunction, kind="varexp"):
    """``G = a(x, y) t**p(x, y)``."""

    exponent: ExponentField
    coefficient: CoefficientField = field(
        default_factory=lambda: coefficient_field("constant")
    )
    bounds: Optional[GrowthBounds] = None

    def __post_init__(self):
        a, p = self.coefficient, self.exponent
        self._declare(GrowthBounds(p.lower, p.upper, a.lower, a.upper))

    def coefficients(self, x, y):
        return {"a": self.coefficient(x, y), "p": self.exponent(x, y)}

    def _G(self, c, t):
        return c["a"] * t ** c["p"]

    def _g(self, c, t):
        return c["a"] * c["p"] * t ** (c["p"] - 1.0)

    def params(self):
        return {
            "exponent": self.exponent.to_dict(),
            "coefficient": self.coefficient.to_dict(),
        }


@dataclass(frozen=True)
class SpaceFree(YoungFunction, kind="spacefree"):
    """``G = A(t)`` for a registered scalar Young function A.

    >>> spec = SpaceFree("plog1p", 2.0)
    >>> spec.bounds.p_plus
    3.0
    """

    scalar: str
    p: float
    bounds: Optional[GrowthBounds] = None

    def __post_init__(self):
        if self.scalar not in _SCALARS:
            raise DomainError(f"unknown scalar Young function {self.scalar!r}")
        self._declare(_SCALARS[self.scalar][2](self.p))

    @property
    def spatial(self):
        return False

    def _G(self, c, t):
        return _SCALARS[self.scalar][0](t, self.p)

    def _g(self, c, t):
        return _SCALARS[self.scalar][1](t, self.p)

    def params(self):
        return {"scalar": self.scalar, "p": self.p}


def spec_from_dict(data: Mapping[str, object]) -> YoungFunction:
    """Rebuild a Young function from `YoungFunction.to_dict` output.

    Declared bounds are taken from the dict when present, so a deliberately
    wrong declaration survives a round trip.

    >>> spec = DoublePhase(2.0, 3.0)
    >>> spec_from_dict(spec.to_dict()) == spec
    True
    """
    kind = str(data.get("kind"))
    bounds = data.get("bounds")
    bounds = GrowthBounds(**bounds) if bounds else None
    if kind == "power":
        return Power(float(data["p"]), bounds=bounds)
    if kind == "powerlog":
        return PowerLog(
            float(data["p"]),
            _field_from_dict(coefficient_field, data.get("coefficient")),
            bounds=bounds,
        )
    if kind == "doublephase":
        return DoublePhase(
            float(data["q"]),
            float(data["p"]),
            _field_from_dict(coefficient_field, data.get("coefficient")),
            bounds=bounds,
        )
    if kind == "varexp":
        return VariableExponent(
            _field_from_dict(exponent_field, data.get("exponent")),
            _field_from_dict(coefficient_field, data.get("coefficient")),
            bounds=bounds,
        )
    if kind == "spacefree":
        return SpaceFree(str(data["scalar"]), float(data["p"]), bounds=bounds)
    raise DomainError(f"unknown Young function kind {kind!r}")


def spec_from_mapping(flat: Mapping[str, str]) -> YoungFunction:
    """Parse the flat ``key = value`` form used in config files.

    Nested fields use dotted keys, e.g. ``coefficient.base = 1``.

    >>> spec = spec_from_mapping({"kind": "doublephase", "q": "2", "p": "3",
    ...                           "coefficient": "constant",
    ...                           "coefficient.value": "2"})
    >>> spec.bounds.c2
    3.0
    """
    data: Dict[str, object] = {}
    nested: Dict[str, Dict[str, object]] = {}
    for key, value in flat.items():
        if "." in key:
            head, tail = key.split(".", 1)
            if head == "bounds":
                nested.setdefault(head, {})[tail] = float(value)
            else:
                nested.setdefault(head, {})[tail] = value
        elif key in ("coefficient", "exponent"):
            nested.setdefault(key, {})["kind"] = value
        else:
            data[key] = value
    data.update(nested)
    return spec_from_dict(data)


PRESETS: Dict[str, Dict[str, object]] = {
    "power2": {"kind": "power", "p": 2.0},
    "power3": {"kind": "power", "p": 3.0},
    "powerlog": {
        "kind": "powerlog",
        "p": 2.0,
        "coefficient": {"kind": "constant", "value": 1.0},
    },
    "doublephase": {
        "kind": "doublephase",
        "q": 2.0,
        "p": 3.0,
        "coefficient": {
            "kind": "smooth-bump-modulated",
            "base": 1.0,
            "amp": 0.5,
            "width": 1.0,
        },
    },
    "varexp": {
        "kind": "varexp",
        "exponent": {
            "kind": "smooth-bump-modulated",
            "base": 2.0,
            "amp": 0.5,
            "width": 1.0,
        },
        "coefficient": {"kind": "constant", "value": 1.0},
    },
    "plog1p": {"kind": "spacefree", "scalar": "plog1p", "p": 2.0},
}


def preset(name: str) -> YoungFunction:
    """A built-in Young function by id.

    >>> preset("power2")
    Power(p=2.0, bounds=GrowthBounds(p_minus=2.0, p_plus=2.0, c1=1.0, c2=1.0))
    """
    try:
        return spec_from_dict(PRESETS[name])
    except KeyError:
        raise DomainError(f"unknown Young function preset {name!r}") from None


# Operations


def eval_G(spec: YoungFunction, x, y, t) -> np.ndarray:
    """G(x, y, t), closed form per variant."""
    return spec.G(x, y, t)


def eval_g(spec: YoungFunction, x, y, t) -> np.ndarray:
    """The right-continuous density g(x, y, t)."""
    return spec.g(x, y, t)


def eval_G_bar(spec: YoungFunction, x, t) -> np.ndarray:
    """The diagonal restriction G(x, x, t).

    >>> spec = VariableExponent(exponent_field("distance-clipped"))
    >>> float(eval_G_bar(spec, np.array([0.7]), 2.0))
    4.0
    """
    return spec.G(x, x, t)


def complementary(spec: YoungFunction, x, y, t: float, max_doublings=200):
    """The conjugate ``sup_w (t w - G(x, y, w))`` at a single point pair.

    The maximiser solves g(w) = t; it is found by bisection on the monotone
    density after doubling the bracket until g exceeds t.

    >>> round(complementary(Power(2.0), None, None, 2.0), 10)
    1.0
    >>> complementary(Power(3.0), None, None, 0.0)
    0.0
    """
    t = float(_check_t(t))
    if t == 0.0:
        return 0.0
    bound = spec.bind(x, y)

    def excess(w):
        return float(np.squeeze(bound.g(w))) - t

    hi = 1.0
    for _ in range(max_doublings):
        if excess(hi) >= 0.0:
            break
        hi *= 2.0
    else:
        raise ContractViolation(
            f"density stays below {t} up to w={hi}; it must be unbounded"
        )
    if excess(hi) == 0.0:
        w = hi
    else:
        w = bisect(excess, 0.0, hi, xtol=1e-15, maxiter=400)
    return t * w - float(np.squeeze(bound.G(w)))


@dataclass
class StructureReport:
    """Largest signed slack per property; a property holds when its slack is
    at most its tolerance."""

    kind: str
    samples: int
    slacks: Dict[str, float] = field(default_factory=dict)
    tolerances: Dict[str, float] = field(default_factory=dict)

    def record(self, name: str, slack, tol: float):
        self.slacks[name] = float(np.max(slack)) if np.size(slack) else -np.inf
        self.tolerances[name] = tol

    def violations(self) -> Dict[str, float]:
        return {
            name: slack
            for name, slack in self.slacks.items()
            if not slack <= self.tolerances[name]
        }

    @property
    def passed(self) -> bool:
        return not self.violations()


IDENTITY_TOL = 1e-9
TRANSFORM_TOL = 1e-6


def _relative(excess, scale):
    return excess / np.maximum(np.abs(scale), 1e-300)


def verify_structure(
    spec: YoungFunction,
    samples: int = 1000,
    seed: int = 0,
    dimension: int = 1,
    box: float = 2.0,
    conjugate_samples: Optional[int] = None,
) -> StructureReport:
    """Check the structural hypotheses and their consequences on random
    samples and report the worst slack of each.

    Slacks are relative, positive means violated. The conjugate-based checks
    use `conjugate_samples` points (default: all of them) since each needs a
    root solve.
    """
    rng = np.random.default_rng(seed)
    b = spec.bounds
    pm, pp = b.p_minus, b.p_plus
    x = rng.uniform(-box, box, (samples, dimension))
    y = rng.uniform(-box, box, (samples, dimension))
    t = 10.0 ** rng.uniform(-2.0, 2.0, samples)
    t2 = 10.0 ** rng.uniform(-2.0, 2.0, samples)
    a = 10.0 ** rng.uniform(-2.0, 2.0, samples)
    bound = spec.bind(x, y)
    report = StructureReport(spec.KIND, samples)

    report.record("zero-at-origin", np.abs(bound.G(np.zeros(samples))), 0.0)

    lo, hi = np.minimum(t, t2), np.maximum(t, t2)
    hi = np.where(hi > lo, hi, lo * (1.0 + 1e-3))
    G_lo, G_hi = bound.G(lo), bound.G(hi)
    report.record("strictly-increasing", _relative(G_lo - G_hi, G_hi), 0.0)
    mid = bound.G(0.5 * (lo + hi))
    chord = 0.5 * (G_lo + G_hi)
    report.record("convexity", _relative(mid - chord, chord), IDENTITY_TOL)

    at_one = bound.G(np.ones(samples))
    report.record(
        "unit-level-bounds",
        np.maximum(b.c1 - at_one, at_one - b.c2) / b.c2,
        IDENTITY_TOL,
    )

    ratio = t * bound.g(t) / bound.G(t)
    report.record(
        "growth-ratio", np.maximum(pm - ratio, ratio - pp), IDENTITY_TOL
    )

    G_b, G_ab = bound.G(t), bound.G(a * t)
    low = np.minimum(a**pm, a**pp) * G_b
    high = np.maximum(a**pm, a**pp) * G_b
    report.record(
        "scaling-chain",
        np.maximum(_relative(low - G_ab, G_ab), _relative(G_ab - high, high)),
        IDENTITY_TOL,
    )
    low = b.c1 * np.minimum(t**pm, t**pp)
    high = b.c2 * np.maximum(t**pm, t**pp)
    report.record(
        "power-growth-chain",
        np.maximum(_relative(low - G_b, G_b), _relative(G_b - high, high)),
        IDENTITY_TOL,
    )

    m = samples
    if conjugate_samples is not None:
        m = min(samples, conjugate_samples)
    conj_slack = np.empty(m)
    young_slack = np.empty(m)
    for i in range(m):
        xi, yi, ti = x[i], y[i], t[i]
        gi = float(spec.g(xi, yi, ti))
        Gi = float(spec.G(xi, yi, ti))
        conj = complementary(spec, xi, yi, gi)
        conj_slack[i] = (conj - pp * Gi) / (pp * Gi)
        ai, bi = a[i], t2[i]
        product = ai * bi
        rhs = float(spec.G(xi, yi, ai)) + complementary(spec, xi, yi, bi)
        young_slack[i] = (product - rhs) / max(product, 1.0)
    report.record("conjugate-at-density", conj_slack, TRANSFORM_TOL)
    report.record("young-inequality", young_slack, TRANSFORM_TOL)

    for name in ("coefficient", "exponent"):
        fld = getattr(spec, name, None)
        if fld is None:
            continue
        values = fld(x, y)
        report.record(
            f"{name}-bounds",
            np.maximum(fld.lower - values, values - fld.upper),
            IDENTITY_TOL,
        )
        step = 1e-7 * rng.standard_normal((samples, dimension))
        modulus = np.abs(fld(x, y + step) - values)
        report.record(f"{name}-continuity", modulus - 1e-4, 0.0)

    if not report.passed:
        logger.info("%s: violated %s", spec.KIND, sorted(report.violations()))
    return report
