"""A bank of compactly supported test functions with exact gradients.

Members are looked up by id:

>>> u = get_function("polybump", 1)
>>> float(u(np.zeros(1))), abs(float(u.grad(np.zeros(1))[0]))
(1.0, 0.0)
>>> sorted(BANK)  # doctest: +NORMALIZE_WHITESPACE
['cosbump', 'polybump', 'polybump-aniso', 'polybump-lowreg',
 'polybump-shifted', 'tent', 'zero']
"""

import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, Sequence, Tuple

import numpy as np

from bbmstuff.errors import DomainError
from bbmstuff.quadrature import SpatialRule, tensor_rule


logger = logging.getLogger(__name__)

DEFAULT_RADIUS = 1.5
DIMENSIONS = (1, 2, 3)
SPATIAL_PANELS = {1: 32, 2: 16, 3: 6}


@dataclass(frozen=True)
class TestFunction:
    """A function on R^n with its gradient and bounds.

    ``lows``/``highs`` bound the support box; ``radius`` bounds the support
    in norm. ``c2_bound`` bounds every ``|d^2 u / dx_k^2|`` and is checked by
    `second_difference_check`; it is infinite when u is not C^{1,1}.
    ``smooth`` means C^2 with a compact support.
    """

    __test__ = False

    name: str
    dimension: int
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    radius: float
    lows: Tuple[float, ...]
    highs: Tuple[float, ...]
    sup_u: float
    sup_grad: float
    c2_bound: float
    smooth: bool = True
    breaks: Tuple[Tuple[float, ...], ...] = ()

    def __call__(self, x) -> np.ndarray:
        return self.value(np.asarray(x, dtype=float))

    def grad(self, x) -> np.ndarray:
        return self.gradient(np.asarray(x, dtype=float))

    def partial(self, x, k: int) -> np.ndarray:
        """The derivative along axis `k` (zero-based)."""
        return self.grad(x)[..., k]

    @property
    def is_zero(self) -> bool:
        return self.sup_u == 0.0

    def support_box(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.array(self.lows), np.array(self.highs)

    def spatial_rule(self, panels: int = 0, points: int = 8) -> SpatialRule:
        """A tensor Gauss-Legendre rule over the support box."""
        panels = panels or SPATIAL_PANELS[self.dimension]
        return tensor_rule(self.lows, self.highs, panels, points, self.breaks)

    def scale(self, c: float) -> "TestFunction":
        """``c * u`` with rescaled metadata.

        >>> u = get_function("cosbump", 1).scale(2.0)
        >>> float(u(np.zeros(1))), u.sup_u
        (2.0, 2.0)
        """
        value, gradient = self.value, self.gradient
        return replace(
            self,
            name=f"{c:g}*{self.name}",
            value=lambda x: c * value(x),
            gradient=lambda x: c * gradient(x),
            sup_u=abs(c) * self.sup_u,
            sup_grad=abs(c) * self.sup_grad,
            c2_bound=abs(c) * self.c2_bound,
        )


def _cube(n, lo, hi):
    return (lo,) * n, (hi,) * n


def _polynomial(
    n: int,
    radius: float,
    power: int,
    center: Sequence[float] = (),
    scales: Sequence[float] = (),
) -> Tuple[Callable, Callable]:
    c = np.zeros(n)
    c[: len(center)] = center[:n]
    k = np.ones(n)
    k[: len(scales)] = scales[:n]
    k = k * radius

    def value(x):
        q = np.sum(((x - c) / k) ** 2, axis=-1)
        return np.where(q < 1.0, np.clip(1.0 - q, 0.0, None) ** power, 0.0)

    def gradient(x):
        z = (x - c) / k
        q = np.sum(z**2, axis=-1, keepdims=True)
        inner = np.clip(1.0 - q, 0.0, None) ** (power - 1)
        slope = -2.0 * power * inner * z / k
        return np.where(q < 1.0, slope, 0.0)

    return value, gradient


def polybump(n: int, radius: float = DEFAULT_RADIUS) -> TestFunction:
    """``(1 - |x / R|**2)**3`` inside the ball, zero outside."""
    value, gradient = _polynomial(n, radius, 3)
    return TestFunction(
        "polybump",
        n,
        value,
        gradient,
        radius,
        *_cube(n, -radius, radius),
        sup_u=1.0,
        sup_grad=6.0 * (4.0 / 5.0) ** 2 / np.sqrt(5.0) / radius,
        c2_bound=30.0 / radius**2,
    )


def polybump_shifted(n: int, radius: float = DEFAULT_RADIUS) -> TestFunction:
    """The cubic bump of radius ``R - 0.3`` centred at ``0.3 e_1``."""
    shift, inner = 0.3, radius - 0.3
    value, gradient = _polynomial(n, inner, 3, (shift,))
    lows = (shift - inner,) + (-inner,) * (n - 1)
    highs = (shift + inner,) + (inner,) * (n - 1)
    return TestFunction(
        "polybump-shifted",
        n,
        value,
        gradient,
        radius,
        lows,
        highs,
        sup_u=1.0,
        sup_grad=6.0 * (4.0 / 5.0) ** 2 / np.sqrt(5.0) / inner,
        c2_bound=30.0 / inner**2,
    )


ANISO_SCALES = (0.8, 1.0, 0.6)


def polybump_aniso(n: int, radius: float = DEFAULT_RADIUS) -> TestFunction:
    """The cubic bump stretched by `ANISO_SCALES` along the axes."""
    scales = ANISO_SCALES[:n]
    value, gradient = _polynomial(n, radius, 3, (), scales)
    smallest = min(scales) * radius
    return TestFunction(
        "polybump-aniso",
        n,
        value,
        gradient,
        max(scales) * radius,
        tuple(-s * radius for s in scales),
        tuple(s * radius for s in scales),
        sup_u=1.0,
        sup_grad=6.0 * (4.0 / 5.0) ** 2 / np.sqrt(5.0) / smallest,
        c2_bound=30.0 / smallest**2,
    )


def polybump_lowreg(n: int, radius: float = DEFAULT_RADIUS) -> TestFunction:
    """``(1 - |x / R|**2)**2``: C^1 with a jump in the Hessian at |x| = R."""
    value, gradient = _polynomial(n, radius, 2)
    return TestFunction(
        "polybump-lowreg",
        n,
        value,
        gradient,
        radius,
        *_cube(n, -radius, radius),
        sup_u=1.0,
        sup_grad=8.0 / (3.0 * np.sqrt(3.0)) / radius,
        c2_bound=8.0 / radius**2,
        smooth=False,
    )


def cosbump(n: int, radius: float = DEFAULT_RADIUS) -> TestFunction:
    """``prod cos(pi x_i / (2 R))**2`` on the cube ``[-R, R]**n``.

    In one dimension ``integral of u'**2 = pi**2 / (4 R)``.
    """
    freq = np.pi / (2.0 * radius)

    def value(x):
        inside = np.all(np.abs(x) < radius, axis=-1)
        return np.where(inside, np.prod(np.cos(freq * x) ** 2, axis=-1), 0.0)

    def gradient(x):
        inside = np.all(np.abs(x) < radius, axis=-1, keepdims=True)
        factors = np.cos(freq * x) ** 2
        slopes = -freq * np.sin(2.0 * freq * x)
        grads = []
        for i in range(x.shape[-1]):
            others = np.prod(np.delete(factors, i, axis=-1), axis=-1)
            grads.append(slopes[..., i] * others)
        return np.where(inside, np.stack(grads, axis=-1), 0.0)

    return TestFunction(
        "cosbump",
        n,
        value,
        gradient,
        radius * np.sqrt(n),
        *_cube(n, -radius, radius),
        sup_u=1.0,
        sup_grad=np.sqrt(n) * freq,
        c2_bound=2.0 * n * freq**2,
    )


def tent(n: int, radius: float = DEFAULT_RADIUS) -> TestFunction:
    """``(1 - |x| / R)_+``, Lipschitz only."""

    def value(x):
        return np.clip(1.0 - np.linalg.norm(x, axis=-1) / radius, 0.0, None)

    def gradient(x):
        norm = np.linalg.norm(x, axis=-1, keepdims=True)
        safe = np.where(norm > 0.0, norm, 1.0)
        slope = -x / (safe * radius)
        return np.where((norm > 0.0) & (norm < radius), slope, 0.0)

    return TestFunction(
        "tent",
        n,
        value,
        gradient,
        radius,
        *_cube(n, -radius, radius),
        sup_u=1.0,
        sup_grad=1.0 / radius,
        c2_bound=np.inf,
        smooth=False,
        breaks=((0.0,),) * n,
    )


def zero(n: int, radius: float = DEFAULT_RADIUS) -> TestFunction:
    """u = 0."""
    return TestFunction(
        "zero",
        n,
        lambda x: np.zeros(np.shape(x)[:-1]),
        lambda x: np.zeros(np.shape(x)),
        radius,
        *_cube(n, -radius, radius),
        sup_u=0.0,
        sup_grad=0.0,
        c2_bound=0.0,
    )


BANK: Dict[str, Callable[..., TestFunction]] = {
    "polybump": polybump,
    "polybump-shifted": polybump_shifted,
    "polybump-aniso": polybump_aniso,
    "polybump-lowreg": polybump_lowreg,
    "cosbump": cosbump,
    "tent": tent,
    "zero": zero,
}


def _check_dimension(n: int):
    if n not in DIMENSIONS:
        raise DomainError(f"test functions exist for n in {DIMENSIONS}")


def get_function(
    name: str, n: int, radius: float = DEFAULT_RADIUS
) -> TestFunction:
    _check_dimension(n)
    if radius <= 1.0:
        raise DomainError("support radius must exceed 1")
    try:
        return BANK[name](n, radius)
    except KeyError:
        raise DomainError(f"unknown test function {name!r}") from None


def bank(n: int, radius: float = DEFAULT_RADIUS):
    """All members in dimension `n`.

    >>> [u.name for u in bank(2) if not u.smooth]
    ['polybump-lowreg', 'tent']
    """
    _check_dimension(n)
    return [build(n, radius) for build in BANK.values()]


def finite_difference_check(
    u: TestFunction, points: np.ndarray, h_step: float = 1e-5
) -> float:
    """Largest deviation of the gradient from central differences.

    >>> u = get_function("zero", 2)
    >>> finite_difference_check(u, np.zeros((3, 2)))
    0.0
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    exact = u.grad(points)
    worst = 0.0
    for k in range(u.dimension):
        step = np.zeros(u.dimension)
        step[k] = h_step
        central = (u(points + step) - u(points - step)) / (2.0 * h_step)
        worst = max(worst, float(np.max(np.abs(exact[:, k] - central))))
    return worst


def second_difference_check(
    u: TestFunction, points: np.ndarray, h_step: float = 1e-3
) -> float:
    """Largest second difference along an axis, relative to ``c2_bound``.

    Stays below 1 when the declared bound holds.

    >>> u = get_function("cosbump", 1)
    >>> second_difference_check(u, np.full((1, 1), 0.5)) <= 1.0
    True
    """
    if u.c2_bound == 0.0:
        return 0.0
    points = np.atleast_2d(np.asarray(points, dtype=float))
    worst = 0.0
    for k in range(u.dimension):
        step = np.zeros(u.dimension)
        step[k] = h_step
        second = u(points + step) - 2.0 * u(points) + u(points - step)
        worst = max(worst, float(np.max(np.abs(second))) / h_step**2)
    return worst / u.c2_bound
