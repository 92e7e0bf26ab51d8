"""Exceptions raised across the package.

The CLI maps them onto the `EXIT_*` codes at the bottom.
"""

from typing import Optional, Tuple


class BBMError(Exception):
    """Base class for everything this package raises on purpose."""


class DomainError(BBMError, ValueError):
    """An argument lies outside the domain of the operation."""


class TailBoundError(BBMError, RuntimeError):
    """A truncated integral has a tail bound above its tolerance.

    :param bound: The certified bound on the neglected piece.
    :param tolerance: The tolerance it was compared against.
    """

    def __init__(self, message: str, bound: float, tolerance: float):
        super().__init__(f"{message} (bound={bound:.3e}, tol={tolerance:.3e})")
        self.bound = bound
        self.tolerance = tolerance


class ContractViolation(BBMError, RuntimeError):
    """A structural assumption (monotonicity, unbounded density) failed."""


class BisectionFailure(BBMError, RuntimeError):
    """Bisection ran out of iterations.

    :param bracket: The last bracket ``(lo, hi)``.
    """

    def __init__(self, message: str, bracket: Optional[Tuple[float, float]]):
        super().__init__(f"{message} (bracket={bracket})")
        self.bracket = bracket


class PropertyViolation(BBMError):
    """At least one sampled property check failed."""


class RecordFormatError(BBMError, ValueError):
    """A stored result has the wrong format marker or version."""


EXIT_OK = 0
EXIT_HYPOTHESIS_GATE = 2
EXIT_TAIL_FAILURE = 3
EXIT_PROPERTY_VIOLATION = 4
