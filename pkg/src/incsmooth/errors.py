"""Exception types shared across the package."""


class IncSmoothError(Exception):
    """Base class for all errors raised by this package."""


class IndexOutOfTable(IncSmoothError, IndexError):
    """A tabulated weight family was queried outside its table without an extension rule."""


class RhoUnavailable(IncSmoothError, ValueError):
    """The liminf of r_j / ln(j) is neither known in closed form, supplied, nor estimable."""


class DegenerateWindow(IncSmoothError, ValueError):
    """A decay fit window contains fewer than three usable points."""


class Divergent(IncSmoothError, ArithmeticError):
    """A truncated sum exceeded the overflow threshold."""


class CoordinateHorizonExceeded(IncSmoothError, RuntimeError):
    """The next emission of a spectrum stream cannot be certified within the coordinate horizon."""


class NonMonotoneWeights(IncSmoothError, ValueError):
    """Factor weights violate the monotonicity the lazy enumeration relies on."""


class NotRKHS(IncSmoothError, ValueError):
    """Point evaluation is not bounded for the requested space."""


class DomainError(IncSmoothError, ValueError):
    """A point lies outside the domain of a basis."""


class SmoothnessTooLow(IncSmoothError, ValueError):
    """The Haar interpolation bound needs r1 > 1."""


class BoundViolation(IncSmoothError, AssertionError):
    """A proven error bound was violated numerically."""


class ConfigError(IncSmoothError, ValueError):
    """An experiment configuration failed validation."""
