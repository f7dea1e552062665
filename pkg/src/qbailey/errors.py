"""Exception hierarchy."""


class QBaileyError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(QBaileyError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class ConvergenceError(QBaileyError):
    """A product, contour integral or lattice sum failed to converge within its cap."""


class PoleProximityError(QBaileyError):
    """A pole of the integrand or of a ratio is too close to where it is evaluated."""


class SamplingExhausted(QBaileyError):
    """Rejection sampling ran out of attempts."""
