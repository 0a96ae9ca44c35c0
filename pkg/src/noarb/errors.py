"""Exception hierarchy shared by all noarb modules."""


class NoArbError(Exception):
    """Base class for every error raised by this package."""


class MismatchedStates(NoArbError):
    """Asset quotes disagree on the number of terminal states."""


class NonFinite(NoArbError):
    """An input price or payoff is NaN or infinite."""


class Infeasible(NoArbError):
    """No nonnegative normalized state measure annihilates the excess matrix."""


class NumericalFailure(NoArbError):
    """The LP solver hit its iteration cap (degenerate cycling guard)."""


class ArbitrageViolation(NoArbError):
    """One-period market violates d < e^r < u, so it admits arbitrage."""


class InvalidParams(NoArbError):
    """Simulation or process parameters outside their documented domain."""


class ConstraintViolated(NoArbError):
    """A drift/rate consistency precondition does not hold."""


class DomainError(NoArbError):
    """Pricing inputs outside the formula's domain (nonpositive spot, ...)."""


class QuadratureFailure(NoArbError):
    """Adaptive quadrature could not meet its tolerance within the panel cap."""


class UnstableConfig(NoArbError):
    """Finite-difference solve produced a singular tridiagonal system."""


class OutOfRange(NoArbError):
    """Query point lies outside the solved grid."""
