"""Exception hierarchy shared by all finslerlab modules."""


class FinslerLabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FinslerLabError, ValueError):
    """A point lies outside the domain where a field or space is defined."""


class InadmissibleDirection(FinslerLabError, ValueError):
    """Direction outside the admissible cone of the space."""


class ZeroDirection(FinslerLabError, ValueError):
    """Direction with zero base norm; momenta are undefined there."""


class NonpositiveKappa(FinslerLabError, ValueError):
    """Conformal factor evaluated to a non-positive value."""


class SpacelikeGradient(FinslerLabError, ValueError):
    """Gradient whose pseudo-norm (or product form) is not positive."""


class BoundaryPoint(FinslerLabError, ValueError):
    """Lattice node in the boundary layer where derivatives are unavailable."""


class NotPositiveDefinite(FinslerLabError, ValueError):
    """Matrix is not symmetric positive definite."""


class NonpositiveQ0(FinslerLabError, ValueError):
    """Regularization parameter q0 must be positive."""


class InfiniteVolume(FinslerLabError, ValueError):
    """Indicatrix volume is infinite; no Lagrangian can be formed."""


class NegativeBase(FinslerLabError, ValueError):
    """Half-integer power of a negative quadratic form requested."""


class GridTooSmall(FinslerLabError, ValueError):
    """Lattice has too few points per axis for the requested stencil."""


class NonpositiveRadius(FinslerLabError, ValueError):
    """Radial coordinate must be positive."""


class OriginSingularity(FinslerLabError, ValueError):
    """The expansion-profile ODE was evaluated directly at xi = 0."""


class SingularDenominator(FinslerLabError, ValueError):
    """1 - 3*phi**2 vanished; the ODE derivative is undefined."""


class ToleranceNotMet(FinslerLabError, RuntimeError):
    """Adaptive integration could not reach the requested tolerance."""


class OutOfRange(FinslerLabError, ValueError):
    """Query outside the resolved range of a solution."""


class DerivativeUnavailable(FinslerLabError, ValueError):
    """Field derivatives could not be evaluated at the requested point."""


class ZeroLambda(FinslerLabError, ValueError):
    """Flow scaling function vanished along a trajectory."""


class LeftDomain(FinslerLabError, RuntimeError):
    """Trajectory left the admissible domain during integration."""


class TooFewSamples(FinslerLabError, ValueError):
    """Not enough trajectory samples for the requested diagnostic."""


class SingularMetric(FinslerLabError, ValueError):
    """Metric is singular at the evaluation point."""


class UnsupportedSpace(FinslerLabError, ValueError):
    """Operation is not defined for this space family."""
