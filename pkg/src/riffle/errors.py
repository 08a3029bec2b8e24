"""Exception types shared across the package."""


class RiffleError(Exception):
    """Base class for all package-specific errors."""


class DegenerateMeasure(RiffleError):
    """The measure puts all its mass on simplex vertices, so the mixing
    constants diverge (the C-bar = infinity convention)."""


class NoBracket(RiffleError):
    """The theta root is not bracketed by [3, 4]; signals numerically
    inconsistent psi values."""


class VertexPoint(RiffleError):
    """Operation undefined at a simplex vertex."""


class AllZero(RiffleError):
    """Entropy of an all-zero weight vector requested."""


class InvalidChi(RiffleError):
    """Vertex caps of radius chi overlap."""


class NotInPsiClass(RiffleError):
    """Piecewise function violates a Psi-class invariant."""


class CounterexampleFailed(RiffleError):
    """The non-convexity verification found a violated assertion."""


class ScaleTooSmall(RiffleError):
    """Discretization scale K cannot carry the requested coordinate masses."""


class SizeMismatch(RiffleError):
    """Dimensions of two arguments disagree."""


class TooLarge(RiffleError):
    """Exact enumeration requested beyond the supported deck size."""


class TooFewSteps(RiffleError):
    """Pile sequence shorter than the cold-spot construction needs."""


class DegenerateMixture(RiffleError):
    """Cold-spot construction got a mixture supported on vertices."""


class QuotaInfeasible(RiffleError):
    """Integer digit quotas cannot satisfy the rounding slack."""


class InvalidParams(RiffleError):
    """Parameters outside the valid range (e.g. hypergeometric n1 > n)."""
