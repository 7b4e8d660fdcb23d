"""Exception and warning types raised across the package."""


class SplinePowerError(Exception):
    """Base class for all package errors."""


class InvalidSpaceError(SplinePowerError, ValueError):
    """Raised when (p, k, n) or a broken-space description is out of range."""


class MInvalid(SplinePowerError, ValueError):
    """Raised when a dimension-matching rule yields fewer than one segment."""


class DenominatorNonpositive(SplinePowerError, ValueError):
    """Raised when a ratio base has a nonpositive denominator (m < 1 regime)."""


class GammaOutOfRange(SplinePowerError, ValueError):
    pass


class ParityMismatch(SplinePowerError, ValueError):
    """Raised when endpoint data does not follow the parity rule for degree p."""


class MissingOrders(SplinePowerError, ValueError):
    pass


class DegreeCapExceeded(SplinePowerError, ValueError):
    pass


class UnsupportedSegments(SplinePowerError, ValueError):
    pass


class PrecisionError(SplinePowerError, RuntimeError):
    """Raised when a double-precision run is requested beyond its safe range."""


class LengthMismatch(SplinePowerError, ValueError):
    pass


class NotConvergedWarning(RuntimeWarning):
    """Emitted when a constant estimate stops before reaching its tolerance."""


class IllConditionedWarning(RuntimeWarning):
    """Emitted when a Gram solve leaves a residual above the reporting threshold."""
