"""Exception types raised across the package."""


class ThermosymError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(ThermosymError, ValueError):
    pass


class ShapeError(ThermosymError, ValueError):
    pass


class TruncationWindowError(ThermosymError, ValueError):
    """Requested interior window does not fit inside the truncated space."""


class UnphysicalParameterError(ThermosymError, ValueError):
    pass


class TruncationAccuracyError(ThermosymError, RuntimeError):
    """The truncated rotation is not accurate on the requested window.

    Carries the measured Bogoliubov action residual so callers can report it.
    """

    def __init__(self, message, residual=None, suggested_dim=None):
        super().__init__(message)
        self.residual = residual
        self.suggested_dim = suggested_dim


class NumericError(ThermosymError, RuntimeError):
    pass


class AmbiguityError(ThermosymError, RuntimeError):
    pass


class ReductionFailure(ThermosymError, RuntimeError):
    pass


class StepSizeError(ThermosymError, ValueError):
    pass


class UnsupportedStateError(ThermosymError, ValueError):
    pass
