"""Exception hierarchy shared by all iropskit modules."""


class IropsKitError(Exception):
    """Base class for all errors raised by iropskit."""


class SchemaError(IropsKitError):
    """Input file header/layout does not match the documented schema."""


class ValidationError(IropsKitError):
    """A value violates a documented invariant or precondition."""


class ConfigError(IropsKitError):
    """A configuration object or file is internally inconsistent."""


class ConvergenceError(IropsKitError):
    """An iterative routine failed to converge within its budget.

    May carry the last iterate so callers can inspect how close it got.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class ConditioningError(IropsKitError):
    """A matrix stayed numerically indefinite after the full jitter ladder."""


class FitError(IropsKitError):
    """Model fitting failed (e.g. every optimizer restart diverged)."""
