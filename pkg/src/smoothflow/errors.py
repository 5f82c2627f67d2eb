"""Exception types shared across the package."""


class SmoothflowError(Exception):
    """Base class for all package-specific errors."""


class InvalidDimensionError(SmoothflowError, ValueError):
    """A dimension argument is zero, negative, or inconsistent."""


class DimensionMismatchError(SmoothflowError, ValueError):
    """Operands have incompatible shapes."""


class InvalidParameterError(SmoothflowError, ValueError):
    """A scalar parameter is outside its admissible range."""


class ScheduleExhaustedError(SmoothflowError, RuntimeError):
    """The smoothing parameter reached zero (or underflowed); the
    continuous-time system is ill-posed past this point."""


class NumericalDivergenceError(SmoothflowError, FloatingPointError):
    """An iterate became non-finite."""

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"non-finite iterate at step {step}")


class UnsupportedOperationError(SmoothflowError, RuntimeError):
    """The operation needs data the object does not carry (e.g. a known
    optimum)."""


class UndefinedBoundError(SmoothflowError, ValueError):
    """The analytical bound is not defined at the requested index/time."""


class IllPosedIntervalError(SmoothflowError, ValueError):
    """The smoothing parameter is non-positive somewhere in the
    integration interval."""


class StiffnessError(SmoothflowError, RuntimeError):
    """The adaptive integrator's step size underflowed."""


class InvalidSeriesError(SmoothflowError, ValueError):
    """A data series violates the preconditions of a fit."""


class ConfigError(SmoothflowError, ValueError):
    """An experiment configuration is malformed."""
