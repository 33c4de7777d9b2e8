"""Exception and warning types shared across the package."""


class CurveError(ValueError):
    """The boundary parametrization is degenerate (vanishing speed)."""


class AliasingError(ValueError):
    """Too few samples to resolve the requested Fourier window."""


class TruncationError(ValueError):
    """A coefficient vector does not fit the operator's ambient window."""


class TruncationWarning(UserWarning):
    """Smooth-kernel columns carry noticeable mass near the window edge."""


class InjectivityWarning(UserWarning):
    """The unit-distance injectivity check failed at the curve centroid."""


class SingularSystemError(ArithmeticError):
    """Projected system is numerically singular."""

    def __init__(self, condition, message=None):
        self.condition = float(condition)
        super().__init__(message or f"numerically singular system (condition estimate {self.condition:.3e})")


class InsufficientDataError(ValueError):
    """Too few usable points for a rate fit."""


class ConfigError(ValueError):
    """Invalid run configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
