"""Exception hierarchy shared by the package."""


class IsotauError(Exception):
    """Base class for all package errors."""


class SeriesError(IsotauError, ValueError):
    """Point/dimension mismatch or a request outside a series' truncation window."""


class SingularMatrixError(IsotauError, ValueError):
    """Matrix is singular or too badly conditioned to invert."""


class GuardError(IsotauError, ValueError):
    """Evaluation too close to a pole, a singular time, or a degenerate parameter."""


class OrderError(IsotauError, ValueError):
    """Requested expansion order exceeds the available closed forms."""


class ConfigError(IsotauError, ValueError):
    """Invalid run configuration."""


class IntegrationAbort(IsotauError, RuntimeError):
    """Path integration stopped early (step underflow, non-finite state, guard hit)."""

    def __init__(self, message, last_t=None, last_sigma=None):
        super().__init__(message)
        self.last_t = last_t
        self.last_sigma = last_sigma
