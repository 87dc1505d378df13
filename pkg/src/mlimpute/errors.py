"""Exception hierarchy shared across the package."""


class MlImputeError(Exception):
    """Base class for all package-specific errors."""


class NotPositiveDefiniteError(MlImputeError):
    """A matrix required to be positive definite failed a Cholesky pivot."""


class DegenerateError(MlImputeError):
    """Data too thin or collinear for the requested estimator."""


class NotConvergedError(MlImputeError):
    """Iterative fit hit its iteration cap before meeting tolerance."""

    def __init__(self, message: str, n_iter: int, last_delta: float):
        super().__init__(message)
        self.n_iter = n_iter
        self.last_delta = last_delta


class DimensionMismatchError(MlImputeError):
    """Inputs that must share a dimension do not."""


class SingularMatrixError(MlImputeError):
    """A matrix that must be invertible is singular."""


class ConfigError(MlImputeError):
    """Malformed study configuration (unknown fields, out-of-domain values)."""
