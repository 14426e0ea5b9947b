"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates a documented precondition."""


class DegenerateRealizationError(RuntimeError):
    """A sampled network is unusable (e.g. rejection sampling hit its cap)."""


class SingularCovarianceError(RuntimeError):
    """Too few active interferers to form a full-rank covariance matrix."""

    def __init__(self, n_interferers: int, n_antennas: int):
        self.n_interferers = n_interferers
        self.n_antennas = n_antennas
        super().__init__(
            f"covariance needs at least {n_antennas} active interferers, got {n_interferers}"
        )


class NumericError(RuntimeError):
    """A numerical routine failed to meet its accuracy contract."""


class NoSolutionError(NumericError):
    """No sign change found when bracketing a root."""
