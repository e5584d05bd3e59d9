"""Exception types shared across the package."""


class DegreeError(ValueError):
    """A differential-form operation was asked for an impossible degree."""


class NonPositiveDensityError(ValueError):
    """Density dropped to zero or below somewhere on the grid."""


class BlowupError(FloatingPointError):
    """A Runge-Kutta stage produced non-finite values."""

    def __init__(self, stage, message=None):
        self.stage = stage
        super().__init__(message or f"non-finite tendency in RK stage {stage}")


class PressureSolveError(RuntimeError):
    """Variable-density pressure iteration failed to converge."""

    def __init__(self, residual, iterations):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"pressure iteration stalled after {iterations} sweeps, residual {residual:.3e}"
        )


class HierarchyOrderError(ValueError):
    """Requested Lie-derivative order exceeds the configured cap."""


class ConfigError(ValueError):
    """Run configuration failed validation."""
