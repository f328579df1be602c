"""Exception types shared across the package."""


class SpinFilterError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(SpinFilterError, ValueError):
    """Operator/state dimensions are invalid or inconsistent."""


class StateError(SpinFilterError, ValueError):
    """A matrix or Bloch vector is not a valid quantum state."""


class SingularStateError(SpinFilterError, ValueError):
    """A boundary (pure) state was passed to an interior-only formula."""


class ConfigError(SpinFilterError, ValueError):
    """Configuration text failed validation.

    Carries *all* violations found, not just the first one.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class IntegrationDivergedError(SpinFilterError, RuntimeError):
    """An Euler step produced an eigenvalue below the divergence threshold."""

    def __init__(self, message, step=None, t=None, u=None, purity_deficit=None):
        self.step = step
        self.t = t
        self.u = u
        self.purity_deficit = purity_deficit
        super().__init__(message)


class EnsembleError(SpinFilterError, RuntimeError):
    """Too many trajectories in an ensemble diverged (>10%)."""


class InsufficientDataError(SpinFilterError, ValueError):
    """A statistical fit has fewer than the minimum number of usable points."""
