"""Exception types shared across the package."""


class CamoptError(Exception):
    """Base class for all package-specific errors."""


class NoTangent(CamoptError):
    """Anchor lies on or inside the cam ellipse; no tangent line exists."""


class NoBalance(CamoptError):
    """No spring design in the admissible range balances the requested torque."""


class InvalidConfig(CamoptError):
    """A configuration value is missing, unknown, or out of range.

    Attributes:
        path: dotted path of the offending field, e.g. ``sim.dt_physics``.
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class NumericalBlowup(CamoptError):
    """Simulation state left the trust region (non-finite or huge values)."""

    def __init__(self, message, last_state=None, t=None):
        super().__init__(message)
        self.last_state = last_state
        self.t = t


class InsufficientDistance(CamoptError):
    """Net displacement too small for a meaningful cost-of-transport ratio."""


class UnknownTask(CamoptError):
    """Task identifier is not one of the supported scenarios."""


class IllConditioned(CamoptError):
    """Surrogate covariance factorization failed even with jitter."""
