"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for all simulator failures."""


class GeometryError(SimulationError):
    """Curve geometry could not be evaluated (degenerate or invalid markers)."""


class SelfIntersectionError(SimulationError):
    """The interface crossed itself; the run cannot continue."""

    def __init__(self, message, curve=None, time=None, step=None):
        super().__init__(message)
        self.curve = curve
        self.time = time
        self.step = step


class ZeroModeError(SimulationError):
    """Inverse half-Laplacian applied to a field with a nonzero mean.

    In the coupled pipeline this signals that force spreading failed the
    closed-curve zero-net-force identity.
    """


class DomainFitError(SimulationError):
    """Curve markers too close to the periodic box boundary."""


class ResolutionError(SimulationError):
    """A resolution constraint was violated (marker spacing, depth levels)."""


class NumericsError(SimulationError):
    """NaN or overflow encountered while stepping."""


class AuditError(SimulationError):
    """Audit could not be computed (e.g. too few history rows)."""


class ConfigError(SimulationError):
    """Run configuration violates a load-time constraint."""
