"""Exception types raised by the gomboc package."""


class GombocError(Exception):
    """Base class for all package errors."""


class ShapeError(GombocError, ValueError):
    """Invalid shape parameters or angles outside the chart."""


class DegenerateShapeError(GombocError):
    """The shape is (numerically) a sphere; every point is critical."""


class NoConvergence(GombocError):
    """Newton refinement failed to reach the residual target."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class IndexViolation(GombocError):
    """Equilibrium census violates min + max - saddle = 2."""


class BadBracket(GombocError, ValueError):
    """Bisection bracket endpoints do not have opposite verdicts."""


class MeshIOError(GombocError, OSError):
    """Mesh file could not be read or written."""
