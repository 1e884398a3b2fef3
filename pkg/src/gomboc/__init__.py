"""Analytic mono-monostatic bodies: construction, certification and export."""

__version__ = "0.1.0"

from gomboc.errors import (
    BadBracket,
    DegenerateShapeError,
    GombocError,
    IndexViolation,
    MeshIOError,
    NoConvergence,
    ShapeError,
)
from gomboc.kernels import BACKEND
from gomboc.surface import (
    PRESETS,
    CosineCubic,
    CustomSmooth,
    LinearWrap,
    PhaseFunction,
    ShapeSpec,
    SurfaceJet,
    cartesian_point,
    eta_phase,
    gomboc1,
    gomboc2,
    linear_phase,
    outward_normal,
    phase_value,
    radius_jet,
)
