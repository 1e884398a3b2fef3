"""Analytic Gomboc surface family and its exact derivatives.

The surface is given in polar form by

    F(theta, phi)**4 = 1 + 4 beta sin(theta) cos(phi - P(theta))

where ``P`` is a smooth phase law.  All quantities here are unscaled; the
size factor ``scale_r0`` is only applied when a mesh is exported or a
volume is reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from gomboc import kernels
from gomboc.errors import ShapeError

ANGLE_TOL = 1e-12
TWO_PI = 2.0 * math.pi


class PhaseFunction:
    """Azimuthal offset law P(theta) with analytic derivatives."""

    name = "phase"

    def value(self, theta):
        raise NotImplementedError

    def derivative(self, theta):
        raise NotImplementedError

    def second_derivative(self, theta):
        raise NotImplementedError

    def evaluate(self, theta):
        """Return ``(P, P', P'')`` at ``theta`` as float arrays."""
        theta = np.asarray(theta, dtype=float)
        p = np.broadcast_to(np.asarray(self.value(theta), dtype=float), theta.shape)
        dp = np.broadcast_to(np.asarray(self.derivative(theta), dtype=float), theta.shape)
        d2p = np.broadcast_to(np.asarray(self.second_derivative(theta), dtype=float), theta.shape)
        return p, dp, d2p

    def describe(self) -> dict:
        return {"kind": self.name}


@dataclass(frozen=True)
class LinearWrap(PhaseFunction):
    """P(theta) = n theta with n = 2p + 1, p >= 2.

    Smaller or even n move the center of mass off the origin and are
    rejected; use :func:`linear_phase` to build such a law on purpose.
    """

    n: int = 5

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise ShapeError(f"LinearWrap needs an integer n, got {self.n!r}")
        if self.n < 5 or self.n % 2 != 1:
            raise ShapeError(f"LinearWrap needs odd n >= 5, got {self.n}")

    @property
    def name(self):
        return f"linear-wrap:{self.n}"

    def value(self, theta):
        return self.n * np.asarray(theta, dtype=float)

    def derivative(self, theta):
        return np.full(np.shape(theta), float(self.n))

    def second_derivative(self, theta):
        return np.zeros(np.shape(theta))

    def describe(self):
        return {"kind": "linear-wrap", "n": int(self.n)}


def eta_of_theta(theta):
    """eta = 3 pi / 2 (cos theta - cos**3 theta / 3), mapping [0, pi] onto [pi, -pi]."""
    c = np.cos(theta)
    return 1.5 * np.pi * (c - c ** 3 / 3.0)


@dataclass(frozen=True)
class CosineCubic(PhaseFunction):
    """P(theta) = eta(theta), the cosine-cubic law."""

    name = "cosine-cubic"

    def value(self, theta):
        return eta_of_theta(theta)

    def derivative(self, theta):
        return -1.5 * np.pi * np.sin(theta) ** 3

    def second_derivative(self, theta):
        s = np.sin(theta)
        return -4.5 * np.pi * s * s * np.cos(theta)

    def describe(self):
        return {"kind": "cosine-cubic"}


@dataclass(frozen=True)
class CustomSmooth(PhaseFunction):
    """User-supplied phase law; all three callbacks must be analytic."""

    value_fn: Callable = field(repr=False)
    derivative_fn: Callable = field(repr=False)
    second_derivative_fn: Callable = field(repr=False)
    name: str = "custom"
    params: tuple = ()

    def value(self, theta):
        return self.value_fn(theta)

    def derivative(self, theta):
        return self.derivative_fn(theta)

    def second_derivative(self, theta):
        return self.second_derivative_fn(theta)

    def describe(self):
        kind, _, _ = self.name.partition(":")
        out = {"kind": kind}
        out.update(dict(self.params))
        return out


def linear_phase(slope: float) -> CustomSmooth:
    """P(theta) = slope * theta without the odd-n >= 5 guard."""
    slope = float(slope)
    return CustomSmooth(
        name=f"linear:{slope:g}",
        value_fn=lambda t: slope * np.asarray(t, dtype=float),
        derivative_fn=lambda t: np.full(np.shape(t), slope),
        second_derivative_fn=lambda t: np.zeros(np.shape(t)),
        params=(("slope", slope),),
    )


def eta_phase(multiplier: float) -> CustomSmooth:
    """P(theta) = multiplier * eta(theta)."""
    m = float(multiplier)
    base = CosineCubic()
    return CustomSmooth(
        name=f"eta-linear:{m:g}",
        value_fn=lambda t: m * base.value(t),
        derivative_fn=lambda t: m * base.derivative(t),
        second_derivative_fn=lambda t: m * base.second_derivative(t),
        params=(("multiplier", m),),
    )


def phase_value(phase: PhaseFunction, theta):
    """P(theta) for the given law."""
    return phase.value(theta)


@dataclass(frozen=True)
class ShapeSpec:
    """One member of the analytic family: amplitude, phase law and size."""

    beta: float
    phase: PhaseFunction
    scale_r0: float = 1.0

    def __post_init__(self):
        beta = float(self.beta)
        if not math.isfinite(beta) or not 0.0 < beta < 0.25:
            raise ShapeError(f"beta must lie in (0, 0.25), got {self.beta!r}")
        r0 = float(self.scale_r0)
        if not math.isfinite(r0) or r0 <= 0.0:
            raise ShapeError(f"scale_r0 must be positive, got {self.scale_r0!r}")
        if not isinstance(self.phase, PhaseFunction):
            raise ShapeError(f"phase must be a PhaseFunction, got {type(self.phase).__name__}")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "scale_r0", r0)

    def with_beta(self, beta: float) -> "ShapeSpec":
        return ShapeSpec(beta, self.phase, self.scale_r0)

    def with_scale(self, scale_r0: float) -> "ShapeSpec":
        return ShapeSpec(self.beta, self.phase, scale_r0)

    def describe(self) -> dict:
        return {"beta": self.beta, "phase": self.phase.describe(), "scale_r0": self.scale_r0}


def gomboc1(beta: float = 0.15, scale_r0: float = 1.0) -> ShapeSpec:
    """r**4 = 1 + 4 beta sin(theta) cos(phi - 5 theta)."""
    return ShapeSpec(beta, LinearWrap(5), scale_r0)


def gomboc2(beta: float = 0.17, scale_r0: float = 1.0) -> ShapeSpec:
    """r**4 = 1 + 4 beta sin(theta) cos(phi - eta(theta))."""
    return ShapeSpec(beta, CosineCubic(), scale_r0)


PRESETS = {"g1": gomboc1, "g2": gomboc2}


@dataclass(frozen=True)
class SurfaceJet:
    """Unscaled radius and its first and second partials."""

    F: np.ndarray
    dF_dtheta: np.ndarray
    dF_dphi: np.ndarray
    d2F_dtheta2: np.ndarray
    d2F_dphi2: np.ndarray
    d2F_dthetadphi: np.ndarray


def canonical_angles(theta, phi):
    """Clamp theta into [0, pi] and reduce phi into [0, 2 pi).

    Polar angles further than ``ANGLE_TOL`` outside [0, pi] are rejected.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any(theta < -ANGLE_TOL) or np.any(theta > math.pi + ANGLE_TOL) or np.any(~np.isfinite(theta)):
        raise ShapeError("polar angle outside [0, pi]")
    if np.any(~np.isfinite(phi)):
        raise ShapeError("azimuth must be finite")
    theta = np.clip(theta, 0.0, math.pi)
    phi = np.mod(phi, TWO_PI)
    # mod can round up to exactly 2 pi for tiny negative input
    phi = np.where(phi >= TWO_PI, 0.0, phi)
    return theta, phi


def _scalar_or_array(a):
    return float(a) if np.ndim(a) == 0 else a


def quartic_jet(shape: ShapeSpec, theta, phi):
    """Q = F**4 and its partials, shape (6, ...): Q, Q_t, Q_p, Q_tt, Q_pp, Q_tp."""
    theta, phi = canonical_angles(theta, phi)
    p, dp, d2p = shape.phase.evaluate(theta)
    return kernels.quartic_jet(shape.beta, theta, phi, p, dp, d2p)


def quartic_value(shape: ShapeSpec, theta, phi):
    """Q = 1 + 4 beta sin(theta) cos(phi - P(theta)), vectorized."""
    theta = np.asarray(theta, dtype=float)
    return 1.0 + 4.0 * shape.beta * np.sin(theta) * np.cos(phi - shape.phase.value(theta))


def radius_jet(shape: ShapeSpec, theta, phi) -> SurfaceJet:
    """Unscaled F and its exact partials at (theta, phi)."""
    theta, phi = canonical_angles(theta, phi)
    p, dp, d2p = shape.phase.evaluate(theta)
    j = kernels.radius_jet(shape.beta, theta, phi, p, dp, d2p)
    return SurfaceJet(*(_scalar_or_array(x) for x in j))


def radius(shape: ShapeSpec, theta, phi):
    """Unscaled F, vectorized."""
    return np.sqrt(np.sqrt(quartic_value(shape, theta, phi)))


def spherical_frame(theta, phi):
    """Cartesian components of (r_hat, theta_hat, phi_hat), each shape (..., 3)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    r_hat = np.stack([st * cp, st * sp, ct], axis=-1)
    t_hat = np.stack([ct * cp, ct * sp, -st], axis=-1)
    p_hat = np.stack([-sp, cp, np.zeros_like(st)], axis=-1)
    return r_hat, t_hat, p_hat


def cartesian_point(shape: ShapeSpec, theta, phi):
    """Unscaled surface point F r_hat; shape (..., 3)."""
    theta, phi = canonical_angles(theta, phi)
    f = radius(shape, theta, phi)
    r_hat, _, _ = spherical_frame(theta, phi)
    return f[..., None] * r_hat


def tangential_log_gradient(shape: ShapeSpec, theta, phi):
    """Return (F_t / F, F_p / (F sin theta)), regular at the poles.

    Uses Q_p / sin(theta) = -4 beta sin(phi - P) so no division by
    sin(theta) occurs.  Since F_x / F = Q_x / (4 Q), both components are
    built from the Q jet directly.
    """
    theta, phi = canonical_angles(theta, phi)
    p, dp, _ = shape.phase.evaluate(theta)
    s = np.sin(theta)
    u = phi - p
    q = 1.0 + 4.0 * shape.beta * s * np.cos(u)
    qt = 4.0 * shape.beta * (np.cos(theta) * np.cos(u) + s * np.sin(u) * dp)
    qp_s = -4.0 * shape.beta * np.sin(u)
    return qt / (4.0 * q), qp_s / (4.0 * q)


def outward_normal(shape: ShapeSpec, theta, phi):
    """Unit outward normal, shape (..., 3).

    In the (r_hat, theta_hat, phi_hat) frame the normal is proportional to
    (1, -F_t/F, -F_p/(F sin theta)).  At the poles the regular form of the
    azimuthal component gives the limiting normal, which is tilted away
    from the z axis by the nonzero tangential slope there.
    """
    theta, phi = canonical_angles(theta, phi)
    gt, gp = tangential_log_gradient(shape, theta, phi)
    r_hat, t_hat, p_hat = spherical_frame(theta, phi)
    n = r_hat - gt[..., None] * t_hat - gp[..., None] * p_hat
    return n / np.linalg.norm(n, axis=-1, keepdims=True)


# Rotation by pi/2 about the x axis: the main-chart poles (0, 0, +-1) sit at
# rotated-chart angles (pi/2, pi/2) and (pi/2, 3 pi/2), away from the
# rotated chart's own coordinate singularity.
_ROTATION = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])


def rotated_chart_angles(theta_r, phi_r):
    """Main-chart (theta, phi) of the direction with rotated-chart angles (theta_r, phi_r)."""
    d_r, _, _ = spherical_frame(theta_r, phi_r)
    d = d_r @ _ROTATION.T
    theta = np.arccos(np.clip(d[..., 2], -1.0, 1.0))
    phi = np.mod(np.arctan2(d[..., 1], d[..., 0]), TWO_PI)
    return theta, phi


def pole_cap_angles(cap_radius: float, n: int):
    """Main-chart angles of an n x n rotated-chart grid around each pole.

    The grid is cell-centred in the rotated chart, so neither pole itself
    is a node.  Returns flat (theta, phi) arrays covering both caps.
    """
    offs = (np.arange(n) + 0.5) / n * 2.0 - 1.0
    offs = offs * cap_radius
    thetas, phis = [], []
    for centre in (0.5 * math.pi, 1.5 * math.pi):
        tr, pr = np.meshgrid(0.5 * math.pi + offs, centre + offs, indexing="ij")
        t, p = rotated_chart_angles(tr.ravel(), pr.ravel())
        thetas.append(t)
        phis.append(p)
    return np.concatenate(thetas), np.concatenate(phis)
