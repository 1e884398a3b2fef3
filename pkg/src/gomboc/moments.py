"""Volume and first-moment quadrature over the sphere of directions.

The radial integrals are done in closed form (F**3 / 3 for the volume,
F**4 / 4 for the first moment), leaving a product rule over (theta, phi):
Gauss-Legendre in theta and the periodic trapezoid rule in phi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from gomboc.surface import PhaseFunction, ShapeSpec, eta_of_theta, quartic_value

COM_THRESHOLD = 1e-8
DEFAULT_N_THETA = 64
DEFAULT_N_PHI = 128


def gauss_legendre(order: int, a: float, b: float):
    """Nodes and weights of the Gauss-Legendre rule mapped onto [a, b]."""
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


@dataclass(frozen=True)
class SphericalGrid:
    theta_nodes: np.ndarray
    theta_weights: np.ndarray
    phi_nodes: np.ndarray
    phi_weights: np.ndarray

    @classmethod
    def build(cls, n_theta: int = DEFAULT_N_THETA, n_phi: int = DEFAULT_N_PHI) -> "SphericalGrid":
        if n_theta < 8:
            raise ValueError(f"n_theta must be >= 8, got {n_theta}")
        if n_phi < 16:
            raise ValueError(f"n_phi must be >= 16, got {n_phi}")
        tn, tw = gauss_legendre(n_theta, 0.0, math.pi)
        pn = np.arange(n_phi) * (2.0 * math.pi / n_phi)
        pw = np.full(n_phi, 2.0 * math.pi / n_phi)
        return cls(tn, tw, pn, pw)

    @property
    def n_theta(self) -> int:
        return self.theta_nodes.shape[0]

    @property
    def n_phi(self) -> int:
        return self.phi_nodes.shape[0]

    def mesh(self):
        """(theta, phi, weight) arrays of shape (n_theta, n_phi)."""
        t, p = np.meshgrid(self.theta_nodes, self.phi_nodes, indexing="ij")
        return t, p, np.outer(self.theta_weights, self.phi_weights)


@dataclass(frozen=True)
class MomentReport:
    """Volume, center of mass and the raw first-moment integrals.

    ``com_residual_z`` and ``com_residual_xy`` are the unscaled first
    moments  int z dV  and  int (x + i y) dV  of the r0 = 1 body.
    """

    volume: float
    com: tuple
    com_residual_z: float
    com_residual_xy: complex
    n_theta: int
    n_phi: int

    def satisfied(self, threshold: float = COM_THRESHOLD) -> bool:
        return abs(self.com_residual_z) < threshold and abs(self.com_residual_xy) < threshold

    def to_dict(self) -> dict:
        return {
            "volume": self.volume,
            "com": list(self.com),
            "com_residual_z": self.com_residual_z,
            "com_residual_xy": [self.com_residual_xy.real, self.com_residual_xy.imag],
            "com_residual_xy_abs": abs(self.com_residual_xy),
            "threshold": COM_THRESHOLD,
            "satisfied": self.satisfied(),
            "grid": {"n_theta": self.n_theta, "n_phi": self.n_phi},
        }


def _grid(grid):
    return SphericalGrid.build() if grid is None else grid


def _unit_volume(shape: ShapeSpec, grid: SphericalGrid) -> float:
    t, p, w = grid.mesh()
    q = quartic_value(shape, t, p)
    return float(np.sum(w * np.sin(t) * q ** 0.75)) / 3.0


def volume(shape: ShapeSpec, grid: SphericalGrid | None = None) -> float:
    """Enclosed volume, including the r0**3 size factor."""
    return _unit_volume(shape, _grid(grid)) * shape.scale_r0 ** 3


def com_residuals(shape: ShapeSpec, grid: SphericalGrid | None = None) -> MomentReport:
    grid = _grid(grid)
    t, p, w = grid.mesh()
    q = quartic_value(shape, t, p)
    s = np.sin(t)
    wq = 0.25 * w * q * s
    res_z = float(np.sum(wq * np.cos(t)))
    res_x = float(np.sum(wq * s * np.cos(p)))
    res_y = float(np.sum(wq * s * np.sin(p)))
    v1 = _unit_volume(shape, grid)
    r0 = shape.scale_r0
    com = (r0 * res_x / v1, r0 * res_y / v1, r0 * res_z / v1)
    return MomentReport(
        volume=v1 * r0 ** 3,
        com=com,
        com_residual_z=res_z,
        com_residual_xy=complex(res_x, res_y),
        n_theta=grid.n_theta,
        n_phi=grid.n_phi,
    )


def phase_constraint_residual(phase: PhaseFunction, order: int = 128) -> complex:
    """int_0^pi sin(theta)**3 exp(i P(theta)) dtheta.

    Zero exactly when the phase law keeps the center of mass on the axis
    through the origin.
    """
    if order < 64:
        raise ValueError("quadrature order must be >= 64")
    t, w = gauss_legendre(order, 0.0, math.pi)
    p = np.asarray(phase.value(t), dtype=float)
    return complex(np.sum(w * np.sin(t) ** 3 * np.exp(1j * p)))


def eta_constraint_residual(phase_of_eta: Callable, order: int = 128) -> complex:
    """int_{-pi}^{pi} exp(i P(eta)) d eta for a phase law written in eta."""
    if order < 64:
        raise ValueError("quadrature order must be >= 64")
    e, w = gauss_legendre(order, -math.pi, math.pi)
    p = np.asarray(phase_of_eta(e), dtype=float)
    return complex(np.sum(w * np.exp(1j * p)))


@dataclass(frozen=True)
class ChangeOfVariables:
    theta_form: complex
    eta_form: complex

    @property
    def gap(self) -> float:
        """|theta_form - 2/(3 pi) eta_form|; zero when the substitution is exact."""
        return abs(self.theta_form - 2.0 / (3.0 * math.pi) * self.eta_form)


def change_of_variables_check(phase_of_eta: Callable, order: int = 128) -> ChangeOfVariables:
    """Evaluate the eta-form and the composed theta-form side by side.

    With d eta = -(3 pi / 2) sin(theta)**3 d theta the two integrals agree up
    to the factor 2 / (3 pi).
    """
    if order < 64:
        raise ValueError("quadrature order must be >= 64")
    t, w = gauss_legendre(order, 0.0, math.pi)
    p = np.asarray(phase_of_eta(eta_of_theta(t)), dtype=float)
    theta_form = complex(np.sum(w * np.sin(t) ** 3 * np.exp(1j * p)))
    return ChangeOfVariables(theta_form, eta_constraint_residual(phase_of_eta, order))
