"""Principal curvatures, grid convexity certification and the beta threshold search."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from gomboc import kernels
from gomboc.errors import BadBracket, ShapeError
from gomboc.surface import (
    TWO_PI,
    PhaseFunction,
    ShapeSpec,
    canonical_angles,
    pole_cap_angles,
)

log = logging.getLogger(__name__)

POLE_BAND = 1e-6
DEFAULT_GRID = (256, 512)
DEFAULT_BRACKET = (0.01, 0.249)


@dataclass(frozen=True)
class CurvatureSample:
    theta: float
    phi: float
    kappa1: float
    kappa2: float

    @property
    def gaussian(self) -> float:
        return self.kappa1 * self.kappa2

    @property
    def mean(self) -> float:
        return 0.5 * (self.kappa1 + self.kappa2)


@dataclass(frozen=True)
class CurvatureReport:
    n_theta: int
    n_phi: int
    cap_points: int
    min_kappa1: float
    argmin: tuple
    min_mean: float
    n_samples: int
    grid_min_kappa1: float | None = None

    @property
    def is_convex(self) -> bool:
        return self.min_kappa1 > 0.0

    def to_dict(self) -> dict:
        return {
            "grid": {"n_theta": self.n_theta, "n_phi": self.n_phi, "cap_points": self.cap_points},
            "samples": self.n_samples,
            "min_kappa1": self.min_kappa1,
            "argmin": {"theta": self.argmin[0], "phi": self.argmin[1]},
            "grid_min_kappa1": self.grid_min_kappa1,
            "min_mean": self.min_mean,
            "is_convex": self.is_convex,
        }


def principal_curvatures(shape: ShapeSpec, theta, phi):
    """(kappa1, kappa2) arrays, kappa1 <= kappa2, for the unscaled surface."""
    theta, phi = canonical_angles(theta, phi)
    p, dp, d2p = shape.phase.evaluate(theta)
    k = kernels.principal_curvatures(shape.beta, theta, phi, p, dp, d2p)
    return k[0], k[1]


def curvature_at(shape: ShapeSpec, theta: float, phi: float) -> CurvatureSample:
    """Principal curvatures at one chart-interior point.

    Built from the first and second fundamental forms of F(theta, phi) r_hat;
    the unit sphere has both curvatures equal to +1.
    """
    if not POLE_BAND < theta < math.pi - POLE_BAND:
        raise ShapeError(f"theta={theta!r} is inside the pole band; use the rotated-chart caps")
    k1, k2 = principal_curvatures(shape, theta, phi)
    return CurvatureSample(float(theta), float(phi) % TWO_PI, float(k1), float(k2))


def _sample_points(n_theta, n_phi, cap_points):
    theta = (np.arange(n_theta) + 0.5) * (math.pi / n_theta)
    phi = np.arange(n_phi) * (TWO_PI / n_phi)
    t, p = np.meshgrid(theta, phi, indexing="ij")
    t, p = t.ravel(), p.ravel()
    if cap_points:
        # caps overlap the first two main-grid rings
        ct, cp = pole_cap_angles(2.5 * math.pi / n_theta, cap_points)
        keep = (ct > POLE_BAND) & (ct < math.pi - POLE_BAND)
        t = np.concatenate([t, ct[keep]])
        p = np.concatenate([p, cp[keep]])
    return t, p


def _polish(shape, k1, t, p, starts):
    """Nelder-Mead on kappa1 from the lowest grid samples."""

    def f(x):
        th = min(max(x[0], 2 * POLE_BAND), math.pi - 2 * POLE_BAND)
        return float(principal_curvatures(shape, th, x[1])[0][()])

    best = (float(k1.min()), (float(t[np.argmin(k1)]), float(p[np.argmin(k1)])))
    for i in np.argsort(k1)[:starts]:
        if not 2 * POLE_BAND < t[i] < math.pi - 2 * POLE_BAND:
            continue
        res = minimize(f, [t[i], p[i]], method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-15, "maxiter": 400})
        if res.fun < best[0]:
            th = min(max(res.x[0], 2 * POLE_BAND), math.pi - 2 * POLE_BAND)
            best = (float(res.fun), (float(th), float(res.x[1] % TWO_PI)))
    return best


def convexity_scan(shape: ShapeSpec, n_theta: int = DEFAULT_GRID[0], n_phi: int = DEFAULT_GRID[1],
                   cap_points: int = 32, polish: int = 4) -> CurvatureReport:
    """Minimum principal curvature over a cell-centred grid plus both pole caps.

    The grid never lands exactly on the worst point, so the ``polish``
    lowest samples seed a local minimization of kappa1 and the smallest
    value found is reported.  ``polish=0`` gives the raw grid minimum.
    """
    if n_theta < 128 or n_phi < 256:
        raise ValueError("convexity scan needs n_theta >= 128 and n_phi >= 256")
    t, p = _sample_points(n_theta, n_phi, cap_points)
    k1, k2 = principal_curvatures(shape, t, p)
    grid_min = float(k1.min())
    if polish:
        kmin, argmin = _polish(shape, k1, t, p, polish)
    else:
        i = int(np.argmin(k1))
        kmin, argmin = grid_min, (float(t[i]), float(p[i]))
    return CurvatureReport(
        n_theta=n_theta,
        n_phi=n_phi,
        cap_points=cap_points,
        min_kappa1=kmin,
        argmin=argmin,
        min_mean=float(np.min(0.5 * (k1 + k2))),
        n_samples=int(t.size),
        grid_min_kappa1=grid_min,
    )


@dataclass
class BetaSearchResult:
    beta_max: float
    bracket: tuple
    grid: tuple
    trace: list = field(default_factory=list)
    verified: bool | None = None
    verification_grid: tuple | None = None

    @property
    def bracket_width(self) -> float:
        return self.bracket[1] - self.bracket[0]

    def to_dict(self) -> dict:
        return {
            "beta_max": self.beta_max,
            "bracket": list(self.bracket),
            "bracket_width": self.bracket_width,
            "grid": {"n_theta": self.grid[0], "n_phi": self.grid[1]},
            "verified": self.verified,
            "verification_grid": None if self.verification_grid is None
            else {"n_theta": self.verification_grid[0], "n_phi": self.verification_grid[1]},
            "trace": [{"beta": b, "min_kappa1": k, "is_convex": c} for b, k, c in self.trace],
        }


def _is_monotone(trace) -> bool:
    convex = [b for b, _, c in trace if c]
    bad = [b for b, _, c in trace if not c]
    return not convex or not bad or max(convex) < min(bad)


def _bisect(phase, tol, lo, hi, grid, scale_r0):
    trace = []

    def verdict(beta):
        rep = convexity_scan(ShapeSpec(beta, phase, scale_r0), *grid)
        trace.append((beta, rep.min_kappa1, rep.is_convex))
        return rep.is_convex

    if not verdict(lo):
        raise BadBracket(f"lower bracket end beta={lo:g} is not convex at grid {grid[0]}x{grid[1]}")
    if verdict(hi):
        raise BadBracket(f"upper bracket end beta={hi:g} is convex at grid {grid[0]}x{grid[1]}")
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if verdict(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi, trace


def beta_max(phase: PhaseFunction, tol: float = 1e-4, bracket=DEFAULT_BRACKET,
             n_theta: int = DEFAULT_GRID[0], n_phi: int = DEFAULT_GRID[1],
             verify: bool = True, scale_r0: float = 1.0) -> BetaSearchResult:
    """Largest amplitude for which the shape is still convex, by bisection.

    The grid is held fixed during bisection.  A non-monotone verdict along
    the trace doubles the grid and restarts (once).  With ``verify`` the
    final bracket is re-checked at doubled resolution: convex at
    beta_max - width and not convex at beta_max + width.
    """
    if tol < 1e-6:
        raise ValueError("tol must be >= 1e-6")
    lo, hi = (float(b) for b in bracket)
    if not 0.0 < lo < hi < 0.25:
        raise BadBracket(f"bracket must satisfy 0 < lo < hi < 0.25, got {bracket!r}")
    grid = (n_theta, n_phi)
    a, b, trace = _bisect(phase, tol, lo, hi, grid, scale_r0)
    if not _is_monotone(trace):
        grid = (2 * n_theta, 2 * n_phi)
        log.warning("non-monotone convexity verdicts; repeating at %dx%d", *grid)
        a, b, trace = _bisect(phase, tol, lo, hi, grid, scale_r0)
    result = BetaSearchResult(0.5 * (a + b), (a, b), grid, trace)

    if verify:
        vgrid = (2 * grid[0], 2 * grid[1])
        w = result.bracket_width
        below = convexity_scan(ShapeSpec(result.beta_max - w, phase, scale_r0), *vgrid).is_convex
        above = result.beta_max + w < 0.25 and not convexity_scan(
            ShapeSpec(result.beta_max + w, phase, scale_r0), *vgrid).is_convex
        result.verified = bool(below and above)
        result.verification_grid = vgrid
    return result
