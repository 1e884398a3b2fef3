"""Equilibrium census: critical points of the radius on the sphere.

Everything works on Q = F**4, which has the same critical set as F and
polynomial-in-trig derivatives.  A dense grid scan proposes candidate
cells, damped Newton refines them, and the poles are examined separately
in a rotated chart.
"""

from __future__ import annotations

import enum
import logging
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from gomboc.errors import DegenerateShapeError, IndexViolation, NoConvergence
from gomboc.surface import (
    ShapeSpec,
    TWO_PI,
    cartesian_point,
    pole_cap_angles,
    quartic_jet,
    quartic_value,
    tangential_log_gradient,
)

log = logging.getLogger(__name__)

DEGENERATE_BETA = 1e-9
NEWTON_TOL = 1e-12
MAX_NEWTON_ITER = 50
MERGE_DISTANCE = 1e-6
DEFAULT_SCAN = (128, 256)


class EquilibriumKind(str, enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    SADDLE = "Saddle"


@dataclass(frozen=True)
class EquilibriumPoint:
    theta: float
    phi: float
    kind: EquilibriumKind
    grad_norm: float
    hessian_eigs: tuple
    radius: float
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "phi": self.phi,
            "kind": self.kind.value,
            "grad_norm": self.grad_norm,
            "hessian_eigs": list(self.hessian_eigs),
            "F": self.radius,
            "iterations": self.iterations,
        }


@dataclass
class EquilibriumReport:
    points: list
    scan: tuple
    rejected: list = field(default_factory=list)

    @property
    def counts(self) -> dict:
        out = {k.value: 0 for k in EquilibriumKind}
        for p in self.points:
            out[p.kind.value] += 1
        return out

    @property
    def index_sum(self) -> int:
        c = self.counts
        return c["Stable"] + c["Unstable"] - c["Saddle"]

    @property
    def is_mono_monostatic(self) -> bool:
        return self.counts == {"Stable": 1, "Unstable": 1, "Saddle": 0}

    def to_dict(self) -> dict:
        return {
            "points": [p.to_dict() for p in self.points],
            "counts": self.counts,
            "index_sum": self.index_sum,
            "is_mono_monostatic": self.is_mono_monostatic,
            "scan": {"n_theta": self.scan[0], "n_phi": self.scan[1]},
            "rejected_candidates": self.rejected,
        }


def _check_degenerate(shape: ShapeSpec):
    if shape.beta < DEGENERATE_BETA:
        raise DegenerateShapeError(
            f"beta={shape.beta:g} is below {DEGENERATE_BETA:g}: the surface is a sphere "
            "and every point is an equilibrium"
        )


def reduced_grad_norm(shape, theta, phi):
    """|(Q_t, Q_p / sin theta)|, the chart-free gradient size, regular at the poles."""
    gt, gp = tangential_log_gradient(shape, theta, phi)
    return 4.0 * quartic_value(shape, theta, phi) * np.hypot(gt, gp)


def _triangle_roots(g0, g1, g2):
    """Does the linear interpolant of a 2-vector field vanish inside the triangle?

    Each ``g`` is a pair of arrays (component 1, component 2) at one vertex.
    """
    a11, a12 = g1[0] - g0[0], g2[0] - g0[0]
    a21, a22 = g1[1] - g0[1], g2[1] - g0[1]
    det = a11 * a22 - a12 * a21
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (-g0[0] * a22 + a12 * g0[1]) / det
        b = (-a11 * g0[1] + a21 * g0[0]) / det
    eps = 1e-12
    return (det != 0) & (a >= -eps) & (b >= -eps) & (a + b <= 1 + eps)


def _flag_cells(gt, gp):
    """Cells (i, j) -> (i+1, j+1) whose piecewise-linear gradient has a zero.

    Each cell is split into two triangles; the azimuth wraps periodically.
    """

    def corners(g):
        g1 = np.roll(g, -1, axis=1)
        return g[:-1], g[1:], g1[:-1], g1[1:]

    t00, t10, t01, t11 = corners(gt)
    p00, p10, p01, p11 = corners(gp)
    lower = _triangle_roots((t00, p00), (t10, p10), (t01, p01))
    upper = _triangle_roots((t11, p11), (t01, p01), (t10, p10))
    return lower | upper


def _local_minima(norm, jet, spacing, threshold):
    """Interior local minima of the gradient norm whose Newton step stays local.

    Catches tangential zeros that the linear test can miss; a node is kept
    only if one Newton step from it lands within about a cell.
    """
    n = norm[1:-1]
    is_min = n < threshold
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            nb = np.roll(norm[1 + di:norm.shape[0] - 1 + di], -dj, axis=1)
            is_min &= n <= nb
    _, gt, gp, htt, hpp, htp = (x[1:-1] for x in jet)
    det = htt * hpp - htp * htp
    with np.errstate(divide="ignore", invalid="ignore"):
        dt = (hpp * gt - htp * gp) / det
        dp = (htt * gp - htp * gt) / det
    near = (np.abs(dt) <= 1.5 * spacing[0]) & (np.abs(dp) <= 1.5 * spacing[1])
    mask = np.zeros(norm.shape, dtype=bool)
    mask[1:-1] = is_min & near
    return mask


def _clusters(mask):
    """Connected components of a boolean grid, periodic in the second axis."""
    ni, nj = mask.shape
    seen = np.zeros_like(mask)
    out = []
    for start in zip(*np.nonzero(mask)):
        if seen[start]:
            continue
        comp = []
        queue = deque([start])
        seen[start] = True
        while queue:
            i, j = queue.popleft()
            comp.append((i, j))
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    a, b = i + di, (j + dj) % nj
                    if 0 <= a < ni and mask[a, b] and not seen[a, b]:
                        seen[a, b] = True
                        queue.append((a, b))
        out.append(comp)
    return out


def scan_grid(n_theta: int, n_phi: int):
    """Cell-centred polar nodes (poles excluded) and uniform azimuth nodes."""
    theta = (np.arange(n_theta) + 0.5) * (math.pi / n_theta)
    phi = np.arange(n_phi) * (TWO_PI / n_phi)
    return theta, phi


def critical_point_scan(shape: ShapeSpec, n_theta: int = DEFAULT_SCAN[0], n_phi: int = DEFAULT_SCAN[1]):
    """Candidate (theta, phi) locations of critical points, one per neighbourhood.

    Candidates come from cells where both Q_t and Q_p change sign, plus
    interior local minima of the reduced gradient norm that lie below an
    adaptive threshold.  Adjacent flagged cells are merged and represented
    by their node of smallest gradient norm.
    """
    if n_theta < 64 or n_phi < 128:
        raise ValueError("scan needs n_theta >= 64 and n_phi >= 128")
    _check_degenerate(shape)
    theta, phi = scan_grid(n_theta, n_phi)
    t, p = np.meshgrid(theta, phi, indexing="ij")
    jet = quartic_jet(shape, t, p)
    norm = reduced_grad_norm(shape, t, p)

    cells = np.zeros_like(norm, dtype=bool)
    cells[:-1] = _flag_cells(jet[1], jet[2])
    threshold = 0.1 * float(norm.max())
    spacing = (math.pi / n_theta, TWO_PI / n_phi)
    mask = cells | _local_minima(norm, jet, spacing, threshold)

    candidates = []
    for comp in _clusters(mask):
        # a flagged cell spans nodes (i..i+1, j..j+1); pick the best of those
        nodes = {(min(i + di, n_theta - 1), (j + dj) % n_phi) for i, j in comp for di in (0, 1) for dj in (0, 1)}
        i, j = min(nodes, key=lambda ij: (norm[ij], ij))
        candidates.append((float(theta[i]), float(phi[j])))
    return sorted(candidates)


def _hessian(shape, theta, phi):
    j = quartic_jet(shape, theta, phi)
    g = np.array([j[1], j[2]])
    h = np.array([[j[3], j[5]], [j[5], j[4]]])
    return float(j[0]), g, h


def classify(eigs) -> EquilibriumKind:
    if eigs[0] > 0 and eigs[1] > 0:
        return EquilibriumKind.STABLE
    if eigs[0] < 0 and eigs[1] < 0:
        return EquilibriumKind.UNSTABLE
    return EquilibriumKind.SADDLE


def refine(shape: ShapeSpec, candidate, tol: float = NEWTON_TOL, max_iter: int = MAX_NEWTON_ITER) -> EquilibriumPoint:
    """Damped Newton on (Q_t, Q_p) = 0 from a scan candidate.

    The Jacobian is the exact Hessian of Q.  Convergence is declared when
    |grad Q| < tol * 4 beta, so the test is independent of the amplitude.
    Classification uses the
    Hessian of F, which at a critical point is H(Q) / (4 F**3) and so shares
    the signature of H(Q).
    """
    x = np.array(candidate, dtype=float)
    q, g, h = _hessian(shape, *x)
    res = float(np.linalg.norm(g))
    stop = tol * 4.0 * shape.beta
    it = 0
    while res >= stop:
        if it >= max_iter:
            raise NoConvergence(
                f"Newton did not converge from {tuple(candidate)}",
                {"candidate": list(map(float, candidate)), "last": x.tolist(), "residual": res, "iterations": it},
            )
        it += 1
        try:
            step = np.linalg.solve(h, g)
        except np.linalg.LinAlgError:
            step = g  # singular Hessian: fall back to a gradient step
        alpha = 1.0
        while True:
            trial = x - alpha * step
            trial[0] = min(max(trial[0], 1e-9), math.pi - 1e-9)
            q_t, g_t, h_t = _hessian(shape, *trial)
            r_t = float(np.linalg.norm(g_t))
            if r_t < res or alpha < 1e-6:
                break
            alpha *= 0.5
        x, q, g, h, res = trial, q_t, g_t, h_t, r_t

    theta, phi = float(x[0]), float(x[1] % TWO_PI)
    f = q ** 0.25
    eigs = tuple(float(e) for e in np.linalg.eigvalsh(h / (4.0 * f ** 3)))
    grad_norm = float(reduced_grad_norm(shape, theta, phi))
    return EquilibriumPoint(theta, phi, classify(eigs), grad_norm, eigs, float(f), it)


def pole_check(shape: ShapeSpec, cap_radius: float = 0.05, n: int = 24, rel_tol: float = 1e-3):
    """Equilibria in the two polar caps, sampled in a rotated chart.

    The reduced gradient norm is chart free and regular at the poles, so
    the exact poles are tested directly and the caps are sampled on a
    rotated-chart grid.  Any sample whose gradient norm falls below
    ``rel_tol * 4 beta`` seeds a Newton refinement; for this surface family
    the gradient at a pole has norm 4 beta, so the result is normally empty.
    """
    _check_degenerate(shape)
    t, p = pole_cap_angles(cap_radius, n)
    t = np.concatenate([t, [0.0, math.pi]])
    p = np.concatenate([p, [0.0, 0.0]])
    norm = reduced_grad_norm(shape, t, p)
    found = []
    for k in np.nonzero(norm < rel_tol * 4.0 * shape.beta)[0]:
        # Newton runs in the main chart, so nudge exact pole seeds inside it
        seed = (min(max(t[k], 1e-6), math.pi - 1e-6), p[k])
        try:
            found.append(refine(shape, seed))
        except NoConvergence:
            log.debug("pole cap seed %s did not converge", seed)
    return found


def _dedupe(shape, points):
    kept = []
    xyz = []
    for pt in sorted(points, key=lambda e: e.grad_norm):
        x = cartesian_point(shape, pt.theta, pt.phi)
        if any(np.linalg.norm(x - y) < MERGE_DISTANCE for y in xyz):
            continue
        kept.append(pt)
        xyz.append(x)
    return sorted(kept, key=lambda e: (e.theta, e.phi))


def _census_at(shape, n_theta, n_phi):
    points, rejected = [], []
    for cand in critical_point_scan(shape, n_theta, n_phi):
        try:
            points.append(refine(shape, cand))
        except NoConvergence as exc:
            rejected.append(exc.diagnostics)
    points.extend(pole_check(shape))
    return EquilibriumReport(_dedupe(shape, points), (n_theta, n_phi), rejected)


def census(shape: ShapeSpec, n_theta: int = DEFAULT_SCAN[0], n_phi: int = DEFAULT_SCAN[1]) -> EquilibriumReport:
    """All equilibria of the shape, classified, with the index check applied.

    An index sum other than 2 means the scan missed or doubled a point; the
    scan is repeated once at doubled resolution before giving up.
    """
    report = _census_at(shape, n_theta, n_phi)
    if report.index_sum != 2:
        log.warning("index sum %d at %dx%d, retrying at doubled resolution", report.index_sum, n_theta, n_phi)
        report = _census_at(shape, 2 * n_theta, 2 * n_phi)
        if report.index_sum != 2:
            raise IndexViolation(
                f"min + max - saddle = {report.index_sum} (counts {report.counts}) "
                f"at scan resolution {2 * n_theta}x{2 * n_phi}"
            )
    return report
