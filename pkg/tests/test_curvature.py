import math

import numpy as np
import pytest

from gomboc.curvature import (
    BetaSearchResult,
    _is_monotone,
    beta_max,
    convexity_scan,
    curvature_at,
    principal_curvatures,
)
from gomboc.errors import BadBracket, ShapeError
from gomboc.mesh import hull_deficit, tessellate
from gomboc.surface import CosineCubic, LinearWrap, gomboc1, gomboc2

from oracles import quadratic_patch_curvature, stable_point_curvatures, stable_point_threshold

HALF_PI = 0.5 * math.pi


def test_sphere_calibration():
    rep = convexity_scan(gomboc1(1e-12))
    assert abs(rep.min_kappa1 - 1.0) < 1e-6
    assert rep.is_convex


def test_sphere_calibration_scaled():
    # curvatures are reported for the unit-scale surface
    rep = convexity_scan(gomboc2(1e-12, 2.0))
    assert abs(rep.min_kappa1 - 1.0) < 1e-6


def test_curvature_at_pole_band(g1):
    with pytest.raises(ShapeError):
        curvature_at(g1, 0.0, 0.0)
    with pytest.raises(ShapeError):
        curvature_at(g1, math.pi - 1e-7, 0.0)


def test_matches_patch_oracle(preset):
    rng = np.random.default_rng(11)
    t = rng.uniform(0.2, math.pi - 0.2, 100)
    p = rng.uniform(0.0, 2 * math.pi, 100)
    k1, k2 = principal_curvatures(preset, t, p)
    for i in range(100):
        K, H = quadratic_patch_curvature(preset, t[i], p[i])
        assert abs(k1[i] * k2[i] - K) <= 1e-4 * max(abs(K), 1.0)
        assert abs(0.5 * (k1[i] + k2[i]) - H) <= 1e-4 * max(abs(H), 1.0)


def test_closed_form_at_stable_point():
    """At an equatorial equilibrium the shape operator is (F I - H) / F**2,
    H being the Hessian of F, known in closed form there."""
    for shape in (gomboc1(0.02), gomboc1(0.05), gomboc2(0.02), gomboc2(0.17)):
        phi = float(shape.phase.value(HALF_PI)) + math.pi
        sample = curvature_at(shape, HALF_PI, phi)
        k = np.sort(stable_point_curvatures(shape.beta, float(shape.phase.derivative(HALF_PI))))
        assert [sample.kappa1, sample.kappa2] == pytest.approx(k, rel=1e-10, abs=1e-12)


def test_nonconvex_high_beta_agrees_with_hull():
    shape = gomboc1(0.24)
    assert not convexity_scan(shape).is_convex
    assert hull_deficit(tessellate(shape, 128, 256)) > 1e-3


def test_convex_low_beta_agrees_with_hull():
    shape = gomboc1(0.02)
    rep = convexity_scan(shape)
    assert rep.is_convex and rep.min_mean > 0
    assert hull_deficit(tessellate(shape, 128, 256)) < 1e-9


def test_mean_curvature_positive_when_convex():
    for shape in (gomboc1(0.03), gomboc2(0.03)):
        rep = convexity_scan(shape)
        assert rep.is_convex and rep.min_mean >= rep.min_kappa1 > 0


def test_scan_reports_unit_scale(g2):
    a = convexity_scan(g2)
    b = convexity_scan(g2.with_scale(2.0))
    # the scan reports the unit-scale body; the physical curvature is kappa / r0
    assert a.min_kappa1 == b.min_kappa1


def test_grid_guard(g1):
    with pytest.raises(ValueError):
        convexity_scan(g1, 64, 128)


def test_report_dict(g2):
    d = convexity_scan(g2).to_dict()
    assert set(d) == {"grid", "samples", "min_kappa1", "grid_min_kappa1", "argmin", "min_mean", "is_convex"}
    assert d["min_kappa1"] <= d["grid_min_kappa1"]


class TestBetaMax:
    def test_bad_bracket_lower_not_convex(self):
        with pytest.raises(BadBracket):
            beta_max(LinearWrap(5), bracket=(0.1, 0.2))

    def test_bad_bracket_upper_convex(self):
        with pytest.raises(BadBracket):
            beta_max(LinearWrap(5), bracket=(0.01, 0.02))

    @pytest.mark.parametrize("bracket", [(0.2, 0.1), (0.0, 0.1), (0.1, 0.3)])
    def test_bad_bracket_order(self, bracket):
        with pytest.raises(BadBracket):
            beta_max(LinearWrap(5), bracket=bracket)

    def test_rejects_tiny_tol(self):
        with pytest.raises(ValueError):
            beta_max(LinearWrap(5), tol=1e-8)

    @pytest.mark.parametrize("phase", [LinearWrap(5), CosineCubic()])
    def test_threshold_brackets_closed_form(self, phase):
        res = beta_max(phase, tol=1e-4, n_theta=128, n_phi=256, verify=False)
        assert res.bracket_width < 1e-4
        assert res.bracket[0] <= stable_point_threshold(float(phase.derivative(HALF_PI))) < res.bracket[1]

    def test_monotone_helper(self):
        assert _is_monotone([(0.1, 1.0, True), (0.2, -1.0, False), (0.15, 0.5, True)])
        assert not _is_monotone([(0.1, -1.0, False), (0.2, 1.0, True)])

    def test_result_dict(self):
        r = BetaSearchResult(0.5, (0.4, 0.6), (128, 256), [(0.4, 1.0, True)], True, (256, 512))
        d = r.to_dict()
        assert d["bracket_width"] == pytest.approx(0.2)
        assert d["trace"][0]["is_convex"] is True
