import math

import numpy as np
import pytest

from gomboc.moments import (
    SphericalGrid,
    change_of_variables_check,
    com_residuals,
    eta_constraint_residual,
    gauss_legendre,
    phase_constraint_residual,
    volume,
)
from gomboc.surface import CosineCubic, LinearWrap, ShapeSpec, eta_phase, gomboc1, gomboc2, linear_phase

from oracles import brute_first_moment_xy, volume_series

SPHERE = 4.0 * math.pi / 3.0


def test_gauss_legendre_integrates_polynomials():
    x, w = gauss_legendre(8, 0.0, 2.0)
    assert np.sum(w * x ** 15) == pytest.approx(2.0 ** 16 / 16, rel=1e-13)


@pytest.mark.parametrize("n_theta,n_phi", [(4, 128), (64, 8)])
def test_grid_rejects_coarse(n_theta, n_phi):
    with pytest.raises(ValueError):
        SphericalGrid.build(n_theta, n_phi)


class TestVolume:
    def test_sphere(self):
        assert volume(gomboc1(1e-12)) == pytest.approx(SPHERE, abs=1e-8)

    def test_cubic_scaling(self, g2):
        assert volume(g2.with_scale(2.0)) == pytest.approx(8.0 * volume(g2), rel=1e-14)

    @pytest.mark.parametrize("beta", [0.01, 0.05, 0.1, 0.15, 0.2])
    def test_matches_series(self, beta):
        # the series is phase independent, so both presets must match it
        ref = volume_series(beta, order=80)
        for make in (gomboc1, gomboc2):
            assert abs(volume(make(beta), SphericalGrid.build(128, 256)) - ref) < 1e-10

    def test_fourth_order_prediction(self, g1):
        # the second-order truncation misses by ~2.7e-3 at this amplitude; the
        # fourth-order one is inside 1e-3
        assert abs(volume(g1) - volume_series(0.15, order=4)) < 1e-3

    def test_converged_under_doubling(self, preset):
        a = volume(preset, SphericalGrid.build(64, 128))
        b = volume(preset, SphericalGrid.build(128, 256))
        assert abs(a - b) < 1e-10


class TestResiduals:
    def test_presets_satisfy(self, preset):
        rep = com_residuals(preset)
        assert abs(rep.com_residual_z) < 1e-10
        assert abs(rep.com_residual_xy) < 1e-10
        assert rep.satisfied()
        assert np.allclose(rep.com, 0.0, atol=1e-10)

    def test_linear_three_counter_case(self):
        shape = ShapeSpec(0.15, linear_phase(3.0))
        rep = com_residuals(shape)
        exact = -1j * 0.15 * math.pi ** 2 / 8.0
        assert abs(rep.com_residual_xy - exact) < 1e-12
        assert abs(rep.com_residual_z) < 1e-14
        assert abs(rep.com_residual_xy - brute_first_moment_xy(shape)) < 1e-6
        assert not rep.satisfied()

    @pytest.mark.parametrize("slope", [2.0, 3.0, 4.0, 6.0])
    def test_xy_residual_from_phase_integral(self, slope):
        shape = ShapeSpec(0.1, linear_phase(slope))
        rep = com_residuals(shape)
        expected = 0.1 * math.pi * phase_constraint_residual(shape.phase)
        assert abs(rep.com_residual_xy - expected) < 1e-12

    def test_com_position(self):
        shape = ShapeSpec(0.1, linear_phase(3.0), 2.0)
        rep = com_residuals(shape)
        v1 = volume(shape.with_scale(1.0))
        assert rep.com[1] == pytest.approx(2.0 * rep.com_residual_xy.imag / v1)
        assert rep.volume == pytest.approx(8.0 * v1)

    def test_converged_under_doubling(self):
        shape = ShapeSpec(0.15, linear_phase(3.0))
        a = com_residuals(shape, SphericalGrid.build(64, 128)).com_residual_xy
        b = com_residuals(shape, SphericalGrid.build(128, 256)).com_residual_xy
        assert abs(a - b) < 1e-10


class TestPhaseConstraint:
    @pytest.mark.parametrize("phase", [LinearWrap(5), LinearWrap(7), LinearWrap(9), CosineCubic()])
    def test_zero_for_valid_phases(self, phase):
        assert abs(phase_constraint_residual(phase)) < 1e-12

    def test_linear_three(self):
        assert abs(phase_constraint_residual(linear_phase(3.0)) + 1j * math.pi / 8.0) < 1e-13

    def test_rejects_low_order(self):
        with pytest.raises(ValueError):
            phase_constraint_residual(LinearWrap(5), order=32)

    @pytest.mark.parametrize("m,expected", [(1.0, 0.0), (0.0, 2 * math.pi), (2.0, 0.0), (3.0, 0.0)])
    def test_eta_residuals(self, m, expected):
        assert abs(eta_constraint_residual(lambda e: m * e) - expected) < 1e-12

    @pytest.mark.parametrize("fn", [lambda e: e, lambda e: 2 * e, lambda e: 0.5 * e, lambda e: np.sin(e)])
    def test_change_of_variables(self, fn):
        assert change_of_variables_check(fn).gap < 1e-10

    def test_eta_phase_matches_theta_form(self):
        assert abs(phase_constraint_residual(eta_phase(2.0))) < 1e-12
        assert abs(phase_constraint_residual(eta_phase(0.5))) > 0.1
