"""Plane-group structure: measure, metric, star, translation, convolution."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypercalc._grids import cell_rule
from hypercalc.gnu_space import (
    PlaneFunction,
    ball_box,
    diamond,
    distance,
    gradient,
    group_norm,
    haar_integral,
    integral_kernel,
    involution,
    modular_weight,
    plane_transform,
    radial_comparison_integral,
    right_translate,
    slice_function,
    star,
    weighted_radial_integral,
)

NU = 2.0


def make_f(nx=97, nu_pts=81):
    return PlaneFunction.from_closed_form(
        lambda x, u: np.exp(-x ** 2 / 2) * np.exp(-(u - 0.2) ** 2),
        12.0, (-5.8, 6.2), nx, nu_pts)


def make_g(nx=97, nu_pts=81):
    return PlaneFunction.from_closed_form(
        lambda x, u: np.exp(-x ** 2) * np.exp(-u ** 2), 9.0, (-6.0, 6.0), nx, nu_pts)


class TestMetric:
    def test_norm_reference_point(self):
        # cosh 0 + 1/2 = 3/2 at (1, 0)
        assert group_norm(1.0, 0.0) == pytest.approx(math.acosh(1.5), rel=1e-15)

    def test_identity_has_zero_norm(self):
        assert group_norm(0.0, 0.0) == 0.0

    def test_distance_symmetry(self):
        p, q = (1.2, 0.4), (0.3, -0.8)
        assert distance(p, q) == pytest.approx(distance(q, p), rel=1e-14)

    def test_norm_invariant_under_inversion(self):
        x, u = 1.7, -0.9
        xi, ui = involution(x, u)
        assert group_norm(xi, ui) == pytest.approx(group_norm(x, u), rel=1e-13)

    def test_distance_from_identity_is_norm(self):
        assert distance((1.3, 0.7), (0.0, 0.0)) == pytest.approx(
            group_norm(np.exp(-0.7) * 1.3, -0.7), rel=1e-13)

    @given(u=st.floats(-3.0, 3.0), x=st.floats(0.0, 10.0))
    @settings(max_examples=40, deadline=None)
    def test_norm_lower_bounds(self, x, u):
        # |u| <= rho and x <= sinh(rho) e^{max(u,0)}-ish; check the sharp ones:
        # rho >= |u| and sinh(rho) >= e^{-u/2} x / ... use x <= e^{rho} sinh rho form
        r = group_norm(x, u)
        assert r >= abs(u) - 1e-12
        # cosh r >= e^{-u} x^2/2 + cosh u >= x e^{-u/2} sqrt(2 cosh u)/sqrt(2) ...
        # direct consequence: x^2 <= 2 e^u (cosh r - cosh u)
        assert x ** 2 <= 2 * math.exp(u) * (math.cosh(r) - math.cosh(u)) + 1e-6

    def test_ball_box_sandwich(self):
        # box contains the ball; box sits inside the 3r ball
        rng = np.random.default_rng(7)
        center = (1.4, 0.3)
        r = 0.6
        x_lo, x_hi, u_lo, u_hi = ball_box(center, r)
        # random points of the ball are in the box
        for _ in range(200):
            y = rng.uniform(0.0, 6.0)
            v = rng.uniform(-1.5, 1.5)
            if distance(center, (y, v)) < r:
                assert x_lo <= y <= x_hi and u_lo <= v <= u_hi
        # box corners lie within distance 3r
        for y in (x_lo, x_hi):
            for v in (u_lo, u_hi):
                assert distance(center, (y, v)) <= 3 * r + 1e-12


class TestModularStructure:
    def test_involution_is_involutive(self):
        x, u = 2.3, -1.1
        xi, ui = involution(*involution(x, u))
        assert (xi, ui) == (pytest.approx(x, rel=1e-14), pytest.approx(u))

    def test_star_is_involutive(self):
        f = make_f()
        fss = star(NU, star(NU, f))
        xs, us = np.array([0.5, 2.0]), np.array([-1.0, 0.7])
        assert np.max(np.abs(fss(xs[:, None], us[None, :])
                             - f(xs[:, None], us[None, :]))) < 1e-13

    def test_star_l1_isometry(self):
        f = make_f()
        n1 = haar_integral(NU, PlaneFunction(
            f.x_grid, f.u_grid, np.abs(f.values),
            closed_form=lambda x, u: np.abs(f(x, u))))
        fs = star(NU, f)
        wide = PlaneFunction.from_closed_form(
            lambda x, u: np.abs(fs(x, u)), 60.0, (-6.2, 5.8), 257, 161)
        assert haar_integral(NU, wide) == pytest.approx(n1, rel=1e-5)

    def test_modular_weight_values(self):
        assert modular_weight(3.0, 0.0) == 1.0
        assert modular_weight(2.0, 1.0) == pytest.approx(math.exp(-2.0), rel=1e-15)


class TestHaarIntegral:
    def test_product_function(self):
        # int e^{-x^2/2} x dx * int e^{-(u-0.2)^2} du = 1 * sqrt(pi)
        assert haar_integral(NU, make_f()) == pytest.approx(math.sqrt(math.pi), rel=1e-12)

    def test_right_translation_invariance(self):
        f = make_f()
        rt = right_translate(NU, f, (1.5, 0.8))
        wide = PlaneFunction.from_closed_form(
            lambda x, u: rt.closed_form(x, u), 40.0, (-7.0, 6.0), 257, 161)
        assert haar_integral(NU, wide) == pytest.approx(
            math.sqrt(math.pi), rel=1e-5)

    def test_translation_by_identity(self):
        f = make_f()
        rt = right_translate(NU, f, (0.0, 0.0))
        assert np.max(np.abs(rt.values - f.values)) < 1e-14


class TestSlices:
    def test_slice_matches_closed_form(self):
        f = make_f()
        s = slice_function(f, 0.5)
        x = np.array([0.0, 1.1, 3.0])
        want = np.exp(-x ** 2 / 2) * np.exp(-0.09)
        assert np.max(np.abs(s(x) - want)) < 1e-14

    def test_plane_transform_factorizes_product(self):
        # for f(x,u) = a(x) b(u) the partial transform is (H a)(xi) b(v)
        from hypercalc.specfun import NuParam

        f = make_f()
        xi = np.array([0.4, 1.2])
        got = plane_transform(NU, f, xi, 0.5)
        want = NuParam(NU).plancherel_const * np.exp(-xi ** 2 / 2) * np.exp(-0.09)
        assert np.max(np.abs(got - want)) < 1e-12


class TestDiamond:
    def test_direct_and_binned_agree(self):
        f, g = make_f(49, 41), make_g(49, 41)
        d1 = diamond(NU, f, g, method="direct")
        d2 = diamond(NU, f, g, method="binned")
        assert np.max(np.abs(d1.values - d2.values)) < 1e-4
        # the zero-extension error bound accounts for g's decay at its edge
        assert d2.clipped_mass < 1e-20

    def test_transform_side_twisted_product(self):
        # partial transform of f<>g at (xi, u) equals the v-integral of
        # Hf(xi, v) Hg(e^v xi, u-v)
        f, g = make_f(49, 41), make_g(49, 41)
        d = diamond(NU, f, g, method="direct")
        dd = PlaneFunction(d.x_grid, d.u_grid, d.values)
        xi = np.array([0.5, 1.2])
        u0 = 0.4
        lhs = plane_transform(NU, dd, xi, u0)
        vn, vw = cell_rule(np.linspace(-5.8, 6.2, 49), 6)
        rhs = np.zeros(xi.size, dtype=complex)
        for v, w in zip(vn, vw):
            rhs = rhs + w * plane_transform(NU, f, xi, v) \
                * plane_transform(NU, g, np.exp(v) * xi, u0 - v)
        assert np.max(np.abs(lhs - rhs)) < 2e-4

    def test_star_reverses_factors(self):
        f, g = make_f(49, 41), make_g(49, 41)
        lhs = star(NU, diamond(NU, f, g, method="direct"))
        rhs = diamond(NU, star(NU, g), star(NU, f), method="direct",
                      out_grids=(lhs.x_grid, lhs.u_grid))
        xs = np.array([0.4, 1.0, 2.2])
        us = np.array([-0.8, 0.1, 0.9])
        err = np.max(np.abs(lhs(xs[:, None], us[None, :])
                            - rhs(xs[:, None], us[None, :])))
        assert err < 5e-4

    def test_approximate_identity(self):
        # unit-mass g concentrated at the group identity reproduces f, with
        # error shrinking first-order in the concentration parameter
        f = make_f(49, 41)
        s_nu = 2.0 * math.pi ** (NU / 2.0) / math.gamma(NU / 2.0)
        xs, us = np.array([0.5, 1.5]), np.array([-0.5, 0.3])
        errs = []
        for eps in (0.02, 0.01):
            g = PlaneFunction.from_closed_form(
                lambda x, u: s_nu * (4 * math.pi * eps) ** (-NU / 2.0)
                * np.exp(-x ** 2 / (4 * eps))
                * (4 * math.pi * eps) ** -0.5 * np.exp(-u ** 2 / (4 * eps)),
                1.2, (-0.8, 0.8), 61, 41)
            d = diamond(NU, f, g, method="binned", v_panels=120)
            dd = PlaneFunction(d.x_grid, d.u_grid, d.values)
            errs.append(np.max(np.abs(dd(xs[:, None], us[None, :])
                                      - f(xs[:, None], us[None, :]))))
        assert errs[0] < 0.12
        assert 1.5 < errs[0] / errs[1] < 2.5


class TestGradient:
    def test_closed_form_derivatives(self):
        f = make_f()
        y0, y1 = gradient(NU, f)
        xs, us = np.array([0.5, 1.7]), np.array([-0.4, 0.8])
        X, U = xs[:, None], us[None, :]
        want0 = -2 * (U - 0.2) * np.exp(-X ** 2 / 2 - (U - 0.2) ** 2)
        want1 = np.exp(U) * (-X) * np.exp(-X ** 2 / 2 - (U - 0.2) ** 2)
        assert np.max(np.abs(y0(X, U) - want0)) < 1e-9
        assert np.max(np.abs(y1(X, U) - want1)) < 1e-9

    def test_modular_half_power_eigenrelations(self):
        # Y0 m^{1/2} = -(nu/2) m^{1/2} and Y1 m^{1/2} = 0
        m_half = PlaneFunction.from_closed_form(
            lambda x, u: np.exp(-NU * u / 2.0) * np.ones_like(x),
            4.0, (-2.0, 2.0), 33, 33)
        y0, y1 = gradient(NU, m_half)
        xs, us = np.array([0.5, 1.7]), np.array([-0.4, 0.8])
        X, U = xs[:, None], us[None, :]
        assert np.max(np.abs(y0(X, U) + (NU / 2) * m_half(X, U))) < 1e-9
        assert np.max(np.abs(y1(X, U))) < 1e-9

    def test_cosh_norm_derivatives(self):
        # Y0 cosh r = sinh u - e^{-u} x^2/2 and Y1 cosh r = x at (x,u)
        ch = PlaneFunction.from_closed_form(
            lambda x, u: np.cosh(u) + np.exp(-u) * x ** 2 / 2.0,
            4.0, (-2.0, 2.0), 33, 33)
        y0, y1 = gradient(NU, ch)
        xs, us = np.array([0.5, 1.7]), np.array([-0.4, 0.8])
        X, U = xs[:, None], us[None, :]
        assert np.max(np.abs(y0(X, U) - (np.sinh(U) - np.exp(-U) * X ** 2 / 2))) < 1e-8
        assert np.max(np.abs(y1(X, U) - X * np.ones_like(U))) < 1e-8


class TestIntegralKernel:
    def test_kernel_at_identity_recovers_function(self):
        g = make_g()
        xs, us = np.array([0.4, 1.8]), np.array([-0.7, 0.5])
        X, U = xs[:, None], us[None, :]
        got = integral_kernel(NU, g, (X, U), (np.zeros_like(X), np.zeros_like(U)))
        assert np.max(np.abs(got - g(X, U))) < 1e-12

    def test_reproduces_diamond(self):
        f, g = make_f(49, 41), make_g(49, 41)
        d = diamond(NU, f, g, method="direct")
        dd = PlaneFunction(d.x_grid, d.u_grid, d.values)
        p = (0.8, 0.3)
        yq, yw = np.polynomial.legendre.leggauss(60)
        ynod, ywt = 6.0 * (yq + 1.0), 6.0 * yw
        vnod = -5.8 + 12.0 * (yq + 1.0) / 2
        vwt = 6.0 * yw
        K2 = integral_kernel(
            NU, g,
            (np.full((60, 60), p[0]), np.full((60, 60), p[1])),
            (ynod[:, None] * np.ones((1, 60)), np.ones((60, 1)) * vnod[None, :]))
        F2 = f(ynod[:, None], vnod[None, :])
        val = np.einsum("yv,yv,y,v->", K2, F2, ywt * ynod ** (NU - 1.0), vwt)
        assert val == pytest.approx(dd(*p), abs=2e-5)


class TestWeightedRadialComparison:
    @pytest.mark.parametrize("weight,k", [
        ("1", 0), ("x^k", 1), ("x^k_strip", 1), ("sinh^k", 1), ("u^k_strip", 2)])
    @pytest.mark.parametrize("nu", (1.5, 2.0, 3.0))
    def test_two_sided_comparison(self, nu, weight, k):
        ratios = []
        for off in (1.0, 1.5, 2.0, 3.0):
            alpha = nu / 2.0 + k + off
            prof = lambda s: np.exp(-alpha * s)
            ratios.append(weighted_radial_integral(nu, prof, weight, k)
                          / radial_comparison_integral(nu, prof, weight, k))
        r = np.array(ratios)
        assert np.all(r > 0.05) and np.all(r < 20.0)
        assert r.max() / r.min() < 2.0
