"""Transform/translation/convolution identities on the weighted half-line."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypercalc.hankel import (
    RadialFunction,
    bessel_apply,
    dilate,
    hankel_convolve,
    hankel_transform,
    hankel_translate,
    heat_kernel_x,
    measure_rule,
    radial_integral,
)
from hypercalc.specfun import NuParam, eval_jnu

NUS = (1.0, 1.5, 2.0, 3.0)

# high-precision reference values (40-digit quadrature, frozen)
TAU_REFERENCE = {
    # (nu, x, y, f=exp(-z^2)) -> tau^[x] f(y)
    (2.5, 1.2, 0.8): 0.23778579860656733591,
}
CONV_REFERENCE = {
    # (nu, x): exp(-y^2) * exp(-2 y^2) at x
    (3.5, 0.9): 0.039159203281074033854,
}
TRANSFORM_REFERENCE = {
    # (nu, xi): transform of (1+x^2)^{-2}
    (1.5, 0.7): 0.4442698309013358946,
}


def gaussian(a=0.5):
    return RadialFunction.from_closed_form(lambda x: np.exp(-a * np.asarray(x) ** 2),
                                           x_max=14.0, n=257)


class TestRadialFunction:
    def test_validation(self):
        with pytest.raises(ValueError):
            RadialFunction(np.array([0.1, 1.0]), np.zeros(2))
        with pytest.raises(ValueError):
            RadialFunction(np.array([0.0, 1.0, 0.5]), np.zeros(3))
        with pytest.raises(ValueError):
            RadialFunction(np.array([0.0, 1.0]), np.zeros(3))

    def test_even_and_compact(self):
        f = gaussian()
        assert f(-2.0) == f(2.0)
        g = RadialFunction(f.grid, f.values)  # sampled copy, no closed form
        assert g(f.x_max + 1.0) == 0.0

    def test_interpolation_accuracy(self):
        f = gaussian()
        g = RadialFunction(f.grid, f.values, "cubic")
        x = np.linspace(0.0, 5.0, 101)
        assert np.max(np.abs(g(x) - f(x))) < 5e-8
        lin = RadialFunction(f.grid, f.values, "linear")
        assert np.max(np.abs(lin(x) - f(x))) < 5e-4

    def test_scalar_in_scalar_out(self):
        f = gaussian()
        assert np.ndim(f(1.0)) == 0


class TestMeasureRule:
    @pytest.mark.parametrize("nu", (1.0, 1.5, 2.0, 3.7))
    def test_moments(self, nu):
        # int_0^L x^j dmu_nu = L^{nu+j}/(nu+j), including the corner cell
        grid = np.linspace(0.0, 2.0, 9)
        y, w = measure_rule(nu, grid)
        for j in range(4):
            got = np.sum(w * y ** j)
            want = 2.0 ** (nu + j) / (nu + j)
            assert got == pytest.approx(want, rel=1e-13)


class TestTransform:
    @pytest.mark.parametrize("nu", NUS)
    def test_gaussian_self_reciprocal(self, nu):
        p = NuParam(nu)
        xi = np.array([0.0, 0.5, 1.3, 2.7])
        got = hankel_transform(nu, gaussian(), xi)
        want = p.plancherel_const * np.exp(-xi ** 2 / 2)
        assert np.max(np.abs(got - want) / np.abs(want)) < 1e-12

    def test_exponential_closed_form(self):
        # nu = 2 kernel is J_0; Laplace-type transform of exp(-x) is (1+xi^2)^{-3/2}
        f = RadialFunction.from_closed_form(lambda x: np.exp(-np.asarray(x)), 45.0, 400)
        xi = np.array([0.4, 1.0, 1.3, 2.0])
        got = hankel_transform(2.0, f, xi)
        want = (1.0 + xi ** 2) ** -1.5
        assert np.max(np.abs(got - want) / want) < 1e-8

    def test_reference_value(self):
        (nu, xi), want = next(iter(TRANSFORM_REFERENCE.items()))
        f = RadialFunction.from_closed_form(
            lambda x: (1.0 + np.asarray(x) ** 2) ** -2.0, 250.0, 400)
        got = hankel_transform(nu, f, xi)
        assert got == pytest.approx(want, rel=1e-7)

    @pytest.mark.parametrize("nu", NUS)
    def test_plancherel(self, nu):
        p = NuParam(nu)
        f = RadialFunction.from_closed_form(
            lambda x: np.exp(-0.7 * np.asarray(x) ** 2) * (1.0 + np.asarray(x) ** 2) ** -1.0,
            14.0, 257)
        xi_grid = np.linspace(0.0, 30.0, 601)
        Hf = hankel_transform(nu, f, xi_grid)
        Hf_fun = RadialFunction(xi_grid, Hf)
        lhs = math.sqrt(radial_integral(nu, RadialFunction(Hf_fun.grid, np.abs(Hf) ** 2)))
        rhs = math.sqrt(radial_integral(nu, RadialFunction(f.grid, np.abs(f(f.grid)) ** 2,
                                                           closed_form=lambda x: np.abs(f(x)) ** 2)))
        assert lhs / rhs == pytest.approx(p.plancherel_const, rel=1e-6)

    def test_tail_warning(self):
        f = RadialFunction.from_closed_form(lambda x: np.exp(-np.asarray(x) ** 2 / 2), 3.0, 65)
        with pytest.warns(UserWarning, match="tail"):
            hankel_transform(1.0, f, 1.0)

    def test_full_output(self):
        vals, info = hankel_transform(2.0, gaussian(), np.array([1.0]), full_output=True)
        assert info["tail_error"] < 1e-12
        assert info["quad_error"] < 1e-12


class TestTranslate:
    def test_reference_value(self):
        (nu, x, y), want = next(iter(TAU_REFERENCE.items()))
        f = gaussian(1.0)
        tf = hankel_translate(nu, f, x)
        assert tf(y) == pytest.approx(want, rel=1e-10)

    def test_nu1_two_point_formula(self):
        f = gaussian(1.0)
        tf = hankel_translate(1.0, f, 1.3)
        y = np.array([0.2, 0.9, 2.4])
        want = 0.5 * (f(1.3 + y) + f(np.abs(1.3 - y)))
        assert np.max(np.abs(tf(y) - want)) < 1e-14

    def test_nu3_chord_integral(self):
        # for nu = 3 the angular density is uniform, so the average reduces
        # to (2xy)^{-1} int_{|x-y|}^{x+y} z f(z) dz
        f = gaussian(1.0)
        x, y = 1.1, 0.7
        tf = hankel_translate(3.0, f, x)
        want = (np.exp(-(x - y) ** 2) - np.exp(-(x + y) ** 2)) / (4 * x * y)
        assert tf(y) == pytest.approx(want, rel=1e-12)

    @pytest.mark.parametrize("nu", NUS)
    def test_symmetry_in_arguments(self, nu):
        f = gaussian(0.8)
        a = hankel_translate(nu, f, 1.4)(0.6)
        b = hankel_translate(nu, f, 0.6)(1.4)
        assert a == pytest.approx(b, rel=1e-12)

    @pytest.mark.parametrize("nu", NUS)
    def test_transform_factorization(self, nu):
        # transform of tau^[x] f is j^nu(x xi) times the transform of f
        f = gaussian()
        x = 1.7
        tf = hankel_translate(nu, f, x)
        xi = np.array([0.3, 1.0, 2.2])
        got = hankel_transform(nu, tf, xi)
        want = eval_jnu(nu, x * xi) * hankel_transform(nu, f, xi)
        assert np.max(np.abs(got - want)) < 1e-9

    @pytest.mark.parametrize("nu", NUS)
    def test_mass_preserved(self, nu):
        f = gaussian()
        tf = hankel_translate(nu, f, 2.1)
        m0 = radial_integral(nu, f)
        # translation moves mass toward larger x; integrate on a wider grid
        wide = RadialFunction(np.linspace(0, f.x_max + 3.0, 300),
                              tf(np.linspace(0, f.x_max + 3.0, 300)),
                              closed_form=tf.closed_form)
        assert radial_integral(nu, wide) == pytest.approx(m0, rel=1e-9)

    @given(x=st.floats(0.0, 4.0), y=st.floats(0.0, 4.0))
    @settings(max_examples=25, deadline=None)
    def test_positivity_and_bound(self, x, y):
        f = gaussian()
        val = hankel_translate(2.0, f, x)(y)
        assert -1e-12 <= val <= 1.0 + 1e-12


class TestConvolve:
    def test_gaussian_self_convolution(self):
        # exp(-x^2) * exp(-x^2) = 2^{-nu} c_nu exp(-x^2/2)
        for nu in NUS:
            p = NuParam(nu)
            f = gaussian(1.0)
            fg = hankel_convolve(nu, f, f)
            x = np.array([0.0, 0.7, 1.6])
            want = 2.0 ** -nu * p.plancherel_const * np.exp(-x ** 2 / 2)
            assert np.max(np.abs(fg(x) - want) / want) < 1e-9

    def test_reference_value(self):
        (nu, x), want = next(iter(CONV_REFERENCE.items()))
        f = gaussian(1.0)
        g = gaussian(2.0)
        fg = hankel_convolve(nu, f, g)
        assert fg(x) == pytest.approx(want, rel=1e-9)

    @pytest.mark.parametrize("nu", (1.5, 2.0))
    def test_commutativity(self, nu):
        f = gaussian(1.0)
        g = gaussian(0.3)
        x = np.array([0.5, 1.2])
        a = hankel_convolve(nu, f, g)(x)
        b = hankel_convolve(nu, g, f)(x)
        assert np.max(np.abs(a - b)) < 1e-10

    @pytest.mark.parametrize("nu", NUS)
    def test_transform_multiplicativity(self, nu):
        f = gaussian(0.5)
        g = heat_kernel_x(nu, 0.4, x_max=10.0)
        fg = hankel_convolve(nu, f, g)
        xi = np.array([0.0, 0.5, 1.3, 2.7])
        got = hankel_transform(nu, fg, xi)
        want = hankel_transform(nu, f, xi) * hankel_transform(nu, g, xi)
        assert np.max(np.abs(got - want)) < 1e-9

    def test_identity_approximation(self):
        # convolving with a narrow heat kernel reproduces f
        nu = 2.0
        f = gaussian(0.5)
        K = heat_kernel_x(nu, 1e-4)
        Kf = hankel_convolve(nu, K, f)
        x = np.array([0.3, 1.0, 2.0])
        assert np.max(np.abs(Kf(x) - f(x))) < 1e-3


class TestBesselApply:
    @pytest.mark.parametrize("nu", NUS)
    def test_gaussian_closed_form(self, nu):
        # L_nu exp(-a x^2) = (2 a nu - 4 a^2 x^2) exp(-a x^2)
        a = 0.5
        f = gaussian(a)
        Lf = bessel_apply(nu, f)
        x = f.grid
        want = (2 * a * nu - 4 * a * a * x ** 2) * np.exp(-a * x ** 2)
        assert np.max(np.abs(Lf.values - want)) < 1e-7

    @pytest.mark.parametrize("nu", NUS)
    def test_transform_diagonalizes(self, nu):
        f = gaussian()
        Lf = bessel_apply(nu, f)
        xi = np.array([0.3, 1.0, 2.2])
        got = hankel_transform(nu, Lf, xi)
        want = xi ** 2 * hankel_transform(nu, f, xi)
        assert np.max(np.abs(got - want)) < 1e-6

    def test_sampled_input(self):
        nu = 2.0
        f0 = gaussian()
        f = RadialFunction(f0.grid, f0.values)  # drop closed form
        Lf = bessel_apply(nu, f)
        x = f.grid
        want = (nu - x ** 2) * np.exp(-x ** 2 / 2)
        # nonuniform-grid stencils on sampled data: looser tolerance
        assert np.max(np.abs(Lf.values - want)) < 2e-4

    def test_eigenfunction(self):
        # j^nu(x xi) satisfies L_nu j = xi^2 j
        nu, xi = 2.5, 1.3
        f = RadialFunction.from_closed_form(lambda x: eval_jnu(nu, xi * np.asarray(x)), 8.0, 200)
        Lf = bessel_apply(nu, f)
        sel = f.grid < 7.0
        want = xi ** 2 * f.values
        assert np.max(np.abs(Lf.values[sel] - want[sel])) < 1e-7


class TestHeatKernelX:
    @pytest.mark.parametrize("nu,t", [(2.0, 1.0), (3.0, 0.5), (1.5, 1.0), (1.0, 2.0)])
    def test_unit_mass(self, nu, t):
        assert radial_integral(nu, heat_kernel_x(nu, t)) == pytest.approx(1.0, abs=1e-12)

    def test_amplitude(self):
        # nu = 2, t = 1: S_2/(4 pi) = 2 pi/(4 pi) = 1/2 at the origin
        assert heat_kernel_x(2.0, 1.0)(0.0) == pytest.approx(0.5, rel=1e-14)

    @pytest.mark.parametrize("nu", NUS)
    def test_transform_is_heat_multiplier(self, nu):
        t = 0.7
        K = heat_kernel_x(nu, t)
        xi = np.array([0.0, 0.5, 1.3, 2.7])
        got = hankel_transform(nu, K, xi)
        assert np.max(np.abs(got - np.exp(-t * xi ** 2))) < 1e-12

    def test_semigroup_under_convolution(self):
        nu = 2.0
        K1 = heat_kernel_x(nu, 0.3)
        K2 = heat_kernel_x(nu, 0.5)
        K12 = hankel_convolve(nu, K1, K2)
        K_sum = heat_kernel_x(nu, 0.8)
        x = np.array([0.0, 0.9, 2.3])
        assert np.max(np.abs(K12(x) - K_sum(x))) < 1e-10

    def test_rejects_nonpositive_time(self):
        with pytest.raises(ValueError):
            heat_kernel_x(2.0, 0.0)


class TestDilate:
    @given(lam=st.floats(0.25, 4.0), nu=st.sampled_from(NUS))
    @settings(max_examples=25, deadline=None)
    def test_mass_invariant(self, lam, nu):
        f = gaussian()
        fl = dilate(nu, f, lam)
        assert radial_integral(nu, fl) == pytest.approx(radial_integral(nu, f), rel=1e-12)

    def test_transform_rescales(self):
        nu, lam = 2.0, 0.6
        f = gaussian()
        fl = dilate(nu, f, lam)
        xi = np.array([0.4, 1.1, 2.0])
        got = hankel_transform(nu, fl, xi)
        want = hankel_transform(nu, f, lam * xi)
        assert np.max(np.abs(got - want)) < 1e-12

    def test_pointwise(self):
        f = gaussian()
        fl = dilate(2.0, f, 2.0)
        assert fl(1.0) == pytest.approx(0.25 * f(0.5), rel=1e-14)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            dilate(2.0, gaussian(), -1.0)
