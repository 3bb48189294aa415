import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypercalc.specfun import (
    NuParam,
    QuadratureRule,
    angular_rule,
    double_power,
    eval_bessel_k,
    eval_dunkl_kernel,
    eval_jnu,
)

# Reference values from 40-digit mpmath evaluations of the defining formulas.
JNU_REFERENCE = [
    (1.0, 0.7, 0.76484218728448845),
    (3.0, 0.7, 0.92031098176813009),
    (2.0, 1.0, 0.76519768655796655),
    (1.5, 2.5, -0.31222697804135631),
    (2.0, 15.0, -0.014224472826780773),
    (3.7, 0.3, 0.98788575295795279),
    (2.4, 50.0, 0.011007107768660438),
    (2.0, 10.0, -0.24593576445134834),
    (5.0, 12.0, -0.018511841011788785),
]

# K_n(x) from 40-digit quadrature of int_1^inf e^{-xt}(t^2-1)^{+-1/2} dt
# (cross-checked against mpmath.besselk to 17 digits).
BESSEL_K_REFERENCE = [
    (0, 0.5, 0.92441907122766586),
    (1, 0.5, 1.6564411200033009),
    (0, 1.0, 0.42102443824070833),
    (1, 1.0, 0.60190723019723457),
    (0, 2.0, 0.11389387274953344),
    (1, 2.0, 0.13986588181652243),
    (0, 5.0, 0.0036910983340425943),
    (1, 5.0, 0.0040446134454521642),
]


class TestNuParam:
    def test_derived_constants_nu2(self):
        p = NuParam(2.0)
        assert p.s_nu == pytest.approx(2.0 * math.pi, rel=1e-15)
        assert p.plancherel_const == pytest.approx(1.0, rel=1e-15)
        assert p.kappa == 27.0

    def test_derived_constants_nu3(self):
        p = NuParam(3.0)
        # 2 pi^{3/2} / Gamma(3/2) = 4 pi
        assert p.s_nu == pytest.approx(4.0 * math.pi, rel=1e-15)
        assert p.plancherel_const == pytest.approx(2.0 ** 0.5 * math.gamma(1.5), rel=1e-15)
        assert p.kappa == 27.0

    def test_kappa_switches_for_large_nu(self):
        assert NuParam(5.0).kappa == 64.0
        assert NuParam(4.0).kappa == 32.0

    def test_rejects_nu_below_one(self):
        with pytest.raises(ValueError):
            NuParam(0.5)

    def test_atomic_detection(self):
        assert NuParam(1.0).is_atomic
        assert not NuParam(1.0 + 1e-10).is_atomic


class TestEvalJnu:
    @pytest.mark.parametrize("nu,x,expected", JNU_REFERENCE)
    def test_reference_values(self, nu, x, expected):
        assert eval_jnu(nu, x) == pytest.approx(expected, rel=1e-12, abs=1e-14)

    def test_value_at_zero(self):
        for nu in (1.0, 1.5, 2.0, 3.0, 7.2):
            assert eval_jnu(nu, 0.0) == 1.0

    def test_nu1_is_cosine(self):
        x = np.linspace(0.0, 30.0, 121)
        np.testing.assert_allclose(eval_jnu(1.0, x), np.cos(x), rtol=0, atol=1e-12)

    def test_nu3_is_sinc(self):
        x = np.linspace(0.1, 30.0, 121)
        np.testing.assert_allclose(eval_jnu(3.0, x), np.sin(x) / x, rtol=0, atol=1e-12)

    def test_series_asymptotic_seam(self):
        # The two evaluation branches must agree at the |x| = 10 seam itself.
        from scipy import special as sp

        from hypercalc.specfun import _jnu_series

        for nu in (1.0, 1.5, 2.0, 3.0, 4.6):
            series = float(_jnu_series(nu, np.array(100.0)))
            product = (2.0 ** (nu / 2.0 - 1.0) * math.gamma(nu / 2.0)
                       * 10.0 ** (1.0 - nu / 2.0) * sp.jv(nu / 2.0 - 1.0, 10.0))
            assert series == pytest.approx(product, rel=1e-11, abs=1e-13)

    @given(
        nu=st.floats(min_value=1.0, max_value=8.0),
        x=st.floats(min_value=0.0, max_value=40.0),
    )
    def test_even_and_bounded(self, nu, x):
        v = eval_jnu(nu, x)
        assert eval_jnu(nu, -x) == v
        assert abs(v) <= 1.0 + 1e-12

    def test_array_shape_roundtrip(self):
        x = np.array([[0.0, 1.0], [5.0, 20.0]])
        out = eval_jnu(2.0, x)
        assert out.shape == x.shape
        assert isinstance(eval_jnu(2.0, 1.0), float)


class TestEvalDunklKernel:
    def test_reference_value(self):
        # mpmath: j^2(1.3) + i(1.3/2) j^4(1.3)
        v = eval_dunkl_kernel(2.0, 1.3)
        assert v.real == pytest.approx(0.62008598956150913, rel=1e-12)
        assert v.imag == pytest.approx(0.5220232474146604, rel=1e-12)

    def test_nu1_is_complex_exponential(self):
        x = np.linspace(-20.0, 20.0, 81)
        np.testing.assert_allclose(eval_dunkl_kernel(1.0, x), np.exp(1j * x), atol=1e-12)

    @given(
        nu=st.floats(min_value=1.0, max_value=8.0),
        x=st.floats(min_value=-40.0, max_value=40.0),
    )
    def test_conjugate_symmetry_and_modulus(self, nu, x):
        v = eval_dunkl_kernel(nu, x)
        w = eval_dunkl_kernel(nu, -x)
        assert w == pytest.approx(v.conjugate(), rel=1e-12, abs=1e-12)
        assert abs(v) <= 1.0 + 1e-12

    def test_value_at_zero(self):
        assert eval_dunkl_kernel(3.3, 0.0) == 1.0 + 0.0j


class TestEvalBesselK:
    @pytest.mark.parametrize("order,x,expected", BESSEL_K_REFERENCE)
    def test_reference_values(self, order, x, expected):
        assert eval_bessel_k(order, x) == pytest.approx(expected, rel=1e-12)

    def test_order_symmetry(self):
        for x in (0.3, 1.0, 4.0):
            assert eval_bessel_k(-1, x) == eval_bessel_k(1, x)

    def test_quadrature_oracle_route(self):
        # Independent route: truncated-halfline quadrature of the Laplace-type
        # integrals (integrand mapped t = 1 + s^2 to absorb the K_0 endpoint
        # singularity: K_0(x) = 2 int_0^inf e^{-x(1+s^2)} / sqrt(s^2+2) ds).
        x = 1.0
        rule = QuadratureRule.truncated_halfline(400, 12.0)
        s = rule.nodes
        k0 = 2.0 * rule.integrate(np.exp(-x * (1 + s * s)) / np.sqrt(s * s + 2.0))
        assert eval_bessel_k(0, x) == pytest.approx(k0, rel=1e-10)

    def test_rejects_nonpositive_x(self):
        with pytest.raises(ValueError):
            eval_bessel_k(0, 0.0)


class TestQuadrature:
    def test_gauss_legendre_mass_and_polynomials(self):
        rule = QuadratureRule.gauss_legendre(12, 0.0, 3.0)
        assert rule.weights.sum() == pytest.approx(3.0, abs=1e-12)
        # degree 2n-1 = 23 exactness
        for k in (0, 1, 5, 23):
            exact = 3.0 ** (k + 1) / (k + 1)
            assert rule.integrate(rule.nodes ** k) == pytest.approx(exact, rel=1e-12)

    def test_gauss_jacobi_mass(self):
        # weight (1-w^2)^{(nu-3)/2}: total mass B((nu-1)/2, 1/2)
        for nu, mass in [(2.0, math.pi), (3.0, 2.0), (3.5, 1.7480383695280799),
                         (1.5, 5.2441151085842396)]:
            a = (nu - 3.0) / 2.0
            rule = QuadratureRule.gauss_jacobi(24, a, a)
            assert rule.weights.sum() == pytest.approx(mass, rel=1e-12)

    @pytest.mark.parametrize("nu,moments", [
        # int w^{2j} (1-w^2)^{(nu-3)/2} dw = B(j+1/2, (nu-1)/2), mpmath 40-digit
        (2.0, [3.1415926535897932, 1.5707963267948966, 1.1780972450961725,
               0.98174770424681039]),
        (3.5, [1.7480383695280799, 0.49943953415087996, 0.27242156408229816,
               0.18161437605486544]),
    ])
    def test_gauss_jacobi_design_degree(self, nu, moments):
        a = (nu - 3.0) / 2.0
        rule = QuadratureRule.gauss_jacobi(16, a, a)
        for j, exact in enumerate(moments):
            assert rule.integrate(rule.nodes ** (2 * j)) == pytest.approx(exact, rel=1e-12)
        # odd moments vanish by symmetry
        assert rule.integrate(rule.nodes ** 3) == pytest.approx(0.0, abs=1e-13)

    def test_truncated_halfline_mass(self):
        rule = QuadratureRule.truncated_halfline(40, 25.0)
        assert rule.weights.sum() == pytest.approx(25.0, abs=1e-10)
        assert rule.kind == "truncated-halfline"

    def test_angular_rule_probability(self):
        for nu in (1.5, 2.0, 3.0, 6.2):
            rule = angular_rule(nu, 20)
            assert rule.weights.sum() == pytest.approx(1.0, abs=1e-12)

    def test_angular_rule_atomic_for_nu1(self):
        rule = angular_rule(1.0)
        assert rule.kind == "atomic"
        np.testing.assert_array_equal(rule.nodes, [-1.0, 1.0])
        np.testing.assert_array_equal(rule.weights, [0.5, 0.5])
        # nearly-1 nu within tolerance also snaps to atoms
        assert angular_rule(1.0 + 1e-15).kind == "atomic"

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            QuadratureRule("gauss-legendre", np.zeros(3), np.zeros(2), 1.0)


class TestDoublePower:
    def test_branches(self):
        assert double_power(0.5, 2.0, 3.0) == 0.25
        assert double_power(2.0, 2.0, 3.0) == 8.0
        assert double_power(1.0, 2.0, 3.0) == 1.0

    @given(
        lam=st.floats(min_value=1e-6, max_value=1e6),
        a=st.floats(min_value=-3.0, max_value=3.0),
        b=st.floats(min_value=-3.0, max_value=3.0),
    )
    def test_matches_piecewise_definition(self, lam, a, b):
        expected = lam ** a if lam <= 1.0 else lam ** b
        assert double_power(lam, a, b) == pytest.approx(expected, rel=1e-13)

    def test_vectorized(self):
        lam = np.array([0.1, 1.0, 10.0])
        np.testing.assert_allclose(double_power(lam, 1.0, 2.0), [0.1, 1.0, 100.0])

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            double_power(0.0, 1.0, 2.0)
