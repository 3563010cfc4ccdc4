import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy import special as scipy_special

from maternact import specfun


def mixed_rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


class TestLogGamma:
    def test_half(self):
        assert math.isclose(specfun.log_gamma(0.5), 0.5 * math.log(math.pi), rel_tol=1e-13)

    def test_five_factorial(self):
        assert math.isclose(specfun.log_gamma(5.0), math.log(24.0), rel_tol=1e-13)

    def test_two_point_five(self):
        # Gamma(2.5) = 1.5 * 0.5 * sqrt(pi)
        assert math.isclose(specfun.log_gamma(2.5), math.log(0.75 * math.sqrt(math.pi)),
                            rel_tol=1e-13)

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
    def test_domain(self, bad):
        with pytest.raises(ValueError):
            specfun.log_gamma(bad)

    def test_against_lgamma(self):
        for x in np.geomspace(1e-3, 1e3, 500):
            assert mixed_rel(specfun.log_gamma(x), math.lgamma(x)) <= 1e-13

    @given(st.floats(0.5, 50.0))
    @settings(max_examples=200, deadline=None)
    def test_recurrence(self, x):
        # Gamma(x+1) = x Gamma(x)
        ratio = math.exp(specfun.log_gamma(x + 1.0) - specfun.log_gamma(x))
        assert math.isclose(ratio, x, rel_tol=1e-11)


class TestBesselK:
    def test_half_order(self):
        expected = math.sqrt(math.pi / 4.0) * math.exp(-2.0)
        assert math.isclose(specfun.bessel_k(0.5, 2.0), expected, rel_tol=1e-13)

    def test_three_halves(self):
        expected = math.sqrt(math.pi / 2.0) * math.exp(-1.0) * 2.0
        assert math.isclose(specfun.bessel_k(1.5, 1.0), expected, rel_tol=1e-13)

    def test_order_one_integral_oracle(self):
        # K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt
        oracle, err = integrate.quad(
            lambda t: math.exp(-1.0 * math.cosh(t)) * math.cosh(t), 0.0, 30.0,
            epsabs=1e-14, epsrel=1e-13, limit=200,
        )
        assert err < 1e-12
        assert math.isclose(oracle, 0.6019072301972346, rel_tol=1e-12)
        assert math.isclose(specfun.bessel_k(1.0, 1.0), oracle, rel_tol=1e-11)

    @pytest.mark.parametrize("nu,x", [(1.0, 0.0), (1.0, -2.0), (-0.5, 1.0)])
    def test_domain(self, nu, x):
        with pytest.raises(ValueError):
            specfun.bessel_k(nu, x)

    def test_accuracy_against_scipy(self):
        for nu in (0.0, 0.3, 0.77, 1.0, 2.2, 3.7, 5.5, 8.9, 10.0):
            for x in np.geomspace(1e-6, 50.0, 40):
                ref = scipy_special.kv(nu, x)
                ours = specfun.bessel_k(nu, x)
                assert abs(ours - ref) <= 1e-10 * abs(ref), (nu, x)

    @pytest.mark.parametrize("mu", [0.1, 0.25, 0.5])
    def test_order_symmetry_general_path(self, mu):
        # K_nu = K_{-nu}: both fractional branches must honour it
        for x in (0.05, 0.5, 1.9):
            plus, _ = specfun._bessel_k_temme(mu, x)
            minus, _ = specfun._bessel_k_temme(-mu, x)
            assert math.isclose(plus, minus, rel_tol=1e-12)
        for x in (2.0, 7.0, 30.0):
            plus, _ = specfun._bessel_k_cf2(mu, x)
            minus, _ = specfun._bessel_k_cf2(-mu, x)
            assert math.isclose(plus, minus, rel_tol=1e-12)

    @pytest.mark.parametrize("nu", [0.5, 1.5, 2.5])
    def test_half_integer_vs_general_path(self, nu):
        for x in np.geomspace(0.01, 20.0, 60):
            fast = specfun.bessel_k(nu, x)
            general = specfun._bessel_k_general(nu, x)
            assert abs(fast - general) <= 1e-9 * abs(general), (nu, x)

    def test_vectorized(self):
        x = np.array([0.1, 1.0, 10.0])
        vals = specfun.bessel_k(2.5, x)
        assert vals.shape == (3,)
        assert np.allclose(vals, [specfun.bessel_k(2.5, v) for v in x], rtol=1e-14)

    def test_large_order_log_form(self):
        # the uniform expansion backs the kernel's large-nu path
        for nu in (50.0, 120.0, 200.0):
            for x in (1e-3, 1.0, 20.0, 300.0):
                ref = float(scipy_special.kv(nu, x)) if x > 0 else None
                ours = specfun._log_bessel_k_uniform(nu, x)
                if ref and ref > 0 and math.isfinite(math.log(ref)):
                    assert math.isclose(ours, math.log(ref), rel_tol=1e-9)


class TestHermite:
    def test_degree_zero(self):
        assert specfun.hermite_phys(0, 3.7) == 1.0

    def test_degree_one(self):
        assert specfun.hermite_phys(1, 2.0) == 4.0

    def test_degree_three(self):
        # H_3(x) = 8 x^3 - 12 x
        assert specfun.hermite_phys(3, 1.0) == -4.0

    @pytest.mark.parametrize("j", [2, 5, 8, 12])
    def test_against_numpy(self, j):
        coeffs = np.zeros(j + 1)
        coeffs[j] = 1.0
        for x in np.linspace(-3.0, 3.0, 25):
            ref = np.polynomial.hermite.hermval(x, coeffs)
            assert math.isclose(specfun.hermite_phys(j, x), ref, rel_tol=1e-12, abs_tol=1e-10)

    @pytest.mark.parametrize("j", [-1, 65, 2.5])
    def test_domain(self, j):
        with pytest.raises(ValueError):
            specfun.hermite_phys(j, 0.0)


class TestErf:
    def test_zero(self):
        assert specfun.erf(0.0) == 0.0

    def test_saturation(self):
        assert abs(specfun.erf(10.0) - 1.0) <= 1e-15
        assert abs(specfun.erf(-10.0) + 1.0) <= 1e-15

    def test_series_oracle_at_one(self):
        # alternating Maclaurin series 2/sqrt(pi) sum (-1)^n / (n! (2n+1))
        total = 0.0
        for n in range(0, 30):
            total += (-1.0) ** n / (math.factorial(n) * (2 * n + 1))
        oracle = 2.0 / math.sqrt(math.pi) * total
        assert math.isclose(oracle, 0.8427007929497149, rel_tol=1e-15)
        assert math.isclose(specfun.erf(1.0), oracle, rel_tol=1e-13)

    def test_against_math_erf(self):
        xs = np.linspace(-8.0, 8.0, 3201)
        ours = specfun.erf(xs)
        ref = np.array([math.erf(v) for v in xs])
        assert np.max(np.abs(ours - ref)) <= 1e-12

    @given(st.floats(-6.0, 6.0))
    @settings(max_examples=200, deadline=None)
    def test_odd(self, x):
        assert specfun.erf(-x) == -specfun.erf(x)


class TestGaussHermite:
    def test_single_point(self):
        rule = specfun.gauss_hermite(1)
        assert rule.nodes.tolist() == [0.0]
        assert math.isclose(rule.weights[0], math.sqrt(math.pi), rel_tol=1e-15)

    def test_two_points(self):
        rule = specfun.gauss_hermite(2)
        assert np.allclose(rule.nodes, [-1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)], rtol=1e-14)
        assert np.allclose(rule.weights, math.sqrt(math.pi) / 2.0, rtol=1e-14)

    def test_quadratic_moment(self):
        rule = specfun.gauss_hermite(20)
        assert math.isclose(rule.integrate(lambda t: t**2), math.sqrt(math.pi) / 2.0,
                            rel_tol=1e-10)

    @pytest.mark.parametrize("n", [1, 2, 5, 32, 64, 128])
    def test_even_moments(self, n):
        # int x^k e^{-x^2} dx = Gamma((k+1)/2) for even k, exact to degree 2n-1
        rule = specfun.gauss_hermite(n)
        for k in range(0, 2 * n - 1, 2):
            exact = math.gamma((k + 1) / 2.0)
            got = float(rule.weights @ rule.nodes**k)
            assert abs(got - exact) <= 1e-9 * abs(exact), (n, k)

    def test_weight_sum_and_positivity(self):
        for n in (1, 3, 17, 128):
            rule = specfun.gauss_hermite(n)
            assert np.all(rule.weights > 0.0)
            assert abs(rule.weights.sum() - math.sqrt(math.pi)) <= 1e-12

    @pytest.mark.parametrize("n", [0, 129, -3])
    def test_domain(self, n):
        with pytest.raises(ValueError):
            specfun.gauss_hermite(n)

    def test_rule_validation(self):
        with pytest.raises(ValueError):
            specfun.QuadratureRule(np.array([0.0, 1.0]), np.array([1.0]))
        with pytest.raises(ValueError):
            specfun.QuadratureRule(np.array([0.0]), np.array([-1.0]))
        with pytest.raises(ValueError):
            specfun.QuadratureRule(np.array([0.0]), np.array([1.0]))  # sum != sqrt(pi)
