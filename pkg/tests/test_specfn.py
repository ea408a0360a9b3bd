import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from risnoma.specfn import (
    InverseLaplaceConfig,
    InverseLaplaceError,
    SpecialFunctionError,
    erfc,
    erfcx,
    gauss2f1,
    inverse_laplace,
    laplace_of_SK,
    lower_incomplete_gamma,
    parabolic_d_minus2,
    regularized_lower_gamma,
    tricomi_psi_1_half,
)


def series_oracle(a, b, c, z, terms=200):
    """Plain truncated power series in exact rational-free float arithmetic."""
    total, term = 1.0, 1.0
    for k in range(terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
    return total


class TestGauss2F1:
    def test_zero_argument(self):
        assert gauss2f1(-0.5, 1, 0.5, 0) == 1.0

    def test_arctan_identity(self):
        np.testing.assert_allclose(gauss2f1(-0.5, 1, 0.5, -1), 1 + math.pi / 4, rtol=1e-12)

    @pytest.mark.parametrize("x", [0.01, 0.3, 2.0, 37.0, 1e4, 1e9])
    def test_arctan_identity_wide_range(self, x):
        expected = 1 + math.sqrt(x) * math.atan(math.sqrt(x))
        np.testing.assert_allclose(gauss2f1(-0.5, 1, 0.5, -x), expected, rtol=1e-10)

    def test_truncated_series_oracle(self):
        np.testing.assert_allclose(gauss2f1(-0.5, 5, 0.5, -0.2), series_oracle(-0.5, 5, 0.5, -0.2), rtol=1e-10)

    @pytest.mark.parametrize(
        "a,b,c,z",
        [
            (-0.5, 6.0, 0.5, -3.0),
            (-0.5, 5.564, 0.5, -250.0),
            (-2 / 3, 1.0, 1 / 3, -40.0),
            (-0.4, 12.0, 0.6, -1e6),
            (-0.5, 11.0, 0.5, -0.7),
            (0.3, 2.5, 1.7, -0.99),
        ],
    )
    def test_against_mpmath(self, a, b, c, z):
        np.testing.assert_allclose(gauss2f1(a, b, c, z), float(mpmath.hyp2f1(a, b, c, z)), rtol=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(
        a=st.floats(-0.95, -0.05),
        b=st.floats(0.5, 15.0),
        z=st.floats(-1e5, 0.0),
    )
    def test_symmetric_in_a_b(self, a, b, z):
        c = 1.0 + a
        np.testing.assert_allclose(gauss2f1(a, b, c, z), gauss2f1(b, a, c, z), rtol=1e-10)

    def test_rejects_bad_c(self):
        with pytest.raises(SpecialFunctionError):
            gauss2f1(1.0, 1.0, -2.0, -0.5)

    def test_rejects_positive_z(self):
        with pytest.raises(SpecialFunctionError):
            gauss2f1(1.0, 1.0, 2.0, 0.5)


class TestErrorFunctions:
    def test_erfc_zero(self):
        assert erfc(0.0) == 1.0

    def test_erfc_far_tail_is_tiny_not_zero(self):
        v = erfc(10.0)
        assert 0 < v < 1e-44

    def test_erfc_one_by_quadrature(self):
        ref, _ = integrate.quad(lambda t: math.exp(-t * t), 1.0, np.inf, epsabs=0, epsrel=1e-13)
        np.testing.assert_allclose(erfc(1.0), 2 / math.sqrt(math.pi) * ref, rtol=1e-12)

    def test_erfcx_large_argument(self):
        # asymptotically 1/(x sqrt(pi))
        np.testing.assert_allclose(erfcx(1e6), 1 / (1e6 * math.sqrt(math.pi)), rtol=1e-11)


class TestTricomi:
    def test_at_zero(self):
        assert tricomi_psi_1_half(0) == 2.0

    def test_at_one(self):
        expected = 2 - 2 * math.e * math.sqrt(math.pi) * math.erfc(1.0)
        np.testing.assert_allclose(tricomi_psi_1_half(1.0), expected, rtol=1e-12)
        np.testing.assert_allclose(tricomi_psi_1_half(1.0), 0.484255687717376, rtol=1e-13)

    def test_large_z_asymptotic(self):
        # Psi(1, 1/2; z) ~ sum_k (-1)^k (3/2)_k / z^(k+1)
        z = 100.0
        asym = sum((-1) ** k * math.gamma(1.5 + k) / math.gamma(1.5) / z ** (k + 1) for k in range(9))
        np.testing.assert_allclose(tricomi_psi_1_half(z), asym, rtol=1e-8)

    @pytest.mark.parametrize("z", [0.5, 3.0, 24.9, 25.1, 400.0, 1e8])
    def test_against_mpmath(self, z):
        np.testing.assert_allclose(tricomi_psi_1_half(z), float(mpmath.hyperu(1, 0.5, z)), rtol=1e-12)

    def test_monotone_and_bounded(self):
        zs = np.linspace(0, 100, 2001)
        vals = np.array([tricomi_psi_1_half(z) for z in zs])
        assert np.all(np.diff(vals) < 0)
        assert np.all((vals > 0) & (vals <= 2))

    def test_domain(self):
        with pytest.raises(SpecialFunctionError):
            tricomi_psi_1_half(-1.0)


class TestParabolicCylinder:
    def test_at_zero(self):
        np.testing.assert_allclose(parabolic_d_minus2(0.0), 1.0, rtol=1e-15)

    def test_tricomi_identity(self):
        x = 1.0
        np.testing.assert_allclose(
            parabolic_d_minus2(x) * 2 * math.exp(x * x / 4), tricomi_psi_1_half(x * x / 2), rtol=1e-12
        )

    @pytest.mark.parametrize("x", [-2.0, 0.5, 3.0, 9.0])
    def test_integral_representation(self, x):
        # D_{-2}(x) = e^{-x^2/4} int_0^inf t e^{-t^2/2 - x t} dt
        val, _ = integrate.quad(lambda t: t * math.exp(-t * t / 2 - x * t), 0, np.inf, epsabs=0, epsrel=1e-13)
        np.testing.assert_allclose(parabolic_d_minus2(x), math.exp(-x * x / 4) * val, rtol=1e-10)

    def test_against_mpmath(self):
        for x in (-3.0, 0.1, 4.0, 20.0):
            np.testing.assert_allclose(parabolic_d_minus2(x), float(mpmath.pcfd(-2, x)), rtol=1e-12)


class TestIncompleteGamma:
    def test_at_zero(self):
        assert lower_incomplete_gamma(3.0, 0.0) == 0.0

    def test_exponential_case(self):
        np.testing.assert_allclose(lower_incomplete_gamma(1.0, 2.0), 1 - math.exp(-2), rtol=1e-14)
        np.testing.assert_allclose(lower_incomplete_gamma(1.0, 2.0), 0.864665, atol=1e-6)

    def test_quadrature_oracle(self):
        ref, _ = integrate.quad(lambda t: t**4 * math.exp(-t), 0, 5, epsabs=0, epsrel=1e-13)
        np.testing.assert_allclose(lower_incomplete_gamma(5.0, 5.0), ref, rtol=1e-10)

    def test_regularised_monotone_and_saturates(self):
        xs = np.linspace(0, 60, 400)
        p = regularized_lower_gamma(6.0, xs)
        assert np.all(np.diff(p) >= 0)
        np.testing.assert_allclose(p[-1], 1.0, atol=1e-12)

    @pytest.mark.parametrize("s,x", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.1)])
    def test_domain(self, s, x):
        with pytest.raises(SpecialFunctionError):
            lower_incomplete_gamma(s, x)


class TestLaplaceOfSK:
    def test_at_zero(self):
        for K in (1, 3, 9):
            assert laplace_of_SK(0.0, K) == 1.0

    def test_rayleigh_quadrature(self):
        ref, _ = integrate.quad(lambda x: 2 * x * math.exp(-x * x - 2 * x), 0, np.inf, epsabs=0, epsrel=1e-13)
        np.testing.assert_allclose(laplace_of_SK(2.0, 1), ref, atol=1e-9)

    def test_power_property(self):
        np.testing.assert_allclose(laplace_of_SK(0.7, 3), laplace_of_SK(0.7, 1) ** 3, rtol=1e-12)

    def test_matches_parabolic_form(self):
        # Gamma(2) e^{s^2/8} D_{-2}(s/sqrt 2), fine where the exponential is harmless
        for s in (0.3, 2.0, 6.0):
            via_d = math.exp(s * s / 8) * parabolic_d_minus2(s / math.sqrt(2))
            np.testing.assert_allclose(laplace_of_SK(s, 1), via_d, rtol=1e-12)

    def test_large_s_stays_accurate(self):
        # E[exp(-s c)] ~ 2/s^2 for large s
        s = 1e5
        np.testing.assert_allclose(laplace_of_SK(s, 1), 2 / s**2 - 12 / s**4, rtol=1e-10)

    @settings(max_examples=50, deadline=None)
    @given(s=st.floats(0.0, 500.0), K=st.integers(1, 12))
    def test_range_and_power(self, s, K):
        v = laplace_of_SK(s, K)
        assert 0 < v <= 1
        np.testing.assert_allclose(v, laplace_of_SK(s, 1) ** K, rtol=1e-12)

    def test_strictly_decreasing(self):
        s = np.linspace(0, 50, 501)
        v = laplace_of_SK(s, 4)
        assert np.all(np.diff(v) < 0)

    def test_complex_argument_against_mpmath(self):
        for s in (1 + 2j, 7 - 30j, 40 + 1e3j):
            ref = complex(1 - mpmath.sqrt(mpmath.pi) * (s / 2) * mpmath.exp((s / 2) ** 2) * mpmath.erfc(s / 2))
            np.testing.assert_allclose(laplace_of_SK(s, 1), ref, rtol=1e-12, atol=1e-15)

    def test_rejects_bad_K(self):
        with pytest.raises(SpecialFunctionError):
            laplace_of_SK(1.0, 0)


class TestInverseLaplace:
    @pytest.mark.parametrize("method", ["euler", "talbot", "stehfest"])
    def test_exponential_pair(self, method):
        order = {"euler": 32, "talbot": 32, "stehfest": 48}[method]
        cfg = InverseLaplaceConfig(method=method, method_order=order)
        np.testing.assert_allclose(inverse_laplace(lambda s: 1 / (s + 1), 1.0, cfg), math.exp(-1), atol=1e-8)

    @pytest.mark.parametrize("method", ["euler", "stehfest"])
    def test_ramp_pair(self, method):
        cfg = InverseLaplaceConfig(method=method, method_order=48 if method == "stehfest" else 32)
        np.testing.assert_allclose(inverse_laplace(lambda s: 1 / s**2, 3.0, cfg), 3.0, atol=1e-8)

    def test_rayleigh_density_single_point(self):
        val = inverse_laplace(lambda s: laplace_of_SK(s, 1), 0.5)
        np.testing.assert_allclose(val, 2 * 0.5 * math.exp(-0.25), atol=1e-8)

    @pytest.mark.parametrize("method", ["euler", "stehfest"])
    def test_rayleigh_density_grid(self, method):
        cfg = InverseLaplaceConfig(method=method, method_order=64 if method == "stehfest" else 32)
        ts = np.linspace(0.1, 3.0, 12 if method == "stehfest" else 40)
        got = np.array([inverse_laplace(lambda s: laplace_of_SK(s, 1), t, cfg) for t in ts])
        np.testing.assert_allclose(got, 2 * ts * np.exp(-ts**2), atol=1e-6)

    def test_nonconvergence_is_signalled(self):
        cfg = InverseLaplaceConfig(method="euler", method_order=4, target_abs_tol=1e-14)
        with pytest.raises(InverseLaplaceError):
            inverse_laplace(lambda s: laplace_of_SK(s, 6), 20.0, cfg)

    def test_rejects_nonpositive_t(self):
        with pytest.raises(SpecialFunctionError):
            inverse_laplace(lambda s: 1 / (s + 1), 0.0)

    @pytest.mark.parametrize(
        "kwargs", [{"method_order": 5}, {"method_order": 2}, {"target_abs_tol": 0.0}, {"method": "weeks"}]
    )
    def test_config_validation(self, kwargs):
        with pytest.raises(ValueError):
            InverseLaplaceConfig(**kwargs)
