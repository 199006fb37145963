import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from conftest import exponential_psi, g0_exp, gamma_closed_form, panel_psi, stable_psi
from etstable.errors import DivergentIntegral, InvalidInput, StableExponentOutOfRange
from etstable.special import (
    DEFAULT_CONFIG,
    INF,
    QuadratureConfig,
    centering_shift,
    cosine_bound_check,
    levy_oscillatory_integral,
    tempered_power_integral,
    tempered_radial_integral,
    truncated_gauss_kernel,
)

ALPHAS = [-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5]


class TestTemperedPowerIntegral:
    def test_gamma_two(self):
        assert tempered_power_integral(0, 1, 0, INF, 2) == pytest.approx(1.0, rel=1e-12)

    def test_exponential(self):
        assert tempered_power_integral(-1, 1, 0, INF, 0) == pytest.approx(1.0, rel=1e-12)

    def test_truncated_against_closed_form_and_midpoint(self):
        closed = 1 - 2 / math.e
        n = 1_000_000
        t = (np.arange(n) + 0.5) / n
        midpoint = float(np.sum(t * np.exp(-t)) / n)
        assert closed == pytest.approx(0.2642411, abs=1e-7)
        assert midpoint == pytest.approx(closed, abs=1e-10)
        assert tempered_power_integral(0, 1, 0, 1, 2) == pytest.approx(closed, rel=1e-10)

    @pytest.mark.parametrize("alpha", ALPHAS + [1.9])
    @pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 3.0])
    @pytest.mark.parametrize("k", [0, 1, 2, 3])
    def test_full_range_matches_gamma(self, alpha, p, k):
        if k - alpha <= 0:
            with pytest.raises(DivergentIntegral):
                tempered_power_integral(alpha, p, 0, INF, k)
            return
        got = tempered_power_integral(alpha, p, 0, INF, k)
        assert got == pytest.approx(gamma_closed_form(alpha, p, k), rel=10 * DEFAULT_CONFIG.rel_tol)

    @pytest.mark.parametrize("alpha,p,lo,hi,k", [
        (0.5, 1.0, 0.3, 2.0, 0), (1.5, 2.0, 1e-3, INF, 0), (0.0, 0.5, 2.0, 50.0, 1),
        (-1.0, 1.0, 0.1, 0.2, 3), (1.9, 1.0, 1e-6, 1.0, 0),
    ])
    def test_finite_limits_against_mpmath(self, alpha, p, lo, hi, k):
        mpmath.mp.dps = 30
        f = lambda t: t ** (k - 1 - alpha) * mpmath.exp(-t ** p)
        ref = float(mpmath.quad(f, [lo, min(hi, 1e6) if hi != INF else mpmath.inf]))
        assert tempered_power_integral(alpha, p, lo, hi, k) == pytest.approx(ref, rel=1e-8)

    def test_invalid_limits(self):
        with pytest.raises(InvalidInput):
            tempered_power_integral(0.5, 1, 2.0, 1.0, 0)
        with pytest.raises(InvalidInput):
            tempered_power_integral(0.5, 0.0, 0.0, 1.0, 2)


class TestTruncatedGaussKernel:
    def test_zero(self):
        assert truncated_gauss_kernel(0.5, 1, 0) == 0.0

    def test_one(self):
        assert truncated_gauss_kernel(0, 1, 1) == pytest.approx(0.2642411, abs=1e-7)
        assert truncated_gauss_kernel(0, 1, 1) == pytest.approx(g0_exp(1.0), rel=1e-10)

    def test_infinity(self):
        assert truncated_gauss_kernel(0, 1, INF) == pytest.approx(1.0, rel=1e-12)

    @given(st.sampled_from(ALPHAS), st.sampled_from([0.5, 1.0, 2.0]),
           st.floats(0, 20), st.floats(0, 20))
    @settings(max_examples=60, deadline=None)
    def test_monotone(self, alpha, p, a, b):
        a, b = sorted((a, b))
        assert truncated_gauss_kernel(alpha, p, a) <= truncated_gauss_kernel(alpha, p, b) + 1e-12

    def test_tends_to_full_integral(self):
        assert truncated_gauss_kernel(0.5, 2, INF) == pytest.approx(tempered_power_integral(0.5, 2, 0, INF, 2))


class TestLevyOscillatoryIntegral:
    def test_zero(self):
        assert levy_oscillatory_integral(0.0, 0.5, 1, 1.0) == 0j
        assert levy_oscillatory_integral(0.0, 1.5, 1, INF) == 0j

    def test_conjugate_pair(self):
        a = levy_oscillatory_integral(1.0, 0.5, 1, 1.0)
        b = levy_oscillatory_integral(-1.0, 0.5, 1, 1.0)
        assert a == b.conjugate()

    @pytest.mark.parametrize("alpha", [-0.5, 0.0, 2.0, 2.5])
    def test_untempered_needs_stable_exponent(self, alpha):
        with pytest.raises((StableExponentOutOfRange, InvalidInput)):
            levy_oscillatory_integral(1.0, alpha, 1.0, INF)

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0, 1.5, 1.9])
    @pytest.mark.parametrize("s", [0.1, 1.0, 3.0, -2.0, 10.0])
    def test_stable_closed_form(self, alpha, s):
        got = levy_oscillatory_integral(s, alpha, 1.0, INF)
        ref = stable_psi(s, alpha)
        assert abs(got - ref) <= 1e-7 * max(1.0, abs(ref))

    @pytest.mark.parametrize("s,alpha,p,rho", [
        (1.0, 0.5, 1.0, 1.0), (3.0, 0.5, 1.0, 250.0), (2.0, 1.9, 1.0, 1.0), (50.0, 0.5, 1.0, 1.0),
        (0.3, 1.5, 0.5, 5.0), (1.0, -1.5, 1.0, 0.01), (0.1, 0.5, 1.0, 1e-3), (7.0, 0.0, 2.0, 0.3),
        (-4.0, -1.0, 3.0, 2.0), (0.02, 1.2, 1.0, 40.0),
    ])
    def test_against_panel_oracle(self, s, alpha, p, rho):
        got = levy_oscillatory_integral(s, alpha, p, rho)
        ref = panel_psi(s, alpha, p, rho)
        assert abs(got - ref) <= 1e-7 * max(1.0, abs(ref))

    @given(st.floats(-20, 20), st.sampled_from(ALPHAS + [1.9]), st.sampled_from([0.5, 1.0, 2.0]),
           st.sampled_from([0.01, 0.5, 1.0, 7.0, INF]))
    @settings(max_examples=80, deadline=None)
    def test_symmetry_and_sign(self, s, alpha, p, rho):
        if rho == INF and not 0 < alpha < 2:
            return
        v = levy_oscillatory_integral(s, alpha, p, rho)
        w = levy_oscillatory_integral(-s, alpha, p, rho)
        assert v == w.conjugate()
        assert v.real <= 1e-12


    @pytest.mark.parametrize("alpha", [0.3, 0.9, 1.5, 1.9])
    @pytest.mark.parametrize("rho", [1e-3, 1.0, 30.0])
    @pytest.mark.parametrize("w", [1e-2, 1.0, 1e3, 1e7, 2e7, 1e12])
    def test_exponential_taper_closed_form_up_to_huge_frequency(self, alpha, rho, w):
        got = levy_oscillatory_integral(w, alpha, 1.0, rho)
        ref = exponential_psi(w, alpha, rho)
        assert abs(got - ref) <= 1e-9 * abs(ref)


class TestCosineBound:
    def test_origin(self):
        assert cosine_bound_check(0.0, 0.0, 1.0) == (0.0, 0.0)

    def test_rhs_value(self):
        _, rhs = cosine_bound_check(1.0, 0.0, 1.0)
        assert rhs == pytest.approx(-0.1211105, abs=1e-7)
        assert rhs == pytest.approx(-11 / 24 * (1 - 2 / math.e), rel=1e-10)

    def test_inequality_example(self):
        lhs, rhs = cosine_bound_check(0.5, -1.0, 2.0)
        mpmath.mp.dps = 25
        oracle = float(mpmath.quad(lambda t: (mpmath.cos(0.5 * t) - 1) * t ** -0.0 * mpmath.exp(-t * t),
                                   [0, 1, mpmath.inf]))
        assert lhs == pytest.approx(oracle, rel=1e-8)
        assert lhs <= rhs

    def test_out_of_range(self):
        with pytest.raises(InvalidInput):
            cosine_bound_check(1.5, 0.0, 1.0)


class TestRadialAndCentering:
    def test_radial_integral_indicator(self):
        f = lambda t: 1.0 if t >= 2.0 else 0.0
        got = tempered_radial_integral(f, 0.5, 1.0, 1.0, breakpoints=(2.0,))
        assert got == pytest.approx(tempered_power_integral(0.5, 1.0, 2.0, INF, 0), rel=1e-9)

    def test_radial_integral_stable_power(self):
        f = lambda t: 1.0 if t >= 1.0 else 0.0
        assert tempered_radial_integral(f, 1.0, 1.0) == pytest.approx(1.0, rel=1e-9)

    def test_centering_shift_zero_at_unit_radius(self):
        assert centering_shift(0.5, 1.0, 1.0) == 0.0

    @pytest.mark.parametrize("alpha,p,r", [(0.5, 1.0, 2.0), (-1.0, 2.0, 0.3), (1.5, 1.0, 10.0), (0.0, 0.5, 0.05)])
    def test_centering_shift_against_mpmath(self, alpha, p, r):
        mpmath.mp.dps = 30
        f = lambda t: t * (1 / (1 + t * t) - 1 / (1 + r * r * t * t)) * t ** (-1 - alpha) * mpmath.exp(-t ** p)
        ref = float(mpmath.quad(f, [0, 1 / r, 1, mpmath.inf]))
        assert centering_shift(alpha, p, r) == pytest.approx(ref, rel=1e-8, abs=1e-12)

    @pytest.mark.parametrize("tau", [1e-3, 6e-11, 1e-14])
    @pytest.mark.parametrize("alpha", [0.0, 0.9, 1.5])
    def test_compensator_above_tiny_cutoff(self, tau, alpha):
        # one QUADPACK call over [tau, 1] used to extrapolate the range down to 0
        f = lambda t: t / (1 + t * t) if t > tau else 0.0
        got = tempered_radial_integral(f, alpha, 1.0, 1.0, breakpoints=(tau,))
        g = lambda x: math.exp((1 - alpha) * x) / (1 + math.exp(2 * x)) * math.exp(-math.exp(x))
        ref = integrate.quad(g, math.log(tau), 7.0, epsabs=0, epsrel=1e-13, limit=500)[0]
        assert got == pytest.approx(ref, rel=1e-9)

    @pytest.mark.parametrize("alpha", [-1.5, 0.0, 0.9, 1.9])
    @pytest.mark.parametrize("r", [2.0 ** 24, 2.0 ** -20])
    def test_centering_shift_extreme_radius(self, alpha, r):
        f = lambda x: (math.exp((3 - alpha) * x) * (r * r - 1) / ((1 + math.exp(2 * x)) * (1 + r * r * math.exp(2 * x)))
                       * math.exp(-math.exp(x)))
        ref = integrate.quad(f, -80.0, 7.0, points=[-math.log(r), 0.0], epsabs=0, epsrel=1e-13, limit=1000)[0]
        assert centering_shift(alpha, 1.0, r) == pytest.approx(ref, rel=1e-9)


class TestConfig:
    @pytest.mark.parametrize("kwargs", [dict(abs_tol=0), dict(rel_tol=-1), dict(max_subdivisions=0)])
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(InvalidInput):
            QuadratureConfig(**kwargs)

    def test_defaults(self):
        assert DEFAULT_CONFIG == QuadratureConfig(1e-10, 1e-8, 2000)
