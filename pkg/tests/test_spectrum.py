import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbdistort.errors import InvalidInputError
from bbdistort.spectrum import (
    CODATA2018,
    PhysicalConstants,
    peak_frequency,
    planck_amplitude,
    planck_dimensionless,
    planck_dimensionless_derivative,
    planck_energy_density,
    wien_peak_u,
)

from oracles import H, K, energy_density_direct, planck_mp

# frozen from 40-digit mpmath evaluations
P_AT_1 = 0.5819767068693264
P_AT_WIEN_6DP = 1.4214354727477063  # at u = 2.821439
WIEN_U = 2.8214393721220789
A_2728 = 1.1351379362745307e-25
NU_PEAK_2728 = 1.6037709466860538e11


def test_constants_are_codata2018():
    assert CODATA2018.h == 6.62607015e-34
    assert CODATA2018.k == 1.380649e-23
    assert CODATA2018.c == 2.99792458e8


def test_constants_must_be_positive():
    with pytest.raises(ValueError):
        PhysicalConstants(h=-1.0, k=1.0, c=1.0)


class TestPlanckDimensionless:
    def test_zero(self):
        assert planck_dimensionless(0.0) == 0.0

    def test_unit(self):
        assert planck_dimensionless(1.0) == pytest.approx(P_AT_1, rel=1e-14)

    def test_at_wien_peak(self):
        assert planck_dimensionless(2.821439) == pytest.approx(P_AT_WIEN_6DP, rel=1e-14)

    def test_large_u_is_zero(self):
        assert planck_dimensionless(701.0) == 0.0
        assert planck_dimensionless(1e6) == 0.0

    def test_array_input(self):
        u = np.array([0.0, 1.0, 2.821439])
        out = planck_dimensionless(u)
        assert out.shape == (3,)
        assert out[1] == planck_dimensionless(1.0)

    @pytest.mark.parametrize("bad", [-1e-3, math.nan, math.inf])
    def test_rejects_bad_u(self, bad):
        with pytest.raises(InvalidInputError):
            planck_dimensionless(bad)

    def test_small_branch_consistency(self):
        # the series branch evaluated at the naive branch's argument
        u = 1e-5
        naive = u**3 / math.expm1(u)
        series = u * u * (1 - u / 2 + u * u / 12)
        assert series == pytest.approx(naive, rel=1e-10)
        # and both sides of the switchover agree with 40-digit arithmetic
        for v in (9.99e-7, 1.001e-6):
            assert planck_dimensionless(v) == pytest.approx(float(planck_mp(v)), rel=1e-12)

    def test_unimodal_on_grid(self):
        u = np.linspace(0.01, 30, 1000)
        p = planck_dimensionless(u)
        d = np.diff(p)
        left = u[1:] < wien_peak_u()
        right = u[:-1] > wien_peak_u()
        assert np.all(d[left] > 0)
        assert np.all(d[right] < 0)
        assert np.all(p > 0)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(min_value=1e-8, max_value=650))
    def test_matches_mpmath(self, u):
        assert planck_dimensionless(u) == pytest.approx(float(planck_mp(u)), rel=1e-12)


class TestAmplitude:
    def test_cmb_value(self):
        assert planck_amplitude(2.728) == pytest.approx(A_2728, rel=1e-14)

    def test_cubic_scaling(self):
        assert planck_amplitude(5.456) / planck_amplitude(2.728) == pytest.approx(8.0, rel=1e-15)

    def test_unit_temperature(self):
        h, k, c = CODATA2018.h, CODATA2018.k, CODATA2018.c
        assert planck_amplitude(1.0) == pytest.approx(8 * math.pi * k**3 / (h**2 * c**3), rel=1e-15)

    @pytest.mark.parametrize("bad", [0.0, -2.0, math.inf, math.nan, "x"])
    def test_rejects_bad_temperature(self, bad):
        with pytest.raises(InvalidInputError):
            planck_amplitude(bad)


class TestEnergyDensity:
    def test_vanishes_at_low_frequency(self):
        assert planck_energy_density(2.728, 1e-3) < 1e-40

    def test_at_peak(self):
        nu = NU_PEAK_2728
        expected = A_2728 * float(planck_mp(float(H) * nu / (float(K) * 2.728)))
        assert planck_energy_density(2.728, nu) == pytest.approx(expected, rel=1e-13)

    def test_depends_on_u_only(self):
        u = 1.7
        for T in (0.3, 2.728, 300.0):
            nu = u * CODATA2018.k * T / CODATA2018.h
            assert planck_energy_density(T, nu) / planck_amplitude(T) == pytest.approx(
                planck_dimensionless(u), rel=1e-14)

    def test_product_form_bitwise(self):
        T, nu = 2.728, 1.2e11
        u = CODATA2018.h * nu / (CODATA2018.k * T)
        assert planck_energy_density(T, nu) == planck_amplitude(T) * planck_dimensionless(u)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(min_value=0.05, max_value=1e4), st.floats(min_value=0.01, max_value=20.0))
    def test_direct_formula(self, T, u):
        nu = u * CODATA2018.k * T / CODATA2018.h
        assert planck_energy_density(T, nu) == pytest.approx(float(energy_density_direct(T, nu)), rel=1e-12)


class TestWienPeak:
    def test_value(self):
        u = wien_peak_u()
        assert 2.821438 < u < 2.821440
        assert u == pytest.approx(WIEN_U, abs=1e-15)

    def test_residual(self):
        u = wien_peak_u()
        assert abs(3 * (1 - math.exp(-u)) - u) < 1e-12

    def test_stationary(self):
        u, h = wien_peak_u(), 1e-5
        fd = (planck_dimensionless(u + h) - planck_dimensionless(u - h)) / (2 * h)
        assert abs(fd) < 1e-9
        assert abs(planck_dimensionless_derivative(u)) < 1e-14

    def test_fast(self):
        wien_peak_u.cache_clear()
        t0 = time.perf_counter()
        wien_peak_u()
        assert time.perf_counter() - t0 < 1e-3


class TestPeakFrequency:
    def test_cmb(self):
        res = peak_frequency(2.728)
        assert res.nu_peak == pytest.approx(NU_PEAK_2728, rel=1e-14)
        assert res.u_peak == wien_peak_u()
        assert res.value > 0

    def test_linear_in_t(self):
        assert peak_frequency(5.456).nu_peak == pytest.approx(2 * peak_frequency(2.728).nu_peak, rel=1e-15)

    def test_round_trip(self):
        res = peak_frequency(2.728)
        T = CODATA2018.h * res.nu_peak / (res.u_peak * CODATA2018.k)
        assert T == pytest.approx(2.728, rel=1e-10)
        # and with the rounded constant 2.821439 as an observer would apply it
        assert CODATA2018.h * res.nu_peak / (2.821439 * CODATA2018.k) == pytest.approx(2.728, rel=1e-6)
