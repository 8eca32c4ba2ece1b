import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbdistort.distortion import DEFAULT_GRID, tabulate
from bbdistort.errors import InvalidInputError
from bbdistort.estimator import (
    _argmax_f_search,
    apparent_temperature_fit,
    apparent_temperature_from_fit,
    apparent_temperature_peak,
    argmax_f,
    golden_section_minimize,
    shift_coefficient,
    sweep,
)
from bbdistort.spectrum import wien_peak_u

from oracles import brute_force_argmax

# frozen from mpmath root-finding on df/du (40 digits)
ARGMAX_Z001 = 2.8131665859511018
ARGMAX_Z005 = 2.7801309665392257
DELTA_T_2728_Z005 = -0.039940369282245778
SHIFT_COEFF = {0.01: 0.29321155197302546, 0.02: 0.29311517737476764,
               0.05: 0.29281795661470508, 0.10: 0.29229694691876937,
               0.30: 0.28994187996778739}
# frozen from a two-parameter scipy least_squares fit (no profiling) on the default grid
FIT_T_WINDOW_05_8 = 2.6511742204450
FIT_T_WINDOW_1_6 = 2.6677745656419


class TestGoldenSection:
    def test_quadratic(self):
        x, fx, it = golden_section_minimize(lambda x: (x - 1.234) ** 2, 0.0, 3.0, xtol=1e-10)
        assert x == pytest.approx(1.234, abs=1e-9)
        assert it > 0

    def test_empty_bracket(self):
        with pytest.raises(InvalidInputError):
            golden_section_minimize(lambda x: x, 1.0, 1.0)

    def test_tie_keeps_left(self):
        # constant objective: every comparison is a tie, so the bracket walks left
        x, _, _ = golden_section_minimize(lambda x: 0.0, 0.0, 1.0, xtol=1e-6)
        assert x < 1e-5


class TestArgmax:
    def test_zero_z_is_wien(self):
        assert argmax_f(0.0) == wien_peak_u()
        assert _argmax_f_search(0.0) == pytest.approx(wien_peak_u(), abs=1e-14)

    def test_frozen_values(self):
        assert argmax_f(0.05) == pytest.approx(ARGMAX_Z005, abs=1e-13)
        assert argmax_f(0.01) == pytest.approx(ARGMAX_Z001, abs=1e-13)

    @pytest.mark.parametrize("z", [0.0, 0.01, 0.05, 0.1, 0.3])
    def test_matches_brute_force(self, z):
        assert _argmax_f_search(z) == pytest.approx(brute_force_argmax(z), abs=1e-5)

    def test_decreasing_in_z(self):
        zs = np.round(np.arange(0.01, 0.1001, 0.01), 2)
        peaks = [argmax_f(z) for z in zs]
        assert np.all(np.diff(peaks) < 0)
        brute = [brute_force_argmax(z) for z in zs]
        assert np.all(np.diff(brute) < 0)

    def test_invalid_z(self):
        with pytest.raises(InvalidInputError):
            argmax_f(1.0)


class TestPeakEstimator:
    def test_cmb_headline_shift(self):
        at = apparent_temperature_peak(2.728, 0.05)
        assert at.delta_t == pytest.approx(-0.039, abs=0.002)
        assert at.delta_t == pytest.approx(DELTA_T_2728_Z005, rel=1e-12)
        assert at.method == "peak"
        assert at.ratio == pytest.approx(at.delta_t / at.t_true, rel=1e-15)
        assert at.t_apparent == pytest.approx(2.688, abs=1e-3)

    @pytest.mark.parametrize("T", [0.1, 2.728, 300.0, 5800.0])
    def test_zero_z(self, T):
        assert abs(apparent_temperature_peak(T, 0.0).delta_t) < 1e-9 * T

    def test_ratio_independent_of_t(self):
        ref = apparent_temperature_peak(2.728, 0.05).ratio
        for T in (0.1, 5.456, 300.0, 5800.0):
            assert apparent_temperature_peak(T, 0.05).ratio == pytest.approx(ref, abs=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(min_value=1e-3, max_value=0.9), st.floats(min_value=0.01, max_value=1e4))
    def test_always_colder(self, z, T):
        assert apparent_temperature_peak(T, z).delta_t < 0

    def test_fast(self):
        t0 = time.perf_counter()
        apparent_temperature_peak(2.728, 0.0517)
        assert time.perf_counter() - t0 < 0.01


class TestShiftCoefficient:
    @pytest.mark.parametrize("z", sorted(SHIFT_COEFF))
    def test_frozen(self, z):
        assert shift_coefficient(z) == pytest.approx(SHIFT_COEFF[z], rel=1e-10)

    def test_near_constant_for_small_z(self):
        ref = shift_coefficient(0.05)
        # -0.039 K at 2.728 K, rounded to two digits, back-solves to 0.286
        assert ref == pytest.approx(0.039 / 2.728 / 0.05, rel=0.03)
        for z in (0.01, 0.10):
            assert shift_coefficient(z) == pytest.approx(ref, rel=0.05)

    def test_zero_z_rejected(self):
        with pytest.raises(InvalidInputError):
            shift_coefficient(0.0)


class TestFitEstimator:
    def test_recovers_truth_without_absorber(self):
        fit = apparent_temperature_fit(tabulate(2.728, 0.0))
        assert fit.t_fit == pytest.approx(2.728, abs=1e-6)
        assert fit.rms_residual < 1e-12
        assert fit.amplitude_fit == pytest.approx(1.0, abs=1e-9)
        assert fit.window == (0.5, 8.0)

    @pytest.mark.parametrize("window, expected", [((0.5, 8.0), FIT_T_WINDOW_05_8),
                                                  ((1.0, 6.0), FIT_T_WINDOW_1_6)])
    def test_matches_two_parameter_fit(self, window, expected):
        fit = apparent_temperature_fit(tabulate(2.728, 0.05), window)
        assert fit.t_fit == pytest.approx(expected, abs=1e-8)
        assert fit.t_fit < 2.728

    def test_window_sensitivity(self):
        table = tabulate(2.728, 0.05)
        a = apparent_temperature_fit(table, (0.5, 8.0)).t_fit
        b = apparent_temperature_fit(table, (1.0, 6.0)).t_fit
        assert abs(a - b) > 1e-3

    @pytest.mark.parametrize("z, window", [(0.01, (0.5, 8.0)), (0.05, (0.5, 8.0)),
                                           (0.1, (0.5, 8.0)), (0.2, (0.5, 7.0))])
    def test_sign_agrees_with_peak(self, z, window):
        fit = apparent_temperature_from_fit(tabulate(2.728, z), window)
        peak = apparent_temperature_peak(2.728, z)
        assert fit.method == "fit"
        assert math.copysign(1, fit.delta_t) == math.copysign(1, peak.delta_t) == -1

    @pytest.mark.parametrize("window", [(8.0, 0.5), (0.01, 8.0), (0.5, 13.0), (2.0, 2.05)])
    def test_bad_windows(self, window):
        with pytest.raises(InvalidInputError):
            apparent_temperature_fit(tabulate(2.728, 0.0), window)

    def test_window_above_crossover(self):
        # u_cross = 8 at z = 8/(e^4 + 1), so the default window is valid just below that
        z_edge = 8.0 / (math.exp(4.0) + 1.0)
        apparent_temperature_fit(tabulate(2.728, z_edge * 0.999), (0.5, 8.0))
        with pytest.raises(InvalidInputError):
            apparent_temperature_fit(tabulate(2.728, z_edge * 1.001), (0.5, 8.0))


def test_sweep_peak_and_fit():
    zs = [0.0, 0.01, 0.05]
    peak = sweep(2.728, zs)
    assert [a.z for a in peak] == zs
    assert peak[0].delta_t == 0.0
    fit = sweep(2.728, zs, method="fit", grid=DEFAULT_GRID)
    assert all(a.method == "fit" for a in fit)
    with pytest.raises(InvalidInputError):
        sweep(2.728, zs, method="median")
