"""
Apparent temperature of a distorted blackbody.

Two estimators are provided:

* ``peak``: locate the maximum of G and convert it to a temperature with the
  undistorted Wien relation ``T = h nu_max / (u_wien k)``. The fractional shift
  depends on ``z`` only.
* ``fit``: least-squares fit of ``a * u**3/(e**u - 1)`` (with ``u`` rescaled by
  a trial temperature) to the tabulated G over a window of u. The amplitude is
  linear and profiled out, leaving a 1-D search over temperature.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .distortion import (
    DEFAULT_GRID,
    SpectrumTable,
    check_z,
    crossover_u,
    f_dimensionless,
    f_dimensionless_derivative,
    tabulate,
)
from .errors import InvalidInputError, NumericalFailureError
from .spectrum import check_temperature, planck_dimensionless, wien_peak_u

__all__ = [
    "ApparentTemperature",
    "FitResult",
    "DEFAULT_WINDOW",
    "golden_section_minimize",
    "argmax_f",
    "apparent_temperature_peak",
    "apparent_temperature_fit",
    "apparent_temperature_from_fit",
    "shift_coefficient",
    "sweep",
]

DEFAULT_WINDOW = (0.5, 8.0)
SCAN_STEP = 0.01
SCAN_LIMIT = 30.0
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ApparentTemperature:
    t_true: float
    z: float
    t_apparent: float
    delta_t: float
    ratio: float
    method: str  # "peak" or "fit"

    @classmethod
    def from_estimate(cls, t_true, z, t_apparent, method):
        if not t_apparent > 0:
            raise NumericalFailureError(f"non-positive apparent temperature {t_apparent}")
        delta_t = t_apparent - t_true
        return cls(t_true, z, t_apparent, delta_t, delta_t / t_true, method)


@dataclass(frozen=True)
class FitResult:
    t_fit: float
    amplitude_fit: float
    rms_residual: float
    window: tuple
    iterations: int


def golden_section_minimize(func, lo, hi, xtol=1e-8, maxiter=500):
    """
    Minimize a unimodal ``func`` on [lo, hi] by golden-section search.

    Ties keep the left sub-interval. Stops when the bracket is narrower than
    ``xtol`` or can no longer shrink in floating point.

    Returns
    -------
    x : float
        Best interior point found.
    fx : float
        ``func(x)``.
    iterations : int
    """
    a, b = float(lo), float(hi)
    if not a < b:
        raise InvalidInputError(f"empty bracket [{lo}, {hi}]")
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = func(c), func(d)
    it = 0
    while b - a > xtol and it < maxiter:
        if not a < c < d < b:
            break
        it += 1
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = func(d)
    if not (math.isfinite(fc) and math.isfinite(fd)):
        raise NumericalFailureError("objective became non-finite during golden-section search")
    if b - a > xtol and it >= maxiter:
        raise NumericalFailureError("golden-section search did not converge")
    if fc <= fd:
        return c, fc, it
    return d, fd, it


def _polish_stationary(dfunc, x, lo, hi, halfwidth=1e-6):
    # bisection on the sign of the derivative around a golden-section estimate
    a, b = max(lo, x - halfwidth), min(hi, x + halfwidth)
    da, db = dfunc(a), dfunc(b)
    if not (da > 0 > db):
        return x
    while True:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            return m
        dm = dfunc(m)
        if dm == 0.0:
            return m
        if dm > 0:
            a = m
        else:
            b = m


@lru_cache(maxsize=4096)
def _argmax_f_cached(z):
    u_hi = crossover_u(z) if z > 0 else SCAN_LIMIT
    n = int(math.floor(u_hi / SCAN_STEP))
    grid = SCAN_STEP * np.arange(1, n + 1)
    grid = grid[grid < u_hi]
    values = f_dimensionless(grid, z)
    i = int(np.argmax(values))
    if i == 0 or i == len(grid) - 1:
        raise NumericalFailureError(f"maximum of f(., {z}) is not interior to the scan range")
    lo, hi = float(grid[i - 1]), float(grid[i + 1])
    x, _, _ = golden_section_minimize(lambda u: -f_dimensionless(u, z), lo, hi, xtol=1e-8)
    return _polish_stationary(lambda u: f_dimensionless_derivative(u, z), x, lo, hi)


def argmax_f(z):
    """
    Location of the global maximum of ``f(., z)`` in u.

    Scans at a step of 0.01 below the crossover (or below 30 when z = 0),
    refines the best cell by golden-section search and finishes with a
    derivative-sign bisection so the result is accurate to rounding. At
    z = 0 the curve is the Planck shape and the Wien root is returned.
    """
    z = check_z(z)
    if z == 0.0:
        return wien_peak_u()
    return _argmax_f_cached(z)


def _argmax_f_search(z):
    # the scan/golden/polish path without the z = 0 shortcut, for cross-checks
    return _argmax_f_cached.__wrapped__(check_z(z))


def apparent_temperature_peak(T, z):
    """Temperature an observer assigns to G by applying the Wien relation to its peak."""
    T = check_temperature(T)
    z = check_z(z)
    t_app = T * (argmax_f(z) / wien_peak_u())
    return ApparentTemperature.from_estimate(T, z, t_app, "peak")


def _window_rows(table, window):
    u_lo, u_hi = (float(w) for w in window)
    if not (math.isfinite(u_lo) and math.isfinite(u_hi) and u_lo < u_hi):
        raise InvalidInputError(f"window must satisfy u_lo < u_hi, got {window}")
    if u_lo < table.u[0] or u_hi > table.u[-1]:
        raise InvalidInputError(
            f"window {window} exceeds table range ({table.u[0]}, {table.u[-1]})"
        )
    if table.z > 0 and u_hi > crossover_u(table.z):
        raise InvalidInputError(
            f"window upper bound {u_hi} lies above the crossover u={crossover_u(table.z):.6g}"
        )
    mask = (table.u >= u_lo) & (table.u <= u_hi)
    if mask.sum() < 8:
        raise InvalidInputError(f"window {window} holds {int(mask.sum())} rows, need >= 8")
    return (u_lo, u_hi), table.u[mask], table.g[mask]


def apparent_temperature_fit(table: SpectrumTable, window=DEFAULT_WINDOW) -> FitResult:
    """
    Best-fit Planck temperature for the G column of ``table``.

    Minimizes ``sum (g_i - a * P(u_i * T / T_fit))**2`` with the amplitude
    ``a`` solved in closed form for every trial ``T_fit``.
    """
    window, u, g = _window_rows(table, window)
    T = table.temperature

    def profile(t_fit):
        p = planck_dimensionless(u * (T / t_fit))
        pp = float(p @ p)
        a = float(g @ p) / pp if pp > 0 else 0.0
        r = g - a * p
        return float(r @ r), a

    # coarse scan to find the basin, then golden-section on the neighbouring cells
    trial = T * np.linspace(0.5, 2.0, 151)
    sse = np.array([profile(t)[0] for t in trial])
    i = int(np.argmin(sse))
    if i == 0 or i == len(trial) - 1:
        raise NumericalFailureError("best-fit temperature lies on the edge of the search range")
    xtol = min(1e-8, 1e-13 * T)
    t_fit, best, iterations = golden_section_minimize(
        lambda t: profile(t)[0], trial[i - 1], trial[i + 1], xtol=xtol
    )
    _, amplitude = profile(t_fit)
    return FitResult(
        t_fit=t_fit,
        amplitude_fit=amplitude,
        rms_residual=math.sqrt(best / len(u)),
        window=window,
        iterations=iterations,
    )


def apparent_temperature_from_fit(table, window=DEFAULT_WINDOW):
    fit = apparent_temperature_fit(table, window)
    return ApparentTemperature.from_estimate(table.temperature, table.z, fit.t_fit, "fit")


def shift_coefficient(z):
    """``|Delta T / T| / z`` from the peak estimator, for 0 < z < 1."""
    z = check_z(z)
    if z == 0.0:
        raise InvalidInputError("shift coefficient is undefined at z = 0")
    # the ratio does not depend on T
    return abs(apparent_temperature_peak(1.0, z).ratio) / z


def sweep(T, z_values, method="peak", grid=None, window=DEFAULT_WINDOW):
    """
    Apparent temperature for each absorption coefficient in ``z_values``.

    Models a cavity measurement repeated at several gas pressures, with ``z``
    standing in for the pressure.
    """
    T = check_temperature(T)
    out = []
    for z in z_values:
        if method == "peak":
            out.append(apparent_temperature_peak(T, z))
        elif method == "fit":
            out.append(apparent_temperature_from_fit(tabulate(T, z, grid or DEFAULT_GRID), window))
        else:
            raise InvalidInputError(f"unknown method {method!r}")
    return out
