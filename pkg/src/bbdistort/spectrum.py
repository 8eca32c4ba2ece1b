"""
Planck blackbody law in dimensional and dimensionless form.

The spectral energy density per unit frequency is written as

    E(nu) = A(T) * u**3 / (exp(u) - 1),   u = h nu / (k T),
    A(T)  = 8 pi (k T / c)**3 / h**2,

so that the shape of the spectrum depends on ``u`` only and all temperature
dependence sits in the amplitude ``A``.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constants import CODATA2018, H, K_B, PhysicalConstants
from .errors import InvalidInputError, NumericalFailureError

__all__ = [
    "PhysicalConstants",
    "CODATA2018",
    "PeakResult",
    "check_temperature",
    "check_frequency",
    "planck_dimensionless",
    "planck_dimensionless_derivative",
    "planck_amplitude",
    "planck_energy_density",
    "wien_peak_u",
    "peak_frequency",
    "u_from_frequency",
    "frequency_from_u",
]

SMALL_U = 1e-6
LARGE_U = 700.0


@dataclass(frozen=True)
class PeakResult:
    u_peak: float
    nu_peak: float  # [Hz]
    value: float  # u**3/(e**u - 1) at u_peak


def check_temperature(T):
    """Return ``T`` as a float, raising if it is not a finite positive number."""
    try:
        T = float(T)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"temperature must be a number, got {T!r}") from exc
    if not (math.isfinite(T) and T > 0):
        raise InvalidInputError(f"temperature must be finite and > 0 K, got {T}")
    return T


def check_frequency(nu):
    try:
        nu = float(nu)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"frequency must be a number, got {nu!r}") from exc
    if not (math.isfinite(nu) and nu > 0):
        raise InvalidInputError(f"frequency must be finite and > 0 Hz, got {nu}")
    return nu


def _as_u_array(u):
    arr = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("u must be finite")
    if np.any(arr < 0):
        raise InvalidInputError("u must be >= 0")
    return arr


def _planck_kernel(arr):
    # arr is already validated; returns an array of the same shape
    flat = np.atleast_1d(arr)
    out = np.zeros_like(flat)
    small = flat < SMALL_U
    mid = ~small & (flat <= LARGE_U)
    us = flat[small]
    out[small] = us * us * (1.0 - us / 2.0 + us * us / 12.0)
    um = flat[mid]
    out[mid] = um**3 / np.expm1(um)
    return out.reshape(arr.shape)


def planck_dimensionless(u):
    """
    Dimensionless Planck shape ``u**3 / (exp(u) - 1)``.

    Accepts a scalar or an array. Uses the series ``u**2 (1 - u/2 + u**2/12)``
    below ``u = 1e-6`` and returns 0 above ``u = 700``.

    Parameters
    ----------
    u : float or array_like
        Dimensionless frequency ``h nu / (k T)``, finite and non-negative.

    Returns
    -------
    float or ndarray
    """
    arr = _as_u_array(u)
    out = _planck_kernel(arr)
    return float(out) if out.ndim == 0 else out


def planck_dimensionless_derivative(u):
    """d/du of ``u**3/(e**u - 1)``, for u > 0."""
    arr = _as_u_array(u)
    if np.any(arr <= 0):
        raise InvalidInputError("derivative is evaluated for u > 0 only")
    p = _planck_kernel(arr)
    # p * (3/u - e^u/(e^u - 1)), written to avoid overflow
    out = p * (3.0 / arr + 1.0 / np.expm1(-arr))
    return float(out) if np.ndim(out) == 0 else out


def planck_amplitude(T, constants=CODATA2018):
    """Amplitude ``A = 8 pi (k T / c)**3 / h**2`` in J s m^-3."""
    T = check_temperature(T)
    return 8.0 * math.pi * (constants.k * T / constants.c) ** 3 / constants.h**2


def u_from_frequency(T, nu):
    return H * nu / (K_B * T)


def frequency_from_u(T, u):
    return u * K_B * T / H


def planck_energy_density(T, nu):
    """
    Spectral energy density E(nu) in J m^-3 Hz^-1.

    ``nu`` may be a scalar or an array of frequencies in Hz.
    """
    T = check_temperature(T)
    nu_arr = np.asarray(nu, dtype=float)
    if not np.all(np.isfinite(nu_arr)) or np.any(nu_arr <= 0):
        raise InvalidInputError("frequency must be finite and > 0 Hz")
    return planck_amplitude(T) * planck_dimensionless(u_from_frequency(T, nu_arr))


def _wien_residual(u):
    return 3.0 * (1.0 - math.exp(-u)) - u


def _bracketed_newton(g, dg, lo, hi, ftol=1e-14, maxiter=200):
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if (glo > 0) == (ghi > 0):
        raise NumericalFailureError(f"root not bracketed on [{lo}, {hi}]")
    x = 0.5 * (lo + hi)
    for _ in range(maxiter):
        gx = g(x)
        if abs(gx) < ftol:
            return x
        if (gx > 0) == (glo > 0):
            lo, glo = x, gx
        else:
            hi = x
        d = dg(x)
        step_ok = d != 0.0
        if step_ok:
            x_new = x - gx / d
            step_ok = lo < x_new < hi
        if not step_ok:
            x_new = 0.5 * (lo + hi)
        if x_new == x or hi - lo <= 4.0 * np.finfo(float).eps * abs(x):
            return x_new
        x = x_new
    raise NumericalFailureError("bracketed Newton did not converge")


@lru_cache(maxsize=None)
def wien_peak_u():
    """
    Location of the maximum of ``u**3/(e**u - 1)``.

    Solves ``3 (1 - exp(-u)) = u`` on [1, 5] by Newton's method safeguarded
    with bisection.
    """
    u = _bracketed_newton(_wien_residual, lambda x: 3.0 * math.exp(-x) - 1.0, 1.0, 5.0)
    if abs(_wien_residual(u)) >= 1e-12:
        raise NumericalFailureError(f"Wien root residual too large at u={u}")
    return u


def peak_frequency(T):
    """Frequency of the Planck maximum for temperature ``T`` (K)."""
    T = check_temperature(T)
    u = wien_peak_u()
    return PeakResult(u_peak=u, nu_peak=frequency_from_u(T, u), value=planck_dimensionless(u))
