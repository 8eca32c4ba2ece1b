"""
Blackbody spectrum seen through a gas that removes photon pairs coherently.

Two photons of frequency nu/2 absorbed together leave a hole at nu whose depth
is a constant fraction ``z`` of the energy density at nu/2:

    F(nu) = z E(nu/2),      G(nu) = E(nu) - F(nu) = A f(u, z),
    f(u, z) = u**3/(e**u - 1) - z (u**3/8)/(e**(u/2) - 1).

``G`` is returned as-is even where it turns negative (above ``crossover_u``).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .spectrum import (
    check_temperature,
    frequency_from_u,
    planck_dimensionless,
    planck_dimensionless_derivative,
    planck_energy_density,
)

__all__ = [
    "FrequencyGrid",
    "SpectrumTable",
    "DEFAULT_GRID",
    "check_z",
    "f_dimensionless",
    "f_dimensionless_derivative",
    "loss_dimensionless",
    "loss_F",
    "observed_G",
    "crossover_u",
    "tabulate",
]


def check_z(z):
    """Validate an absorption coefficient, 0 <= z < 1."""
    try:
        z = float(z)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"z must be a number, got {z!r}") from exc
    if not (math.isfinite(z) and 0.0 <= z < 1.0):
        raise InvalidInputError(f"z must satisfy 0 <= z < 1, got {z}")
    return z


@dataclass(frozen=True)
class FrequencyGrid:
    u_min: float
    u_max: float
    points: int

    def __post_init__(self):
        if not (math.isfinite(self.u_min) and math.isfinite(self.u_max)):
            raise InvalidInputError("grid bounds must be finite")
        if not 0 < self.u_min < self.u_max:
            raise InvalidInputError(f"grid needs 0 < u_min < u_max, got ({self.u_min}, {self.u_max})")
        if int(self.points) != self.points or self.points < 2:
            raise InvalidInputError(f"grid needs an integer number of points >= 2, got {self.points}")

    def values(self):
        return np.linspace(self.u_min, self.u_max, int(self.points))


DEFAULT_GRID = FrequencyGrid(0.05, 12.0, 1200)


@dataclass(frozen=True)
class SpectrumTable:
    """E/A, F/A and G/A sampled on a grid of u for one (T, z) pair."""

    temperature: float
    z: float
    u: np.ndarray
    nu: np.ndarray
    e: np.ndarray
    f_loss: np.ndarray
    g: np.ndarray

    @property
    def rows(self):
        return list(zip(self.u.tolist(), self.nu.tolist(), self.e.tolist(),
                        self.f_loss.tolist(), self.g.tolist()))

    def __len__(self):
        return len(self.u)


def loss_dimensionless(u, z):
    """``z (u**3/8)/(e**(u/2) - 1)``, i.e. z times the Planck shape at u/2."""
    z = check_z(z)
    return z * planck_dimensionless(np.asarray(u, dtype=float) / 2.0)


def f_dimensionless(u, z):
    """
    Observed spectrum divided by the amplitude A.

    Parameters
    ----------
    u : float or array_like
        Dimensionless frequency, finite and >= 0.
    z : float
        Absorption coefficient in [0, 1).
    """
    z = check_z(z)
    out = planck_dimensionless(u) - loss_dimensionless(u, z)
    return float(out) if np.ndim(out) == 0 else out


def f_dimensionless_derivative(u, z):
    z = check_z(z)
    u = np.asarray(u, dtype=float)
    out = planck_dimensionless_derivative(u) - 0.5 * z * planck_dimensionless_derivative(u / 2.0)
    return float(out) if np.ndim(out) == 0 else out


def loss_F(T, nu, z):
    """Two-photon loss ``z E(nu/2)`` in J m^-3 Hz^-1."""
    z = check_z(z)
    return z * planck_energy_density(T, np.asarray(nu, dtype=float) / 2.0)


def observed_G(T, nu, z):
    """Observed spectral energy density ``E(nu) - F(nu)`` in J m^-3 Hz^-1."""
    return planck_energy_density(T, nu) - loss_F(T, nu, z)


def crossover_u(z):
    """
    Unique positive zero of f(., z): ``2 ln(8/z - 1)``.

    f is positive below and negative above it. Raises for z = 0, where f never
    changes sign.
    """
    z = check_z(z)
    if z == 0.0:
        raise InvalidInputError("no crossover for z = 0: f(u, 0) > 0 for all u > 0")
    return 2.0 * math.log(8.0 / z - 1.0)


def tabulate(T, z, grid=DEFAULT_GRID):
    T = check_temperature(T)
    z = check_z(z)
    u = grid.values()
    e = planck_dimensionless(u)
    f_loss = z * planck_dimensionless(u / 2.0)
    return SpectrumTable(
        temperature=T,
        z=z,
        u=u,
        nu=frequency_from_u(T, u),
        e=e,
        f_loss=f_loss,
        g=e - f_loss,
    )
