"""
Physical constants (CODATA 2018 exact SI values).

Every module reads h, k and c from here so there is exactly one source.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    h: float  # Planck constant [J s]
    k: float  # Boltzmann constant [J/K]
    c: float  # speed of light [m/s]

    def __post_init__(self):
        for name in ("h", "k", "c"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


CODATA2018 = PhysicalConstants(h=6.62607015e-34, k=1.380649e-23, c=2.99792458e8)

H = CODATA2018.h
K_B = CODATA2018.k
C = CODATA2018.c
C_CM = C * 100.0  # [cm/s]

M_E = 9.1093837015e-31  # electron mass [kg]
E_CHARGE = 1.602176634e-19  # J per eV

GHZ = 1e9
INVERSE_CM_HZ = C_CM  # 1 cm^-1 = 29.9792458 GHz
