"""
When can correlated two-photon absorption operate?

The working criterion is that photons must vastly outnumber absorbers and the
two absorptions must fall within a small phase interval ``omega * dt``. This
module provides the photon densities, the phase gap, a Boltzmann/Saha
population estimate for the absorbing species, and the combined verdict.

Number densities at the interface are in cm^-3; SI is used internally.
"""

import math
from dataclasses import dataclass, field

from scipy import integrate

from .constants import C, C_CM, E_CHARGE, H, K_B, M_E
from .errors import InvalidInputError, NumericalFailureError
from .spectrum import check_frequency, check_temperature

__all__ = [
    "ZETA3",
    "SahaInput",
    "CoherenceAssessment",
    "HeliumScenario",
    "ScenarioEstimate",
    "flux_to_density",
    "band_photon_density",
    "total_photon_density",
    "phase_gap",
    "saha_excited_density",
    "ionospheric_helium_density",
    "assess",
]

ZETA3 = 1.2020569031595942853997  # Apery's constant
M3_TO_CM3 = 1e-6

DEFAULT_RATIO_THRESHOLD = 100.0
DEFAULT_GAP_LIMIT = 1.0  # [rad]

HE_IONIZATION_EV = 24.587389
HE_PLUS_IONIZATION_EV = 54.417765


def flux_to_density(flux):
    """Photon number density (cm^-3) of a flux in photons cm^-2 s^-1."""
    flux = float(flux)
    if not (math.isfinite(flux) and flux >= 0):
        raise InvalidInputError(f"flux must be finite and >= 0, got {flux}")
    return flux / C_CM


def _photon_integrand(x):
    if x <= 0:
        return 0.0
    return x * x * math.exp(-x) / -math.expm1(-x)


def _bose_integral(x_lo, x_hi):
    # integral of x^2/(e^x - 1); split so quad sees the bulk and the tail separately
    pieces = [x_lo]
    for b in (10.0, 60.0):
        if x_lo < b < x_hi:
            pieces.append(b)
    pieces.append(x_hi)
    total = 0.0
    for a, b in zip(pieces[:-1], pieces[1:]):
        val, _ = integrate.quad(_photon_integrand, a, b, epsabs=0.0, epsrel=1e-12, limit=200)
        total += val
    return total


def band_photon_density(T, nu_lo, nu_hi):
    """
    Blackbody photon number density (cm^-3) between two frequencies.

    Integrates ``8 pi nu^2/c^3 / (exp(h nu/k T) - 1)`` by adaptive quadrature.
    ``nu_lo`` may be 0 and ``nu_hi`` may be ``math.inf``; an empty band
    (``nu_lo == nu_hi``) gives 0.
    """
    T = check_temperature(T)
    nu_lo, nu_hi = float(nu_lo), float(nu_hi)
    if not (math.isfinite(nu_lo) and nu_lo >= 0) or math.isnan(nu_hi):
        raise InvalidInputError(f"invalid band ({nu_lo}, {nu_hi})")
    if nu_hi < nu_lo:
        raise InvalidInputError(f"band needs nu_lo <= nu_hi, got ({nu_lo}, {nu_hi})")
    if nu_hi == nu_lo:
        return 0.0
    scale = K_B * T / H
    prefactor = 8.0 * math.pi * (scale / C) ** 3
    return prefactor * _bose_integral(nu_lo / scale, nu_hi / scale) * M3_TO_CM3


def total_photon_density(T):
    """Closed form ``16 pi zeta(3) (k T / h c)**3`` in cm^-3."""
    T = check_temperature(T)
    return 16.0 * math.pi * ZETA3 * (K_B * T / (H * C)) ** 3 * M3_TO_CM3


def phase_gap(nu, delta_t):
    """Phase ``2 pi nu dt`` (rad) accumulated between two absorptions."""
    nu = check_frequency(nu)
    delta_t = float(delta_t)
    if not (math.isfinite(delta_t) and delta_t >= 0):
        raise InvalidInputError(f"delta_t must be finite and >= 0, got {delta_t}")
    return 2.0 * math.pi * nu * delta_t


@dataclass(frozen=True)
class SahaInput:
    t_e: float  # electron temperature [K]
    n_e: float  # electron density [cm^-3]
    chi: float  # excitation/ionization energy [eV]
    g_upper: float = 1.0
    g_lower: float = 1.0

    def __post_init__(self):
        check_temperature(self.t_e)
        if not (math.isfinite(self.n_e) and self.n_e > 0):
            raise InvalidInputError(f"n_e must be finite and > 0, got {self.n_e}")
        if not (math.isfinite(self.chi) and self.chi >= 0):
            raise InvalidInputError(f"chi must be finite and >= 0, got {self.chi}")
        if not (self.g_upper >= 1 and self.g_lower >= 1):
            raise InvalidInputError("statistical weights must be >= 1")


def saha_excited_density(inp, n_total, mode="boltzmann"):
    """
    Population (cm^-3) of an upper state or stage relative to ``n_total``.

    ``boltzmann``: ``n_total g_u/g_l exp(-chi/kT_e)``.
    ``saha``: the same times ``(2/n_e) (2 pi m_e k T_e / h^2)^(3/2)``, i.e.
    the next ionization stage when ``n_total`` is the lower-stage density.
    """
    n_total = float(n_total)
    if not (math.isfinite(n_total) and n_total > 0):
        raise InvalidInputError(f"n_total must be finite and > 0, got {n_total}")
    exponent = -inp.chi * E_CHARGE / (K_B * inp.t_e)
    value = n_total * (inp.g_upper / inp.g_lower) * math.exp(exponent)
    if mode == "saha":
        try:
            thermal = (2.0 * math.pi * M_E * K_B * inp.t_e / H**2) ** 1.5 * M3_TO_CM3
        except OverflowError as exc:
            raise NumericalFailureError(f"Saha thermal factor overflows at t_e={inp.t_e} K") from exc
        value *= 2.0 / inp.n_e * thermal
    elif mode != "boltzmann":
        raise InvalidInputError(f"mode must be 'boltzmann' or 'saha', got {mode!r}")
    if not math.isfinite(value):
        raise NumericalFailureError(
            f"population not finite (exponent {exponent:.6g}, mode {mode}, t_e {inp.t_e} K)"
        )
    return value


@dataclass(frozen=True)
class HeliumScenario:
    """Assumption set for the upper-atmosphere helium estimate."""

    pressure_mbar: float = 2.0
    t_e: float = 1.5e4  # electron temperature [K]
    t_gas: float = 1.5e4  # LTE: gas at the electron temperature
    he_fraction: float = 5e-6  # by number, dry air
    n_e: float = 1e5  # ionospheric E-region electron density [cm^-3]
    level_n: int = 40  # principal quantum number of the He+ Rydberg level

    def assumptions(self):
        return {
            "pressure_mbar": self.pressure_mbar,
            "t_e_k": self.t_e,
            "t_gas_k": self.t_gas,
            "he_fraction": self.he_fraction,
            "n_e_per_cc": self.n_e,
            "level_n": self.level_n,
            "chi_ionization_ev": HE_IONIZATION_EV,
            "chi_excitation_ev": HE_PLUS_IONIZATION_EV * (1.0 - 1.0 / self.level_n**2),
            "weights": "He I g=1, He II ground g=2, He II level n g=2n^2",
            "steps": "ideal gas -> He -> Saha He+/He -> Boltzmann He+(1) -> He+(n)",
        }


@dataclass(frozen=True)
class ScenarioEstimate:
    density: float  # [cm^-3]
    steps: dict = field(default_factory=dict)
    assumptions: dict = field(default_factory=dict)


def ionospheric_helium_density(scenario=HeliumScenario()):
    """
    Order-of-magnitude density of He+ in a high Rydberg level.

    Chain: total gas density from the ideal-gas law, helium share, ionized
    fraction from Saha balance, then Boltzmann excitation of He+ to level n.
    The inputs are underdetermined, so only the order of magnitude is
    meaningful; the assumption list is returned with the number.
    """
    s = scenario
    n_gas = s.pressure_mbar * 100.0 / (K_B * s.t_gas) * M3_TO_CM3
    n_he = s.he_fraction * n_gas
    ratio = saha_excited_density(
        SahaInput(s.t_e, s.n_e, HE_IONIZATION_EV, g_upper=2.0, g_lower=1.0), 1.0, mode="saha"
    )
    n_he_plus = n_he * ratio / (1.0 + ratio)
    chi_n = HE_PLUS_IONIZATION_EV * (1.0 - 1.0 / s.level_n**2)
    n_level = saha_excited_density(
        SahaInput(s.t_e, s.n_e, chi_n, g_upper=2.0 * s.level_n**2, g_lower=2.0),
        n_he_plus,
        mode="boltzmann",
    )
    steps = {
        "n_gas_per_cc": n_gas,
        "n_he_per_cc": n_he,
        "saha_ratio_he_plus_over_he": ratio,
        "n_he_plus_per_cc": n_he_plus,
        "n_level_per_cc": n_level,
    }
    return ScenarioEstimate(density=n_level, steps=steps, assumptions=s.assumptions())


@dataclass(frozen=True)
class CoherenceAssessment:
    photon_density: float  # [cm^-3]
    absorber_density: float  # [cm^-3]
    ratio: float  # photon/absorber, inf when there is no absorber
    phase_gap: float  # [rad]
    satisfied: bool
    no_absorber: bool
    ratio_threshold: float
    gap_limit: float


def assess(photon, absorber, nu, delta_t,
           ratio_threshold=DEFAULT_RATIO_THRESHOLD, gap_limit=DEFAULT_GAP_LIMIT):
    """
    Check photon density against absorber density and the phase gap.

    ``satisfied`` requires ``photon/absorber > ratio_threshold`` and
    ``phase_gap < gap_limit``. With ``absorber == 0`` the ratio is infinite,
    ``no_absorber`` is set and only the phase condition decides.
    """
    photon, absorber = float(photon), float(absorber)
    if not (math.isfinite(photon) and photon >= 0):
        raise InvalidInputError(f"photon density must be finite and >= 0, got {photon}")
    if not (math.isfinite(absorber) and absorber >= 0):
        raise InvalidInputError(f"absorber density must be finite and >= 0, got {absorber}")
    gap = phase_gap(nu, delta_t)
    no_absorber = absorber == 0.0
    ratio = math.inf if no_absorber else photon / absorber
    dense_enough = no_absorber or ratio > ratio_threshold
    return CoherenceAssessment(
        photon_density=photon,
        absorber_density=absorber,
        ratio=ratio,
        phase_gap=gap,
        satisfied=bool(dense_enough and gap < gap_limit),
        no_absorber=no_absorber,
        ratio_threshold=ratio_threshold,
        gap_limit=gap_limit,
    )
