"""Blackbody spectra seen through a gas with correlated two-photon absorption."""

__version__ = "0.1.0"

from .errors import InvalidInputError, NumericalFailureError  # noqa: E402
from .spectrum import (  # noqa: E402
    CODATA2018,
    PhysicalConstants,
    peak_frequency,
    planck_amplitude,
    planck_dimensionless,
    planck_energy_density,
    wien_peak_u,
)
from .distortion import (  # noqa: E402
    FrequencyGrid,
    SpectrumTable,
    crossover_u,
    f_dimensionless,
    loss_F,
    observed_G,
    tabulate,
)
from .estimator import (  # noqa: E402
    ApparentTemperature,
    FitResult,
    apparent_temperature_fit,
    apparent_temperature_peak,
    argmax_f,
    shift_coefficient,
)
from .anisotropy import (  # noqa: E402
    AbsorberMap,
    SkyGrid,
    TemperatureMap,
    apparent_temperature_map,
    dipole_fit,
    doppler_dipole_map,
    map_statistics,
)
from .coherence import (  # noqa: E402
    assess,
    band_photon_density,
    flux_to_density,
    phase_gap,
    saha_excited_density,
    total_photon_density,
)
