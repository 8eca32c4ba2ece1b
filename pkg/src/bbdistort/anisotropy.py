"""
Sky maps of apparent temperature behind a direction-dependent absorber.

Pixelization is equirectangular: ``n_lon`` x ``n_lat`` pixels with centres at

    lon_i = -180 + (i + 1/2) 360/n_lon,   lat_j = -90 + (j + 1/2) 180/n_lat,

each weighted by cos(lat_j) (normalized to sum 1) so weighted sums approximate
integrals over the sphere. Maps are stored as arrays of shape (n_lat, n_lon).
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .distortion import check_z
from .errors import InvalidInputError
from .estimator import apparent_temperature_peak
from .spectrum import check_temperature

__all__ = [
    "SkyGrid",
    "AbsorberMap",
    "TemperatureMap",
    "DipoleFit",
    "MapStatistics",
    "absorber_map_from_function",
    "apparent_temperature_map",
    "map_statistics",
    "dipole_fit",
    "doppler_dipole_map",
    "read_absorber_csv",
    "write_absorber_csv",
    "write_temperature_csv",
]

# pixel-centre matching tolerance when reading CSV maps [deg]
COORD_TOL_DEG = 1e-6


@dataclass(frozen=True)
class SkyGrid:
    n_lon: int = 72
    n_lat: int = 36

    def __post_init__(self):
        for name in ("n_lon", "n_lat"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise InvalidInputError(f"{name} must be a positive integer, got {v}")

    @property
    def shape(self):
        return (self.n_lat, self.n_lon)

    @property
    def lon_deg(self):
        return -180.0 + (np.arange(self.n_lon) + 0.5) * 360.0 / self.n_lon

    @property
    def lat_deg(self):
        return -90.0 + (np.arange(self.n_lat) + 0.5) * 180.0 / self.n_lat

    def mesh(self):
        """Longitude and latitude of every pixel centre, each of shape (n_lat, n_lon)."""
        lon, lat = np.meshgrid(self.lon_deg, self.lat_deg)
        return lon, lat

    def weights(self):
        _, lat = self.mesh()
        w = np.cos(np.radians(lat))
        return w / w.sum()

    def directions(self):
        """Unit vectors of pixel centres, shape (n_lat, n_lon, 3)."""
        lon, lat = (np.radians(a) for a in self.mesh())
        return np.stack(
            [np.cos(lat) * np.cos(lon), np.cos(lat) * np.sin(lon), np.sin(lat)], axis=-1
        )


@dataclass(frozen=True)
class AbsorberMap:
    grid: SkyGrid
    z_values: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z_values, dtype=float)
        if z.shape != self.grid.shape:
            raise InvalidInputError(f"z map shape {z.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(z)) or np.any(z < 0) or np.any(z >= 1):
            raise InvalidInputError("every z must satisfy 0 <= z < 1")
        object.__setattr__(self, "z_values", z)


@dataclass(frozen=True)
class TemperatureMap:
    grid: SkyGrid
    t_values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t_values, dtype=float)
        if t.shape != self.grid.shape:
            raise InvalidInputError(f"map shape {t.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(t)) or np.any(t <= 0):
            raise InvalidInputError("every temperature must be finite and > 0")
        object.__setattr__(self, "t_values", t)


@dataclass(frozen=True)
class DipoleFit:
    monopole: float  # [K]
    dipole_vector: np.ndarray  # [K], Cartesian
    rms_residual: float  # [K]

    @property
    def amplitude(self):
        return float(np.linalg.norm(self.dipole_vector))


@dataclass(frozen=True)
class MapStatistics:
    mean: float
    rms: float
    min: float
    max: float


def absorber_map_from_function(grid, func):
    """Build an AbsorberMap by evaluating ``func(n_hat)`` on pixel-centre unit vectors."""
    n = grid.directions()
    return AbsorberMap(grid, np.asarray(func(n[..., 0], n[..., 1], n[..., 2]), dtype=float))


def apparent_temperature_map(T, zmap):
    """
    Peak-method apparent temperature in every pixel of ``zmap``.

    Each distinct z value is solved once.
    """
    T = check_temperature(T)
    uniq, inverse = np.unique(zmap.z_values, return_inverse=True)
    t_uniq = np.array([apparent_temperature_peak(T, z).t_apparent for z in uniq])
    return TemperatureMap(zmap.grid, t_uniq[inverse].reshape(zmap.grid.shape))


def map_statistics(tmap):
    """Solid-angle-weighted mean and rms about it, plus exact min and max."""
    w = tmap.grid.weights()
    t = tmap.t_values
    mean = float(np.sum(w * t))
    rms = float(np.sqrt(np.sum(w * (t - mean) ** 2)))
    return MapStatistics(mean=mean, rms=rms, min=float(t.min()), max=float(t.max()))


def dipole_fit(tmap):
    """
    Weighted least-squares fit ``t ~ m + d . n_hat`` over all pixels.

    Solves the 4x4 normal equations. A grid whose pixel directions are
    coplanar (or too few pixels) gives a singular system and raises
    InvalidInputError.
    """
    grid = tmap.grid
    w = grid.weights().ravel()
    n = grid.directions().reshape(-1, 3)
    t = tmap.t_values.ravel()
    X = np.column_stack([np.ones_like(t), n])
    normal = X.T @ (w[:, None] * X)
    rhs = X.T @ (w * t)
    s = np.linalg.svd(normal, compute_uv=False)
    if s[-1] <= 1e-12 * s[0]:
        raise InvalidInputError(f"degenerate sky grid {grid.n_lon}x{grid.n_lat}: singular normal matrix")
    coef = np.linalg.solve(normal, rhs)
    resid = t - X @ coef
    return DipoleFit(
        monopole=float(coef[0]),
        dipole_vector=coef[1:].copy(),
        rms_residual=float(np.sqrt(np.sum(w * resid**2))),
    )


def doppler_dipole_map(T0, beta, axis=(0.0, 0.0, 1.0), grid=None):
    """First-order kinematic dipole ``T0 (1 + beta axis.n_hat)`` for comparison."""
    T0 = check_temperature(T0)
    grid = grid or SkyGrid()
    if not (math.isfinite(beta) and 0.0 <= beta < 0.1):
        raise InvalidInputError(f"beta must satisfy 0 <= beta < 0.1, got {beta}")
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,) or not abs(np.linalg.norm(axis) - 1.0) <= 1e-9:
        raise InvalidInputError(f"axis must be a unit 3-vector, got {axis.tolist()}")
    cos_theta = grid.directions() @ axis
    return TemperatureMap(grid, T0 * (1.0 + beta * cos_theta))


def _fmt(x):
    return format(float(x), ".17g")


def _match_index(values, centres, label):
    if len(centres) > 1:
        idx = np.rint((values - centres[0]) / (centres[1] - centres[0])).astype(int)
    else:
        idx = np.zeros(len(values), dtype=int)
    in_range = (idx >= 0) & (idx < len(centres))
    off = np.abs(centres[np.clip(idx, 0, len(centres) - 1)] - values)
    if not np.all(in_range) or np.any(off > COORD_TOL_DEG):
        raise InvalidInputError(f"{label} values do not match pixel centres of the declared grid")
    return idx


def read_absorber_csv(path, grid=None):
    """
    Read an AbsorberMap from CSV with header ``lon_deg,lat_deg,z``.

    Rows may come in any order but must tile the grid exactly once. When
    ``grid`` is omitted it is inferred from the distinct coordinates.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["lon_deg", "lat_deg", "z"]:
            raise InvalidInputError(f"{path}: expected header lon_deg,lat_deg,z, got {header}")
        try:
            rows = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
        except ValueError as exc:
            raise InvalidInputError(f"{path}: non-numeric entry ({exc})") from exc
    if rows.ndim != 2 or rows.shape[1] != 3:
        raise InvalidInputError(f"{path}: expected three columns per row")
    if grid is None:
        n_lon = len(np.unique(np.round(rows[:, 0], 6)))
        n_lat = len(np.unique(np.round(rows[:, 1], 6)))
        grid = SkyGrid(n_lon, n_lat)
    if len(rows) != grid.n_lon * grid.n_lat:
        raise InvalidInputError(f"{path}: {len(rows)} rows do not tile a {grid.n_lon}x{grid.n_lat} grid")
    i = _match_index(rows[:, 0], grid.lon_deg, "longitude")
    j = _match_index(rows[:, 1], grid.lat_deg, "latitude")
    z = np.full(grid.shape, np.nan)
    seen = np.zeros(grid.shape, dtype=bool)
    for jj, ii, zz in zip(j, i, rows[:, 2]):
        if seen[jj, ii]:
            raise InvalidInputError(f"{path}: pixel ({grid.lon_deg[ii]}, {grid.lat_deg[jj]}) listed twice")
        seen[jj, ii] = True
        z[jj, ii] = check_z(zz)
    return AbsorberMap(grid, z)


def _write_rows(fh, header, columns):
    fh.write(",".join(header) + "\n")
    for row in zip(*columns):
        fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_absorber_csv(fh, zmap):
    lon, lat = zmap.grid.mesh()
    _write_rows(fh, ["lon_deg", "lat_deg", "z"], [lon.ravel(), lat.ravel(), zmap.z_values.ravel()])


def write_temperature_csv(fh, zmap, tmap):
    """Write ``lon_deg,lat_deg,z,t_app_k`` rows, latitude-major."""
    lon, lat = zmap.grid.mesh()
    _write_rows(
        fh,
        ["lon_deg", "lat_deg", "z", "t_app_k"],
        [lon.ravel(), lat.ravel(), zmap.z_values.ravel(), tmap.t_values.ravel()],
    )
