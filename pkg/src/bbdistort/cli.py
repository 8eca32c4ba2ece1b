"""Command-line front end.

Usage examples:
  bbdistort spectrum --temp-k 2.728 --z 0.05 --u-min 0.05 --u-max 12 --points 1200 --out fig1.csv
  bbdistort estimate --temp-k 2.728 --z 0.05 --method fit --window 0.5,8
  bbdistort sweep --temp-k 2.728 --z-list 0.01,0.02,0.05,0.1 --out sweep.csv
  bbdistort skymap --temp-k 2.728 --zmap zmap.csv --out-map tmap.csv --out-stats stats.json
  bbdistort coherence --flux-per-cm2-s 1e11 --absorber-per-cc 1e-4 --nu-ghz 160.38 --delta-t-ps 0.1

Exit codes: 0 success, 2 invalid input, 3 numerical failure. Tables go to CSV
(17 significant digits), scalar results to JSON. Every output file is
written to a temporary sibling and renamed into place.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .anisotropy import (
    SkyGrid,
    apparent_temperature_map,
    dipole_fit,
    map_statistics,
    read_absorber_csv,
    write_temperature_csv,
)
from .coherence import (
    DEFAULT_GAP_LIMIT,
    DEFAULT_RATIO_THRESHOLD,
    assess,
    band_photon_density,
    flux_to_density,
    ionospheric_helium_density,
)
from .constants import GHZ, H, INVERSE_CM_HZ, K_B
from .distortion import DEFAULT_GRID, FrequencyGrid, SpectrumTable, check_z, tabulate
from .errors import InvalidInputError, NumericalFailureError
from .estimator import (
    DEFAULT_WINDOW,
    apparent_temperature_fit,
    apparent_temperature_peak,
    argmax_f,
    sweep,
)
from .spectrum import check_temperature, planck_dimensionless, u_from_frequency, wien_peak_u

GENERATED_BY = f"bbdistort {__version__}"
UNIT_TO_HZ = {"hz": 1.0, "ghz": GHZ, "inverse_cm": INVERSE_CM_HZ}
SPECTRUM_HEADER = ["u", "nu_hz", "e_over_a", "f_over_a", "g_over_a"]
SWEEP_HEADER = ["z", "t_apparent_k", "delta_t_k", "ratio", "ratio_over_z"]

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


class UsageError(InvalidInputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def to_hz(value, unit):
    if unit not in UNIT_TO_HZ:
        raise InvalidInputError(f"unknown frequency unit {unit!r}")
    return float(value) * UNIT_TO_HZ[unit]


def _fmt(x):
    return format(float(x), ".17g")


def _float_pair(text):
    items = text if isinstance(text, (list, tuple)) else str(text).split(",")
    try:
        lo, hi = (float(v) for v in items)
    except ValueError as exc:
        raise InvalidInputError(f"expected two comma-separated numbers, got {text!r}") from exc
    return lo, hi


def _float_list(text):
    if isinstance(text, (list, tuple)):
        items = text
    else:
        items = [v for v in str(text).split(",") if v.strip()]
    try:
        values = [float(v) for v in items]
    except ValueError as exc:
        raise InvalidInputError(f"expected comma-separated numbers, got {text!r}") from exc
    if not values:
        raise InvalidInputError("empty list")
    return values


def _json_number(x):
    return float(x) if math.isfinite(x) else None


def write_atomic(path, text):
    """Write ``text`` to ``path`` via a temporary file in the same directory."""
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def spectrum_csv(table):
    buf = io.StringIO()
    buf.write(",".join(SPECTRUM_HEADER) + "\n")
    for row in table.rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def read_spectrum_csv(path):
    """
    Rebuild a SpectrumTable from ``spectrum`` output.

    Temperature is recovered from ``h nu / (k u)`` and z from the loss column.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SPECTRUM_HEADER:
            raise InvalidInputError(f"{path}: expected header {','.join(SPECTRUM_HEADER)}")
        try:
            data = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
        except ValueError as exc:
            raise InvalidInputError(f"{path}: non-numeric entry ({exc})") from exc
    if data.ndim != 2 or data.shape[0] < 2 or data.shape[1] != 5:
        raise InvalidInputError(f"{path}: need at least two rows of five columns")
    u, nu, e, f_loss, g = data.T
    T = check_temperature(float(np.median(H * nu / (K_B * u))))
    half = planck_dimensionless(u / 2.0)
    usable = half > 0
    z = float(np.median(f_loss[usable] / half[usable])) if usable.any() else 0.0
    return SpectrumTable(temperature=T, z=check_z(z), u=u, nu=nu, e=e, f_loss=f_loss, g=g)


def _grid_from_args(args):
    if args.nu_min is not None or args.nu_max is not None:
        if args.nu_min is None or args.nu_max is None:
            raise InvalidInputError("--nu-min and --nu-max must be given together")
        T = check_temperature(args.temp_k)
        u_lo = u_from_frequency(T, to_hz(args.nu_min, args.unit))
        u_hi = u_from_frequency(T, to_hz(args.nu_max, args.unit))
        return FrequencyGrid(u_lo, u_hi, int(args.points))
    return FrequencyGrid(float(args.u_min), float(args.u_max), int(args.points))


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise InvalidInputError(f"--{name.replace('_', '-')} is required")


def cmd_spectrum(args):
    _require(args, "temp_k")
    table = tabulate(args.temp_k, args.z, _grid_from_args(args))
    write_atomic(args.out, spectrum_csv(table))


def _estimate_record(at):
    return {
        "t_true_k": at.t_true,
        "z": at.z,
        "t_apparent_k": at.t_apparent,
        "delta_t_k": at.delta_t,
        "ratio": at.ratio,
        "method": at.method,
    }


def cmd_estimate(args):
    if args.from_csv:
        table = read_spectrum_csv(args.from_csv)
        method = "fit" if args.method is None else args.method
        if method != "fit":
            raise InvalidInputError("--from-csv supports --method fit only")
    else:
        _require(args, "temp_k")
        method = args.method or "peak"
        table = None
    if method == "peak":
        at = apparent_temperature_peak(args.temp_k, args.z)
        record = _estimate_record(at)
        record.update(u_peak=argmax_f(at.z), u_wien=wien_peak_u())
    elif method == "fit":
        if table is None:
            table = tabulate(args.temp_k, args.z, _grid_from_args(args))
        window = _float_pair(args.window) if args.window else DEFAULT_WINDOW
        fit = apparent_temperature_fit(table, window)
        t_true = table.temperature
        record = {
            "t_true_k": t_true,
            "z": table.z,
            "t_apparent_k": fit.t_fit,
            "delta_t_k": fit.t_fit - t_true,
            "ratio": (fit.t_fit - t_true) / t_true,
            "method": "fit",
            "amplitude_fit": fit.amplitude_fit,
            "rms_residual": fit.rms_residual,
            "window": list(fit.window),
            "iterations": fit.iterations,
        }
    else:
        raise InvalidInputError(f"unknown method {method!r}")
    record["generated_by"] = GENERATED_BY
    write_atomic(args.out, dump_json(record))


def cmd_sweep(args):
    _require(args, "temp_k", "z_list")
    z_values = [check_z(z) for z in _float_list(args.z_list)]
    method = args.method or "peak"
    window = _float_pair(args.window) if args.window else DEFAULT_WINDOW
    results = sweep(args.temp_k, z_values, method=method, grid=_grid_from_args(args), window=window)
    buf = io.StringIO()
    buf.write(",".join(SWEEP_HEADER) + "\n")
    for at in results:
        ratio_over_z = at.ratio / at.z if at.z > 0 else math.nan
        buf.write(",".join(_fmt(v) for v in (at.z, at.t_apparent, at.delta_t, at.ratio, ratio_over_z)) + "\n")
    write_atomic(args.out, buf.getvalue())


def cmd_skymap(args):
    _require(args, "temp_k", "zmap")
    grid = None
    if args.n_lon is not None or args.n_lat is not None:
        grid = SkyGrid(int(args.n_lon or 0), int(args.n_lat or 0))
    zmap = read_absorber_csv(args.zmap, grid)
    tmap = apparent_temperature_map(args.temp_k, zmap)
    stats = map_statistics(tmap)
    fit = dipole_fit(tmap)
    if args.out_map:
        buf = io.StringIO()
        write_temperature_csv(buf, zmap, tmap)
        write_atomic(args.out_map, buf.getvalue())
    record = {
        "mean_k": stats.mean,
        "rms_k": stats.rms,
        "min_k": stats.min,
        "max_k": stats.max,
        "monopole_k": fit.monopole,
        "dipole_k": [float(v) for v in fit.dipole_vector],
        "dipole_amplitude_k": fit.amplitude,
        "rms_residual_k": fit.rms_residual,
        "generated_by": GENERATED_BY,
    }
    write_atomic(args.out_stats, dump_json(record))


def cmd_coherence(args):
    if args.flux_per_cm2_s is not None:
        if args.band_ghz is not None:
            raise InvalidInputError("give either --flux-per-cm2-s or --temp-k with --band-ghz, not both")
        photon = flux_to_density(args.flux_per_cm2_s)
        photon_source = {"flux_per_cm2_s": float(args.flux_per_cm2_s)}
    elif args.band_ghz is not None:
        _require(args, "temp_k")
        lo, hi = _float_pair(args.band_ghz)
        photon = band_photon_density(args.temp_k, lo * GHZ, hi * GHZ)
        photon_source = {"temp_k": float(args.temp_k), "band_ghz": [lo, hi]}
    else:
        raise InvalidInputError("need --flux-per-cm2-s or --temp-k with --band-ghz")
    _require(args, "nu_ghz", "delta_t_ps")
    record = {}
    if args.absorber_per_cc is None:
        estimate = ionospheric_helium_density()
        absorber = estimate.density
        record["absorber_source"] = "helium_scenario"
        record["absorber_assumptions"] = estimate.assumptions
        record["absorber_steps"] = estimate.steps
    else:
        absorber = float(args.absorber_per_cc)
        record["absorber_source"] = "given"
    result = assess(
        photon,
        absorber,
        to_hz(args.nu_ghz, "ghz"),
        float(args.delta_t_ps) * 1e-12,
        ratio_threshold=float(args.ratio_threshold),
        gap_limit=float(args.gap_limit_rad),
    )
    record.update(
        photon_density_per_cc=result.photon_density,
        photon_source=photon_source,
        absorber_density_per_cc=result.absorber_density,
        ratio=_json_number(result.ratio),
        phase_gap_rad=result.phase_gap,
        satisfied=result.satisfied,
        no_absorber=result.no_absorber,
        ratio_threshold=result.ratio_threshold,
        gap_limit_rad=result.gap_limit,
        generated_by=GENERATED_BY,
    )
    write_atomic(args.out, dump_json(record))


def _add_grid_flags(p):
    p.add_argument("--u-min", type=float, default=DEFAULT_GRID.u_min)
    p.add_argument("--u-max", type=float, default=DEFAULT_GRID.u_max)
    p.add_argument("--points", type=int, default=DEFAULT_GRID.points)
    p.add_argument("--nu-min", type=float, help="lower grid frequency in --unit (overrides --u-min)")
    p.add_argument("--nu-max", type=float, help="upper grid frequency in --unit (overrides --u-max)")
    p.add_argument("--unit", choices=sorted(UNIT_TO_HZ), default="hz")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file of flag values; explicit flags win")

    parser = _Parser(prog="bbdistort", description="Blackbody spectra behind a two-photon absorber.")
    parser.add_argument("--version", action="version", version=GENERATED_BY)
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    p = sub.add_parser("spectrum", parents=[common], help="tabulate E/A, F/A, G/A")
    p.add_argument("--temp-k", type=float)
    p.add_argument("--z", type=float, default=0.0)
    _add_grid_flags(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("estimate", parents=[common], help="apparent temperature (JSON)")
    p.add_argument("--temp-k", type=float)
    p.add_argument("--z", type=float, default=0.0)
    p.add_argument("--method", choices=["peak", "fit"])
    p.add_argument("--window", help="u_lo,u_hi for the fit method")
    p.add_argument("--from-csv", help="fit a table written by 'spectrum'")
    _add_grid_flags(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sweep", parents=[common], help="apparent temperature over a list of z")
    p.add_argument("--temp-k", type=float)
    p.add_argument("--z-list")
    p.add_argument("--method", choices=["peak", "fit"])
    p.add_argument("--window")
    _add_grid_flags(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("skymap", parents=[common], help="apparent-temperature sky map")
    p.add_argument("--temp-k", type=float)
    p.add_argument("--zmap")
    p.add_argument("--n-lon", type=int)
    p.add_argument("--n-lat", type=int)
    p.add_argument("--out-map")
    p.add_argument("--out-stats", default="-")
    p.set_defaults(func=cmd_skymap)

    p = sub.add_parser("coherence", parents=[common], help="photon vs absorber density criterion")
    p.add_argument("--flux-per-cm2-s", type=float)
    p.add_argument("--temp-k", type=float)
    p.add_argument("--band-ghz")
    p.add_argument("--absorber-per-cc", type=float,
                   help="absorber density; defaults to the ionospheric helium estimate")
    p.add_argument("--nu-ghz", type=float)
    p.add_argument("--delta-t-ps", type=float)
    p.add_argument("--ratio-threshold", type=float, default=DEFAULT_RATIO_THRESHOLD)
    p.add_argument("--gap-limit-rad", type=float, default=DEFAULT_GAP_LIMIT)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_coherence)

    return parser, sub


def parse_args(argv):
    """Parse ``argv``, merging a ``--config`` JSON object under the explicit flags."""
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand is None:
        raise UsageError("a subcommand is required")
    if args.config:
        with open(args.config) as fh:
            try:
                config = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidInputError(f"{args.config}: invalid JSON ({exc.msg})") from exc
        if not isinstance(config, dict):
            raise InvalidInputError(f"{args.config}: config must be a JSON object")
        subparser = sub.choices[args.subcommand]
        known = {a.dest for a in subparser._actions} - {"help", "config", "func"}
        defaults = {}
        for key, value in config.items():
            dest = key.replace("-", "_")
            if dest not in known:
                raise InvalidInputError(f"{args.config}: unknown key {key!r}")
            defaults[dest] = value
        subparser.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def run(argv=None):
    """Execute one command; returns the process exit code."""
    try:
        args = parse_args(sys.argv[1:] if argv is None else list(argv))
        args.func(args)
    except NumericalFailureError as exc:
        print(f"bbdistort: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InvalidInputError, OSError, TypeError, ValueError) as exc:
        print(f"bbdistort: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def main():
    raise SystemExit(run())


if __name__ == "__main__":
    main()
