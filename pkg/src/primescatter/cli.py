"""
Command-line entry point.

    primescatter lattice   --kind chi --atoms 1000 --out lattice.csv
    primescatter scatter   --lattice chi --atoms 100000 --weights guinand-weil --out spec.csv
    primescatter peaks     --in spec.csv --out peaks.csv
    primescatter match     --in spec.csv --zeros bundled --tolerance 0.05 --out peaks.csv
    primescatter sweep     --sizes 1000,10000,100000 --out sweep.json
    primescatter psi-check --x-max 50 --zero-counts 10,100 --out psi.json

Exit status: 0 success, 2 usage error, 3 I/O error, 4 numeric or fit failure.
"""
from __future__ import annotations

import argparse
import contextlib
import math
import sys

import numpy as np

from . import __version__
from ._accel import backend
from .analysis import PipelineConfig, analyze_power, growth_sweep
from .errors import DomainError, FitError, ParseError
from .lattice import WeightScheme, chi_lattice, emit_positions, integer_lattice, prime_lattice, shifted_prime_lattice
from .numtheory import chebyshev_psi, sieve
from .serialize import PEAK_COLUMNS, dumps_json, peaks_rows, read_csv_columns, write_csv
from .spectrum import KGrid, detrend, nudft
from .zeros import bundled_zeros, psi_explicit, read_zero_file

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

LATTICES = {
    "integer": lambda n, scheme: integer_lattice(n),
    "prime": lambda n, scheme: prime_lattice(n),
    "chi": chi_lattice,
    "shifted": lambda n, scheme: shifted_prime_lattice(n),
}


class InputError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(t)) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _scheme(text: str) -> WeightScheme:
    try:
        return WeightScheme.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_output(p):
    p.add_argument("--out", default="-", help="output path, '-' for stdout (default)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_pipeline(p):
    p.add_argument("--in", dest="infile", required=True, help="spectrum CSV with k,power columns")
    p.add_argument("--window", type=int, default=101, help="detrend window in samples (odd)")
    p.add_argument("--prominence", type=float, default=0.02, help="min prominence as a fraction of the tallest sample")
    p.add_argument("--separation", type=float, default=0.2, help="min peak separation in k")
    p.add_argument("--mode", choices=("resonance", "residual"), default="resonance")
    p.add_argument("--no-fit", action="store_true", help="skip Lorentzian refinement")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="primescatter", description="Scattering spectra of prime lattices.")
    parser.add_argument("--version", action="version", version=f"primescatter {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lattice", help="write atom positions")
    p.add_argument("--kind", choices=sorted(LATTICES), default="chi")
    p.add_argument("--atoms", type=int, default=100_000)
    p.add_argument("--weights", type=_scheme, default=WeightScheme.UNIFORM)
    _add_output(p)

    p = sub.add_parser("scatter", help="power spectrum of a lattice")
    p.add_argument("--lattice", choices=sorted(LATTICES), default="chi")
    p.add_argument("--atoms", type=int, default=100_000)
    p.add_argument("--weights", type=_scheme, default=WeightScheme.UNIFORM)
    p.add_argument("--kmin", type=float, default=0.0)
    p.add_argument("--kmax", type=float, default=8.0)
    p.add_argument("--samples", type=int, default=8001)
    p.add_argument("--detrend", type=int, default=None, metavar="WINDOW", help="add baseline,residual columns")
    p.add_argument("--mark-zeros", action="store_true", help="add a zero_marker column (1 at the sample nearest each gamma/2pi)")
    p.add_argument("--zeros", default="bundled")
    _add_output(p)

    p = sub.add_parser("peaks", help="detect and fit spectral peaks")
    _add_pipeline(p)
    _add_output(p)

    p = sub.add_parser("match", help="detect peaks and match them to zeta zeros")
    _add_pipeline(p)
    p.add_argument("--zeros", default="bundled")
    p.add_argument("--tolerance", type=float, default=0.05)
    _add_output(p)

    p = sub.add_parser("sweep", help="peak growth across lattice sizes")
    p.add_argument("--sizes", type=_int_list, default=[1000, 10000, 100000])
    p.add_argument("--weights", type=_scheme, default=WeightScheme.GUINAND_WEIL)
    p.add_argument("--kmin", type=float, default=1.5)
    p.add_argument("--kmax", type=float, default=8.0)
    p.add_argument("--samples", type=int, default=6501)
    p.add_argument("--window", type=int, default=None, help="fixed detrend window in samples (overrides --window-scale)")
    p.add_argument("--window-scale", type=float, default=2.0, help="detrend window width in k times log p_L")
    p.add_argument("--prominence", type=float, default=0.02)
    p.add_argument("--separation", type=float, default=0.2)
    p.add_argument("--mode", choices=("resonance", "residual"), default="resonance")
    p.add_argument("--zeros", default="bundled")
    p.add_argument("--tolerance", type=float, default=0.05)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="json")

    p = sub.add_parser("psi-check", help="explicit-formula reconstruction of Chebyshev psi")
    p.add_argument("--x-max", type=float, default=50.0)
    p.add_argument("--zero-counts", type=_int_list, default=[10, 100])
    p.add_argument("--zeros", default="bundled")
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    return parser


def _config(args) -> dict:
    cfg = {}
    for key, val in sorted(vars(args).items()):
        if key in ("out",):
            continue
        if isinstance(val, WeightScheme):
            val = val.value
        cfg[key] = val
    cfg["version"] = __version__
    cfg["backend"] = backend()
    return cfg


def _zeros(spec: str):
    if spec == "bundled":
        return bundled_zeros()
    try:
        return read_zero_file(spec)
    except OSError as exc:
        raise InputError(f"cannot read zero table {spec}: {exc}") from exc


@contextlib.contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc
    with fh:
        yield fh


def _read_spectrum(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            cols = read_csv_columns(fh, required=("k", "power"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return cols["k"], cols["power"]


def _pipeline_config(args) -> PipelineConfig:
    return PipelineConfig(
        window_samples=args.window,
        rel_prominence=args.prominence,
        min_separation_k=args.separation,
        tolerance_k=getattr(args, "tolerance", 0.05),
        fit=not getattr(args, "no_fit", False),
        mode=args.mode,
    )


def cmd_lattice(args) -> None:
    m = LATTICES[args.kind](args.atoms, args.weights)
    with _open_out(args.out) as fh:
        if args.format == "json":
            fh.write(dumps_json({"label": m.label, "atom_count": len(m), "positions": m.positions, "weights": m.weights, "config": _config(args)}))
        else:
            write_csv(fh, ["index", "position", "weight"], emit_positions(m), _config(args))


def cmd_scatter(args) -> None:
    m = LATTICES[args.lattice](args.atoms, args.weights)
    grid = KGrid(args.kmin, args.kmax, args.samples)
    spec = nudft(m, grid)
    k, power = spec.k, spec.power
    columns = ["k", "power"]
    data = [k, power]
    if args.detrend is not None:
        det = detrend(k, power, args.detrend)
        columns += ["baseline", "residual"]
        data += [det.baseline, det.residual]
    if args.mark_zeros:
        marker = np.zeros(k.size, dtype=int)
        for kz in _zeros(args.zeros).k_positions:
            if grid.k_min <= kz <= grid.k_max:
                marker[int(np.argmin(np.abs(k - kz)))] = 1
        columns.append("zero_marker")
        data.append(marker)
    with _open_out(args.out) as fh:
        if args.format == "json":
            doc = {
                "label": spec.source_label,
                "atom_count": spec.atom_count,
                "k_min": grid.k_min,
                "k_max": grid.k_max,
                "samples": grid.samples,
                "power": power,
                "config": _config(args),
            }
            for name, col in zip(columns[2:], data[2:]):
                doc[name] = col
            fh.write(dumps_json(doc))
        else:
            write_csv(fh, columns, zip(*data), _config(args))


def _write_peaks(args, result) -> None:
    with _open_out(args.out) as fh:
        if args.format == "json":
            doc = {
                "peaks": [dict(zip(PEAK_COLUMNS, row)) for row in peaks_rows(result.peaks)],
                "fit_failures": result.fit_failures,
                "config": _config(args),
            }
            if result.match is not None:
                doc.update(matched=result.match.matched, spurious=result.match.spurious, missed=result.match.missed, missed_gammas=result.match.missed_gammas)
            fh.write(dumps_json(doc))
        else:
            write_csv(fh, PEAK_COLUMNS, peaks_rows(result.peaks), _config(args))


def cmd_peaks(args) -> None:
    k, power = _read_spectrum(args.infile)
    _write_peaks(args, analyze_power(k, power, _pipeline_config(args)))


def cmd_match(args) -> None:
    k, power = _read_spectrum(args.infile)
    zeros = _zeros(args.zeros)
    _write_peaks(args, analyze_power(k, power, _pipeline_config(args), zeros))


def cmd_sweep(args) -> None:
    grid = KGrid(args.kmin, args.kmax, args.samples)
    scale = None if args.window is not None else args.window_scale
    if args.window is None:
        args.window = 101
    report = growth_sweep(args.sizes, args.weights, grid, _zeros(args.zeros), args.tolerance, _pipeline_config(args), scale)
    with _open_out(args.out) as fh:
        if args.format == "json":
            doc = report.to_json()
            doc["config"] = _config(args)
            fh.write(dumps_json(doc))
        else:
            rows = [[g, L, h, w] for g, t in report.trajectories.items() for L, h, w in t]
            write_csv(fh, ["gamma", "atoms", "height", "hwhm"], rows, _config(args))


def prime_power_midpoints(x_max: float) -> np.ndarray:
    """Midpoints between consecutive prime powers in [2, x_max]."""
    n = math.floor(x_max)
    powers = set()
    for p in sieve(n).tolist():
        q = p
        while q <= n:
            powers.add(q)
            q *= p
    pp = np.array(sorted(powers), dtype=np.float64)
    return 0.5 * (pp[:-1] + pp[1:])


def psi_check(x_max: float, counts, zeros) -> dict:
    xs = prime_power_midpoints(x_max)
    if xs.size == 0:
        raise DomainError("x_max must leave at least two prime powers in [2, x_max]")
    exact = np.array([chebyshev_psi(x) for x in xs])
    out = {"x_max": x_max, "midpoints": xs, "psi": exact, "zero_counts": list(counts), "rms": {}, "max_abs": {}, "reconstruction": {}}
    for c in counts:
        approx = np.array([psi_explicit(x, zeros, c) for x in xs])
        err = approx - exact
        out["rms"][str(c)] = float(np.sqrt(np.mean(err**2)))
        out["max_abs"][str(c)] = float(np.max(np.abs(err)))
        out["reconstruction"][str(c)] = approx
    return out


def cmd_psi_check(args) -> None:
    res = psi_check(args.x_max, args.zero_counts, _zeros(args.zeros))
    with _open_out(args.out) as fh:
        if args.format == "json":
            res["config"] = _config(args)
            fh.write(dumps_json(res))
        else:
            cols = ["x", "psi"] + [f"psi_explicit_{c}" for c in args.zero_counts]
            data = [res["midpoints"], res["psi"]] + [res["reconstruction"][str(c)] for c in args.zero_counts]
            write_csv(fh, cols, zip(*data), _config(args))


COMMANDS = {
    "lattice": cmd_lattice,
    "scatter": cmd_scatter,
    "peaks": cmd_peaks,
    "match": cmd_match,
    "sweep": cmd_sweep,
    "psi-check": cmd_psi_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (InputError, ParseError) as exc:
        print(f"primescatter: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DomainError as exc:
        print(f"primescatter: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FitError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"primescatter: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
