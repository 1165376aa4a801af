"""Command-line front end.

    dqpt critical  --model ssh --gi 1.5 --gf 0.5 --L 20 --n 2 --format json
    dqpt rate      --model ssh --gi 1.5 --gf 0.5 --L 20 --flux 0.783pi --tmax 10
    dqpt flux-scan --model creutz --thi 0.4 --thf -0.4 --L 20 --tmax 3 --peak largest
    dqpt scaling   --model ssh --gi 1.5 --gf 0.5 --sizes 40,60,100,1100 --tmax 4
    dqpt thermo    --model ssh --gi 1.5 --gf 0.5 --tmax 10
    dqpt ed        --L 5 --U 0.1 --j2i 0.2 --j2f 2 --flux 1.4111 --tmax 5

Angles accept radians (``1.4111``) or multiples of pi (``0.783pi``, ``pi``).
Results go to ``--output`` if given (the one-line summary then goes to
stdout), otherwise the data goes to stdout and the summary to stderr.
``--config file.json`` supplies defaults for any flag by its long name.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys

import numpy as np

from . import critical as crit
from .band_models import Quench
from .ed import EDQuench, ed_rate_function
from .errors import DqptError
from .loschmidt import lambda_max_vs_flux, local_maxima, make_grid, rate_function, size_sweep
from .serialize import dumps_json, write_series, write_table
from .thermo import thermo_series

MODELS = ("ssh", "creutz", "longrange", "qwz")

# built-in values for options left unset on the command line and in --config
DEFAULTS = {
    "format": "csv",
    "output": None,
    "L": 20,
    "Lx": 12,
    "Ly": 12,
    "flux": 0.0,
    "jv": 0.5,
    "alpha": 1.0,
    "j1": 1.0,
    "j3": 0.0,
    "j4": 0.0,
    "U": 0.0,
    "tmax": 10.0,
    "dt": None,
    "n_steps": None,
    "n": 2,
    "flux_min": 0.0,
    "flux_max": math.pi,
    "flux_steps": 101,
    "peak": "first",
    "sizes": "40,60,100,200,400,600,800,1100",
    "with_le": False,
}

_PI_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*\*?\s*pi\s*$", re.IGNORECASE)


def parse_angle(text) -> float:
    """Angle in radians from ``'1.4111'``, ``'0.783pi'``, ``'pi'`` or ``'-0.4pi'``."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _PI_RE.match(str(text))
    if m:
        coeff = m.group(1)
        return (float(coeff) if coeff not in (None, "", "+") else -1.0 if coeff == "-" else 1.0) * math.pi
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def _int_list(text):
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None


def _model_args(p):
    g = p.add_argument_group("model")
    g.add_argument("--model", choices=MODELS)
    g.add_argument("--gi", type=float, help="SSH: initial J2/J1")
    g.add_argument("--gf", type=float, help="SSH: final J2/J1")
    g.add_argument("--thi", type=parse_angle, help="Creutz: initial plaquette flux")
    g.add_argument("--thf", type=parse_angle, help="Creutz: final plaquette flux")
    g.add_argument("--jv", type=float, help="Creutz: J_v/2J (default 0.5)")
    g.add_argument("--j2i", type=float, help="long-range SSH / ED: initial J2")
    g.add_argument("--j2f", type=float, help="long-range SSH / ED: final J2")
    g.add_argument("--alpha", type=float, help="long-range SSH: decay rate (default 1)")
    g.add_argument("--j1", type=float, help="long-range SSH / ED: J1 (default 1)")
    g.add_argument("--j3", type=float, help="long-range SSH: J3 (default 0)")
    g.add_argument("--j4", type=float, help="long-range SSH: J4 (default 0)")
    g.add_argument("--mui", type=float, help="QWZ: initial mu")
    g.add_argument("--muf", type=float, help="QWZ: final mu")


def _size_args(p):
    p.add_argument("--L", type=int, help="number of unit cells (default 20)")
    p.add_argument("--Lx", type=int, help="QWZ: cells along x (default 12)")
    p.add_argument("--Ly", type=int, help="QWZ: cells along y (default 12)")
    p.add_argument("--axis", choices=("x", "y", "both", "either"),
                   help="QWZ: twisted direction; 'critical' lists x- and y-twist "
                        "pairs by default, the other commands twist along x")


def _time_args(p):
    p.add_argument("--tmax", type=float, help="end of the time window (default 10)")
    p.add_argument("--dt", type=float, help="time step")
    p.add_argument("--n-steps", dest="n_steps", type=int, help="number of time steps")


def _output_args(p):
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--output", "-o", help="output file (default: stdout)")
    p.add_argument("--config", help="JSON file with default flag values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dqpt",
        description="Loschmidt echoes and rate-function singularities of quenched "
                    "two-band lattice models under twisted boundary conditions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", help="finite-size rate function lambda(t)")
    _model_args(p), _size_args(p), _time_args(p), _output_args(p)
    p.add_argument("--flux", type=parse_angle, help="twist flux (default 0)")
    p.add_argument("--with-le", dest="with_le", action="store_const", const=True,
                   help="also write the echo L(t)")

    p = sub.add_parser("critical", help="critical momenta, fluxes and times")
    _model_args(p), _size_args(p), _output_args(p)
    p.add_argument("--n", type=int, help="number of critical times per pair (default 2)")

    p = sub.add_parser("flux-scan", help="peak height lambda_max versus flux")
    _model_args(p), _size_args(p), _time_args(p), _output_args(p)
    p.add_argument("--flux-min", dest="flux_min", type=parse_angle)
    p.add_argument("--flux-max", dest="flux_max", type=parse_angle)
    p.add_argument("--flux-steps", dest="flux_steps", type=int)
    p.add_argument("--peak", choices=("first", "largest"))

    p = sub.add_parser("scaling", help="first peak time and height versus size")
    _model_args(p), _time_args(p), _output_args(p)
    p.add_argument("--sizes", type=_int_list, help="comma-separated sizes")
    p.add_argument("--flux", type=parse_angle)

    p = sub.add_parser("thermo", help="infinite-size rate function")
    _model_args(p), _time_args(p), _output_args(p)

    p = sub.add_parser("ed", help="interacting SSH ring by exact diagonalization")
    _time_args(p), _output_args(p)
    p.add_argument("--L", type=int, help="number of unit cells (half filling)")
    p.add_argument("--U", type=float, help="nearest-neighbour repulsion (default 0)")
    p.add_argument("--j1", type=float)
    p.add_argument("--j2i", type=float)
    p.add_argument("--j2f", type=float)
    p.add_argument("--flux", type=parse_angle)
    return parser


_ANGLE_KEYS = {"thi", "thf", "flux", "flux_min", "flux_max"}


def _merge_config(args, parser):
    """Fill unset options from --config, then from DEFAULTS."""
    config = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, ValueError) as exc:
            parser.error(f"cannot read config {args.config}: {exc}")
        if not isinstance(config, dict):
            parser.error("config file must hold a flat JSON object")
        config = {k.replace("-", "_"): v for k, v in config.items()}
    for key, value in vars(args).items():
        if value is not None or key == "command":
            continue
        if key in config:
            value = config[key]
            if key in _ANGLE_KEYS:
                value = parse_angle(value)
            elif key == "sizes":
                value = _int_list(value)
        elif key in DEFAULTS:
            value = DEFAULTS[key]
            if key == "sizes":
                value = _int_list(value)
        setattr(args, key, value)
    return args


def _need(args, parser, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        parser.error(f"{args.command} --model {getattr(args, 'model', '')}: missing "
                     + ", ".join("--" + n.replace("_", "-") for n in missing))


def _quench(args, parser, L=None) -> Quench:
    if args.model is None:
        parser.error("--model is required")
    if args.model == "ssh":
        _need(args, parser, "gi", "gf")
        return Quench.ssh(args.gi, args.gf)
    if args.model == "creutz":
        _need(args, parser, "thi", "thf")
        return Quench.creutz(args.thi, args.thf, args.jv)
    if args.model == "longrange":
        _need(args, parser, "j2i", "j2f")
        return Quench.long_range(args.j2i, args.j2f, args.alpha, L or args.L,
                                 j1=args.j1, j3=args.j3, j4=args.j4)
    _need(args, parser, "mui", "muf")
    return Quench.qwz(args.mui, args.muf)


def _sizes(args, quench):
    return (args.Lx, args.Ly) if quench.dims == 2 else args.L


def _critical(args, quench, n_max=1):
    if quench.dims == 2:
        axis = args.axis if args.axis in ("x", "y") else "either"
        return crit.qwz_critical_pairs(quench, args.Lx, args.Ly, axis, n_max=n_max)
    return crit.critical_set(quench, args.L, n_max)


def _times(args, first_critical=None):
    if args.dt is not None and args.n_steps is not None:
        raise ValueError("give either --dt or --n-steps, not both")
    if args.tmax <= 0:
        raise ValueError("--tmax must be positive")
    if args.n_steps is not None:
        n = args.n_steps
    elif args.dt is not None:
        n = int(math.ceil(args.tmax / args.dt - 1e-9))
    else:
        dt = args.tmax / 4000
        if first_critical:
            # at least 400 samples up to the first critical time
            dt = min(dt, first_critical / 400)
        n = int(math.ceil(args.tmax / dt - 1e-9))
    if n < 2:
        raise ValueError("need at least two time steps")
    return np.linspace(0.0, args.tmax, n + 1)


def _first_critical_time(args, quench):
    try:
        if getattr(args, "L", None) is None and quench.dims == 1:
            ks = crit.solve_critical_momenta(quench)
            return min((crit.critical_times(quench, k, 1)[0] for k in ks), default=None)
        cs = _critical(args, quench)
    except (DqptError, ValueError):
        return None
    return min((p.t_star[0] for p in cs), default=None)


def _fmt_peaks(peaks, k=4):
    return ", ".join("inf" if math.isinf(v) else f"{t:.4f}" for t, v in peaks[:k]) or "none"


def _twist(args, quench, phi):
    if quench.dims == 1:
        return phi
    return {"y": (0.0, phi), "both": (phi, phi)}.get(args.axis, (phi, 0.0))


def _cmd_rate(args, parser):
    quench = _quench(args, parser)
    grid = make_grid(quench.dims, _sizes(args, quench), _twist(args, quench, args.flux))
    series = rate_function(quench, grid, _times(args, _first_critical_time(args, quench)), args.with_le)
    peaks = local_maxima(series)
    summary = f"rate: peaks at t = {_fmt_peaks(peaks)}; max lambda = {np.max(series.rate):.6g}"
    return lambda out: write_series(series, out, args.format), summary


def _cmd_critical(args, parser):
    quench = _quench(args, parser)
    cs = _critical(args, quench, args.n)
    if args.format == "json":
        write = lambda out: out.write(dumps_json(cs.as_dict())) if hasattr(out, "write") else \
            open(out, "w", encoding="utf-8").write(dumps_json(cs.as_dict()))
    else:
        rows = []
        for i, p in enumerate(cs):
            d = p.as_dict()
            k = np.atleast_1d(d["k_c"])
            phi = np.atleast_1d(d["phi_c"])
            rows.append([i, ";".join(map(repr, k.tolist())), ";".join(map(repr, phi.tolist())),
                         d["epsilon_f"], ";".join(map(repr, d["t_star"]))])
        write = lambda out: write_table(["pair", "k_c", "phi_c", "epsilon_f", "t_star"], rows, out, "csv")
    if len(cs) == 0:
        summary = "critical: no critical momenta (no dynamical transition for this quench)"
    else:
        parts = []
        for p in cs.pairs[:4]:
            k = np.atleast_1d(p.k_c) / math.pi
            phi = np.atleast_1d(p.phi_c) / math.pi
            parts.append("k_c/pi = " + ",".join(f"{v:.4f}" for v in k)
                         + "; phi_c/pi = " + ",".join(f"{v:.4f}" for v in phi)
                         + "; t* = " + ", ".join(f"{t:.4f}" for t in p.t_star))
        more = f" (+{len(cs) - 4} more)" if len(cs) > 4 else ""
        summary = f"critical: {len(cs)} pair(s): " + " | ".join(parts) + more
    return write, summary


def _cmd_flux_scan(args, parser):
    quench = _quench(args, parser)
    if args.flux_steps < 1:
        raise ValueError("--flux-steps must be positive")
    fluxes = np.linspace(args.flux_min, args.flux_max, args.flux_steps)
    times = _times(args, _first_critical_time(args, quench))
    res = lambda_max_vs_flux(quench, _sizes(args, quench), fluxes, (0.0, args.tmax),
                             n_times=len(times) - 1, axis=args.axis if args.axis in ("y", "both") else "x",
                             peak=args.peak)
    meta = {**quench.describe(), "sizes": np.atleast_1d(_sizes(args, quench)).tolist(), "peak": args.peak}
    finite = [(phi, v) for phi, v in res if not math.isnan(v)]
    if finite:
        phi_top, v_top = max(finite, key=lambda r: r[1])
        summary = f"flux-scan: largest lambda_max = {v_top:.6g} at phi/pi = {phi_top / math.pi:.4f}"
    else:
        summary = "flux-scan: no peak inside the time window"
    return lambda out: write_table(["phi", "lambda_max"], res, out, args.format, meta), summary


def _cmd_scaling(args, parser):
    quench = _quench(args, parser, L=min(args.sizes))
    times = _times(args)
    res = size_sweep(quench, args.sizes, args.flux, (0.0, args.tmax), n_times=len(times) - 1)
    last = res[-1]
    summary = f"scaling: L = {last[0]}: t1 = {last[1]:.6g}, lambda_max = {last[2]:.6g}"
    meta = {**quench.describe(), "flux": args.flux}
    return lambda out: write_table(["L", "t1", "lambda_max"], res, out, args.format, meta), summary


def _cmd_thermo(args, parser):
    quench = _quench(args, parser)
    if quench.dims != 1:
        parser.error("thermo supports 1D models only")
    series = thermo_series(quench, _times(args, _first_critical_time(args, quench)))
    peaks = local_maxima(series)
    summary = f"thermo: cusps/peaks at t = {_fmt_peaks(peaks)}"
    return lambda out: write_series(series, out, args.format), summary


def _cmd_ed(args, parser):
    _need(args, parser, "L", "j2i", "j2f")
    quench = EDQuench(args.L, args.U, args.j2i, args.j2f, args.flux, args.j1)
    series = ed_rate_function(quench, _times(args))
    i = int(np.argmax(series.rate))
    summary = (f"ed: max lambda = {series.rate[i]:.6g} at t = {series.times[i]:.4f}; "
               f"peaks at t = {_fmt_peaks(local_maxima(series))}")
    return lambda out: write_series(series, out, args.format), summary


COMMANDS = {
    "rate": _cmd_rate,
    "critical": _cmd_critical,
    "flux-scan": _cmd_flux_scan,
    "scaling": _cmd_scaling,
    "thermo": _cmd_thermo,
    "ed": _cmd_ed,
}


def run(argv=None) -> int:
    """Parse ``argv``, execute, and return the exit status.

    Argument errors exit with status 2 (argparse convention), numerical
    failures return 1.
    """
    parser = build_parser()
    args = _merge_config(parser.parse_args(argv), parser)
    try:
        write, summary = COMMANDS[args.command](args, parser)
        if args.output:
            write(args.output)
            print(summary)
        else:
            write(sys.stdout)
            print(summary, file=sys.stderr)
    except DqptError as exc:
        print(f"dqpt: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        parser.error(str(exc))
    except OSError as exc:
        print(f"dqpt: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
