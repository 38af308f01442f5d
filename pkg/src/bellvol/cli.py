"""Command-line front end: ``bellvol {analytic,mc,sweep,boundary}``.

Exit codes: 0 success, 1 runtime or domain error, 2 usage error.
Results go to stdout, logs to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__, analytic
from .inequalities import get_functional
from .montecarlo import SamplingPlan, default_workers, estimate_volume, sweep
from .quantum import StateError, TwoQubitState, load_state, singlet, werner

log = logging.getLogger("bellvol")


class UsageError(Exception):
    pass


def _fmt(value):
    if isinstance(value, float):
        return format(value, ".17g")
    if value is None:
        return ""
    return str(value)


def write_csv(header, rows, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])


def output_record(args, parameters: dict, results) -> dict:
    return {
        "command": args.command,
        "argv": list(args.argv),
        "parameters": parameters,
        "results": results,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def emit(record: dict, fmt: str, out) -> None:
    """Print an output record as one JSON object, one CSV row or ``key: value`` text."""
    if fmt == "json":
        out.write(json.dumps(record) + "\n")
        return
    flat = {"command": record["command"]}
    flat.update({k: v for k, v in record["parameters"].items()})
    flat.update(record["results"])
    flat["version"] = record["version"]
    flat["timestamp"] = record["timestamp"]
    if fmt == "csv":
        write_csv(list(flat), [list(flat.values())], out)
    else:
        width = max(len(k) for k in flat)
        for k, v in flat.items():
            text = repr(v) if isinstance(v, float) else _fmt(v)
            out.write(f"{k:<{width}}  {text}\n")


def parse_state(spec: str) -> TwoQubitState:
    if spec == "singlet":
        return singlet()
    if spec.startswith("werner:"):
        try:
            p = float(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad Werner weight in --state {spec!r}") from None
        return werner(p)
    if spec.startswith("file:"):
        return load_state(spec.split(":", 1)[1])
    raise UsageError(f"unknown --state {spec!r} (singlet | werner:<p> | file:<path>)")


def _plan(args) -> SamplingPlan:
    return SamplingPlan(
        n_samples=args.samples,
        seed=args.seed,
        chunk_size=args.chunk,
        fix_first_direction=args.fix_a,
        confidence_level=args.confidence,
    )


def _mc_parameters(args, functional) -> dict:
    return {
        "inequality": functional.id.value,
        "chsh_mode": None if functional.mode is None else functional.mode.value,
        "samples": args.samples,
        "seed": args.seed,
        "chunk": args.chunk,
        "fix_a": args.fix_a,
        "confidence": args.confidence,
    }


def cmd_analytic(args, out) -> int:
    if args.method == "exact":
        res = analytic.exact_volume()
    elif args.method == "quadrature":
        res = analytic.volume_quadrature(args.tol)
    else:
        res = analytic.volume_series(args.terms)
    params = {"method": args.method, "tol": args.tol, "terms": args.terms}
    emit(output_record(args, params, res.to_dict()), args.format, out)
    return 0


def cmd_mc(args, out) -> int:
    state = parse_state(args.state)
    functional = get_functional(args.inequality, args.chsh_mode)
    est = estimate_volume(state, functional, _plan(args), workers=args.threads)
    params = {"state": args.state, **_mc_parameters(args, functional)}
    emit(output_record(args, params, est.to_dict()), args.format, out)
    return 0


SWEEP_HEADER = ("p", "fraction", "stderr", "ci_low", "ci_high", "n")


def cmd_sweep(args, out) -> int:
    if args.steps < 1 or args.p_from > args.p_to or (args.steps == 1 and args.p_from != args.p_to):
        raise UsageError("empty or inverted grid: need --from <= --to and --steps >= 1")
    if not (0 <= args.p_from and args.p_to <= 1):
        raise UsageError("Werner grid must lie within [0, 1]")
    ps = np.linspace(args.p_from, args.p_to, args.steps)
    functional = get_functional(args.inequality, args.chsh_mode)
    states = [werner(float(p)) for p in ps]
    ests = sweep(states, functional, _plan(args), workers=args.threads)
    rows = [
        (float(p), e.fraction, e.stderr, e.ci_low, e.ci_high, e.n_samples)
        for p, e in zip(ps, ests)
    ]
    if args.format == "json":
        params = {"family": args.family, "from": args.p_from, "to": args.p_to,
                  "steps": args.steps, **_mc_parameters(args, functional)}
        results = {"rows": [dict(zip(SWEEP_HEADER, r)) for r in rows]}
        emit(output_record(args, params, results), "json", out)
    else:
        write_csv(SWEEP_HEADER, rows, out)
    if args.plot:
        from .plotting import plot_sweep

        plot_sweep(list(ps), ests, args.plot, title=f"{functional.name}, werner")
        log.info("wrote %s", args.plot)
    return 0


BOUNDARY_HEADER = ("z", "x", "y_boundary", "area")


def cmd_boundary(args, out) -> int:
    if args.z is not None:
        if not 0 <= args.z <= 1:
            raise UsageError(f"--z must lie in [0, 1], got {args.z}")
        zs = [args.z]
    else:
        if args.z_grid < 1:
            raise UsageError("--z-grid must be >= 1")
        zs = np.linspace(0, 1, args.z_grid)
    if args.x_grid < 1:
        raise UsageError("--x-grid must be >= 1")
    xs = np.linspace(-1, 1, args.x_grid)
    rows = analytic.boundary_table(zs, xs)
    if args.format == "json":
        params = {"z": args.z, "z_grid": args.z_grid, "x_grid": args.x_grid}
        results = {"rows": [dict(zip(BOUNDARY_HEADER, r)) for r in rows]}
        emit(output_record(args, params, results), "json", out)
    else:
        write_csv(BOUNDARY_HEADER, rows, out)
    if args.plot:
        from .plotting import plot_boundary

        plot_boundary(rows, args.plot)
        log.info("wrote %s", args.plot)
    return 0


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _seed(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _probability(text):
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bellvol", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt(default):
        # parents share action objects, so each subcommand gets its own
        f = argparse.ArgumentParser(add_help=False)
        f.add_argument("--format", choices=("json", "csv", "text"), default=default)
        return f

    p = sub.add_parser("analytic", parents=[fmt("text")], help="exact singlet Bell-1964 volume")
    p.add_argument("--method", choices=("exact", "quadrature", "series"), default="exact")
    p.add_argument("--tol", type=float, default=1e-10, help="quadrature tolerance")
    p.add_argument("--terms", type=_positive_int, default=10_000, help="series terms")
    p.set_defaults(func=cmd_analytic)

    mc = argparse.ArgumentParser(add_help=False)
    mc.add_argument("--inequality", choices=("bell1", "chsh"), default="bell1")
    mc.add_argument("--samples", type=_positive_int, default=10**6)
    mc.add_argument("--seed", type=_seed, default=0)
    mc.add_argument("--chunk", type=_positive_int, default=2**16)
    mc.add_argument("--fix-a", action="store_true", help="pin a to the z axis")
    mc.add_argument("--chsh-mode", choices=("fixed", "max"), default="fixed")
    mc.add_argument("--confidence", type=_probability, default=0.99)
    mc.add_argument("--threads", type=_positive_int, default=None,
                    help="worker threads (default: $BELLVOL_THREADS or all cores)")

    p = sub.add_parser("mc", parents=[fmt("text"), mc], help="Monte Carlo violation fraction")
    p.add_argument("--state", default="singlet", help="singlet | werner:<p> | file:<path>")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("sweep", parents=[fmt("csv"), mc], help="Werner-family scan (CSV)")
    p.add_argument("--family", choices=("werner",), default="werner")
    p.add_argument("--from", dest="p_from", type=float, default=0.0)
    p.add_argument("--to", dest="p_to", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--plot", metavar="PATH", help="also render the scan to an image file")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("boundary", parents=[fmt("csv")], help="boundary curves y(x) and A(z) (CSV)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--z", type=float)
    g.add_argument("--z-grid", type=int, default=11)
    p.add_argument("--x-grid", type=int, default=21)
    p.add_argument("--plot", metavar="PATH", help="also render the curves to an image file")
    p.set_defaults(func=cmd_boundary)
    return parser


def main(argv=None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    if getattr(args, "threads", None) is None and hasattr(args, "threads"):
        try:
            args.threads = default_workers()
        except ValueError:
            print("bellvol: error: BELLVOL_THREADS must be an integer", file=sys.stderr)
            return 2
    try:
        return args.func(args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"bellvol: error: {exc}", file=sys.stderr)
        return 2
    except (StateError, ValueError, ArithmeticError) as exc:
        print(f"bellvol: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
