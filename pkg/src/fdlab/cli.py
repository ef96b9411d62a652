"""Command-line front end: ``fdlab <subcommand> [flags]``.

Exit status: 0 on success, 1 when inputs fail validation, 2 when a numeric
guard trips (for instance a nonpositive sigma inside a fit window), 64 on
usage errors. Outputs go to ``--out`` (with a ``config.json`` echo) or, when
no directory is given, the main JSON document is printed to stdout.

All work runs in one process. ``FDL_THREADS`` is accepted as a parallelism
cap for forward compatibility; it must be a positive integer when set and is
echoed into ``config.json``.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys

import numpy as np

from . import caps, evolution, exponents, knapp, measures, spectral
from ._util import fmt17

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt17(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n"


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"not serializable: {type(o).__name__}")


class Writer:
    """Single owner of all output; writes files in a fixed order."""

    def __init__(self, out_dir):
        self.out_dir = out_dir
        self.main = None

    def write(self, name: str, text: str, main: bool = False):
        if main:
            self.main = text
        if self.out_dir is None:
            return
        os.makedirs(self.out_dir, exist_ok=True)
        with open(os.path.join(self.out_dir, name), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)

    def finish(self):
        if self.out_dir is None and self.main is not None:
            sys.stdout.write(self.main)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_bounds(args, out: Writer) -> int:
    d = args.d
    alphas = exponents.grid(d, args.points)
    rows = exponents.beta_table(d, alphas)
    out.write("bounds.csv", _csv_text(
        ["d", "alpha", "beta_lower", "lower_provenance", "beta_upper", "upper_provenance"], rows))
    summary = {"d": d, "gap_max": max(r[4] - r[2] for r in rows)}
    if d >= 3:
        th = {}
        for fl in ("full", "erdogan", "theorem"):
            try:
                th[fl] = exponents.distance_set_threshold(d, fl)
            except exponents.NoCrossingError:
                th[fl] = None
        summary["distance_threshold"] = th
        summary["distance_reference"] = d / 2 + 5 / 12
    if d >= 2 and d / 2 > 1:
        summary["gamma_upper_s1"] = exponents.gamma_upper_wave(d, 1.0, args.floor)
    out.write("thresholds.json", _json_text(summary), main=True)
    return EXIT_OK


def _measure_from_args(args):
    kind = args.measure
    if kind == "sphere":
        return measures.make_sphere_measure(args.d, args.n_points)
    if kind == "cantor":
        return measures.make_cantor_measure(args.d, args.ratio, args.depth)
    if kind == "lattice":
        return measures.make_lattice_measure(args.d, args.lattice_R, args.kappa, args.eps)
    if kind == "grid":
        return measures.make_grid_measure(args.d, args.n_points, 0.0, 1.0)
    return measures.DiscreteMeasure.load(kind)


def cmd_decay_scan(args, out: Writer) -> int:
    mu = _measure_from_args(args)
    quad = spectral.build_sphere_quadrature(mu.d, args.quad_nodes, seed=args.seed)
    accept = None
    if args.measure == "sphere" and args.d == 3:
        # the closed form is 4 pi (sin R / R)^2; keep grid points off its zeros
        accept = lambda r: abs(math.sin(r)) >= 0.85  # noqa: E731
    grid = spectral.jittered_dyadic_grid(args.R_min, args.R_max, seed=args.seed, accept=accept)
    curve = spectral.decay_scan(mu, grid, quad)
    out.write("decay.csv", curve.to_csv())
    fit = spectral.fit_decay_exponent(curve)
    out.write("fit.json", fit.to_json() + "\n", main=True)
    return EXIT_OK


def cmd_knapp(args, out: Writer) -> int:
    cfg = knapp.KnappConfig(d=args.d, n=args.n, kappa=args.kappa, rho=args.rho, epsilon=args.eps)
    rep = knapp.knapp_pipeline(cfg, phase_samples=args.samples, seed=args.seed)
    out.write("phases.csv", rep.residuals_csv())
    out.write("knapp.json", rep.to_json() + "\n", main=True)
    return EXIT_OK


def cmd_caps(args, out: Writer) -> int:
    d = args.d
    phase = caps.Phase(args.phase)
    delta = args.delta
    root = caps.Cap.centered(phase, [0.0] * (d - 1), delta)
    kids = caps.cap_partition(root, args.K)
    tuples = []
    for m in range(2, d + 1):
        best = 0.0
        for combo in itertools.combinations(kids, m):
            best = max(best, caps.transversality_constant(combo))
        tuples.append({"m": m, "best_transversality": best})
    ladder = caps.build_scale_ladder(args.R, args.ladder_eps, d)
    out.write("ladder.csv", _csv_text(["m", "K_m", "chain_ok"],
                                      [(m, float(k), "" if ok is None else str(ok).lower())
                                       for m, k, ok in ladder.rows()]))
    report = {"d": d, "phase": args.phase, "delta": delta, "K": args.K, "children": len(kids),
              "transversality": tuples,
              "ladder": {"R": args.R, "eps": args.ladder_eps, "eps_in_range": ladder.eps_in_range,
                         "monotone": ladder.monotone(), "below_R_eps": ladder.below_R_eps()}}
    if d in (2, 3):
        probe_ladder = caps.build_scale_ladder(args.R, args.ladder_eps, d,
                                               K_list=[args.K * 2 ** j for j in range(d)])
        rng = np.random.default_rng(args.seed)
        g = caps.grid_function(root, 8 * args.K,
                               lambda nd: rng.standard_normal(len(nd)) + 1j * rng.standard_normal(len(nd)))
        pts = rng.uniform(-20, 20, (args.points, d))
        st = caps.bg_inequality_probe(root, g, probe_ladder, pts)
        report["probe"] = st.__dict__
    out.write("caps.json", _json_text(report), main=True)
    return EXIT_OK


def cmd_evolve(args, out: Writer) -> int:
    if args.measure_file:
        mu = measures.DiscreteMeasure.load(args.measure_file)
    else:
        mu = measures.make_grid_measure(args.n, args.grid_points if args.n == 1 else 32, 0.0, 1.0 / math.sqrt(args.n))
    R_list = [float(r) for r in args.R.split(",")]
    res = evolution.maximal_scaling_fit(args.n, mu, args.alpha, R_list,
                                        seeds=range(args.seed, args.seed + args.seeds))
    out.write("norms.csv", _csv_text(["R", "norm"], list(zip(res.R, res.norms))))
    out.write("maximal.json", res.to_json() + "\n", main=True)
    return EXIT_OK


def cmd_selftest(args, out: Writer) -> int:
    from .selftest import run_all
    results = run_all()
    lines = [f"{'PASS' if ok else 'FAIL'} {name}: {detail}" for name, ok, detail in results]
    text = "\n".join(lines) + "\n"
    out.write("selftest.txt", text)
    sys.stdout.write(text)
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_INVALID


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fdlab", description="Fourier-decay laboratory")
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--config", default=None, help="JSON file of flag defaults")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bounds", parents=[common], help="exponent tables")
    b.add_argument("--d", type=int, default=3)
    b.add_argument("--points", type=int, default=200)
    b.add_argument("--floor", choices=exponents.FLOORS, default="full")
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("decay-scan", parents=[common], help="spherical averages and decay fit")
    s.add_argument("--measure", default="sphere", help="sphere | cantor | lattice | grid | path to JSON")
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--n-points", dest="n_points", type=int, default=4000)
    s.add_argument("--ratio", type=float, default=0.25)
    s.add_argument("--depth", type=int, default=4)
    s.add_argument("--lattice-R", dest="lattice_R", type=float, default=16.0)
    s.add_argument("--kappa", type=float, default=0.5)
    s.add_argument("--eps", type=float, default=0.5)
    s.add_argument("--quad-nodes", dest="quad_nodes", type=int, default=2000)
    s.add_argument("--R-min", dest="R_min", type=float, default=4.0)
    s.add_argument("--R-max", dest="R_max", type=float, default=64.0)
    s.set_defaults(func=cmd_decay_scan)

    k = sub.add_parser("knapp", parents=[common], help="integer-point Knapp example")
    k.add_argument("--d", type=int, default=4)
    k.add_argument("--n", type=int, default=1)
    k.add_argument("--kappa", type=float, default=0.5)
    k.add_argument("--rho", type=float, default=0.01)
    k.add_argument("--eps", type=float, default=0.01)
    k.add_argument("--samples", type=int, default=10_000)
    k.set_defaults(func=cmd_knapp)

    c = sub.add_parser("caps", parents=[common], help="cap geometry, ladders and probes")
    c.add_argument("--phase", choices=("paraboloid", "sphere"), default="paraboloid")
    c.add_argument("--d", type=int, default=2)
    c.add_argument("--delta", type=float, default=0.5)
    c.add_argument("--K", type=int, default=4)
    c.add_argument("--R", type=float, default=2.0 ** 40)
    c.add_argument("--ladder-eps", dest="ladder_eps", type=float, default=0.05)
    c.add_argument("--points", type=int, default=200)
    c.set_defaults(func=cmd_caps)

    e = sub.add_parser("evolve", parents=[common], help="maximal Schrodinger scaling")
    e.add_argument("--n", type=int, default=1)
    e.add_argument("--alpha", type=float, default=1.0)
    e.add_argument("--measure", dest="measure_file", default=None, help="measure JSON file")
    e.add_argument("--grid-points", dest="grid_points", type=int, default=512)
    e.add_argument("--R", default="16,32,64")
    e.add_argument("--seeds", type=int, default=4)
    e.set_defaults(func=cmd_evolve)

    t = sub.add_parser("selftest", parents=[common], help="elementary identity checks")
    t.set_defaults(func=cmd_selftest)
    return p


def _resolve(parser, argv):
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                conf = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValueError(f"cannot read config: {exc}") from exc
        known = set(vars(args))
        bad = sorted(set(conf) - known)
        if bad:
            raise UsageError(f"unknown config keys: {', '.join(bad)}")
        # config values act as defaults; explicit flags still win
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**conf)
        args = parser.parse_args(argv)
    return args


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = _resolve(parser, list(sys.argv[1:] if argv is None else argv))
    except UsageError:
        return EXIT_USAGE
    except ValueError as exc:
        sys.stderr.write(f"fdlab: {exc}\n")
        return EXIT_INVALID
    threads = os.environ.get("FDL_THREADS")
    if threads is not None:
        if not threads.isdigit() or int(threads) < 1:
            sys.stderr.write("fdlab: FDL_THREADS must be a positive integer\n")
            return EXIT_USAGE
        args.threads = int(threads)
    out = Writer(args.out)
    resolved = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "config")}
    out.write("config.json", _json_text(resolved))
    try:
        status = args.func(args, out)
    except spectral.QuadratureUnderflow as exc:
        sys.stderr.write(f"fdlab: numeric guard: {exc}\n")
        return EXIT_NUMERIC
    except (ValueError, knapp.BudgetExceeded) as exc:
        sys.stderr.write(f"fdlab: {exc}\n")
        return EXIT_INVALID
    except (RuntimeError, FloatingPointError) as exc:
        sys.stderr.write(f"fdlab: numeric guard: {exc}\n")
        return EXIT_NUMERIC
    out.finish()
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
