"""Command-line front end.

Machine-readable output (CSV or JSON) goes to ``--output`` when given and
to stdout otherwise; the human summary goes to stdout in the first case
and to stderr in the second, so piping stays clean.

Exit codes: 0 success, 1 a check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import platform
import sys

import numpy as np
import scipy

from . import __version__, acceptance, catalog, density, heat, identities, invariants, kernels, surface
from .config import ConfigError, RunConfig

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

COLUMNS = {
    "surface-report": ["surface", "u", "v", "E", "F", "G", "L", "M", "N", "K", "eta", "k1", "k2",
                       "div_residual", "scale"],
    "invariants": ["surface", "u", "v", "eta", "K", "gamma0", "gamma2", "gamma4", "gamma4_reduced",
                   "div_residual", "predicted_gamma4"],
    "density": ["surface", "point", "u", "v", "r", "density", "error"],
    "heat": ["surface", "point", "u", "v", "t", "u_C"],
    "verify-identities": ["identity", "status", "residual"],
    "symmetry-check": ["surface", "flow_chart_residual", "swap_chart_residual", "transport_residual",
                       "side_preserved", "side_swapped", "points_tested", "passed"],
    "acceptance": ["criterion", "check", "value", "threshold", "passed", "note"],
}


class UsageError(Exception):
    pass


def _floats(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _pair(text):
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return vals


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (flags override it)")
    common.add_argument("--surface", help="fixture name")
    common.add_argument("--alpha", type=float, help="helicoid parameter")
    common.add_argument("--radius", type=float, help="round sphere radius")
    common.add_argument("--point", type=_pair, action="append", dest="points", metavar="U,V",
                        help="chart point; repeatable")
    common.add_argument("--u-range", type=_pair, metavar="LO,HI")
    common.add_argument("--v-range", type=_pair, metavar="LO,HI")
    common.add_argument("--u-count", type=int)
    common.add_argument("--v-count", type=int)
    common.add_argument("--n-points", type=int, help="number of fixture sample points")
    common.add_argument("--r", type=_floats, dest="r_grid", metavar="R1,R2,...")
    common.add_argument("--t", type=_floats, dest="t_grid", metavar="T1,T2,...")
    common.add_argument("--order", type=int, help="density order (density, heat) or jet order (invariants)")
    common.add_argument("--method", dest="density_method", choices=("refine", "classify"))
    common.add_argument("--tol", type=float, help="density or heat tolerance")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--output", help="output path (default: stdout)")
    common.add_argument("--threads", type=int)
    common.add_argument("--seed", type=int)

    p = argparse.ArgumentParser(prog="halfheat", description="Geometry, density and heat checks for 1/2-domains.")
    p.add_argument("--version", action="version", version=f"halfheat {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COLUMNS:
        sp = sub.add_parser(name, parents=[common])
        if name == "acceptance":
            sp.add_argument("--only", type=lambda s: tuple(int(x) for x in s.split(",")),
                            help="comma-separated criterion numbers")
    return p


def make_config(args):
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    changes = {k: getattr(args, k, None) for k in
               ("surface", "alpha", "radius", "u_range", "v_range", "u_count", "v_count", "n_points",
                "r_grid", "t_grid", "density_method", "format", "output", "threads", "seed")}
    if args.points:
        changes["points"] = tuple(args.points)
    if args.order is not None:
        changes["invariant_order" if args.command == "invariants" else "density_order"] = args.order
    if args.tol is not None:
        changes["heat_tol" if args.command == "heat" else "density_tol"] = args.tol
    cfg = cfg.replace(**changes)
    cfg.validate()
    return cfg


def fixture(cfg):
    try:
        return catalog.get(cfg.surface, alpha=cfg.alpha, radius=cfg.radius)
    except catalog.UnknownSurfaceError:
        raise UsageError(f"unknown surface {cfg.surface!r}; fixtures: {', '.join(catalog.names())}") from None
    except ValueError as e:
        raise UsageError(str(e)) from None


def _chart_points(cfg):
    if cfg.points:
        return list(cfg.points)
    us = np.linspace(cfg.u_range[0], cfg.u_range[1], cfg.u_count)
    vs = np.linspace(cfg.v_range[0], cfg.v_range[1], cfg.v_count)
    return [(float(u), float(v)) for u in us for v in vs]


def _sample_points(cfg, s):
    pts = list(cfg.points) if cfg.points else list(s.sample_params[:cfg.n_points])
    for u, v in pts:
        x = s.point(u, v)
        if s.side_fn is not None and s.embedded and abs(float(s.side(x))) > catalog.ON_SURFACE_TOL:
            raise UsageError(f"chart point ({u}, {v}) is not on the surface")
    return pts


# ---------------------------------------------------------------------------
# subcommands: each returns (rows, summary lines, passed)
# ---------------------------------------------------------------------------

def cmd_surface_report(cfg):
    s = fixture(cfg)
    rows = []
    for u, v in _chart_points(cfg):
        fd = surface.fundamental_data(s.chart, u, v)
        rows.append([s.label(), u, v, fd.g[0, 0], fd.g[0, 1], fd.g[1, 1], fd.l[0, 0], fd.l[0, 1], fd.l[1, 1],
                     fd.K, fd.eta, fd.k_principal[0], fd.k_principal[1],
                     surface.divergence_residual(s.chart, u, v), surface.scale_normalizer(s.chart, u, v)])
    eta = max(abs(r[10]) for r in rows)
    div = max(abs(r[13]) / r[14] for r in rows)
    return rows, [f"{s.label()}: {len(rows)} points, max |eta| = {eta:.3e}, max scaled |div(S grad K)| = {div:.3e}"], True


def cmd_invariants(cfg):
    s = fixture(cfg)
    rows = []
    for u, v in _chart_points(cfg):
        rep = invariants.invariants(s.chart, u, v, cfg.invariant_order)
        rows.append([s.label(), u, v, rep.eta, rep.K, rep.gamma0, rep.gamma2, rep.gamma4, rep.gamma4_reduced,
                     rep.div_residual, rep.predicted_gamma4])
    lines = [f"{s.label()} ({r[1]:g}, {r[2]:g}): gamma4 = {r[7]:.6g}, (5/16) div = {r[10]:.6g}" for r in rows]
    return rows, lines, True


def cmd_density(cfg):
    s = fixture(cfg)
    rows = []
    for i, (u, v) in enumerate(_sample_points(cfg, s)):
        try:
            prof = density.profile(s, s.point(u, v), cfg.r_grid, n=cfg.density_order, method=cfg.density_method,
                                   threads=cfg.threads, tol=cfg.density_tol)
        except density.DensityUsageError as e:
            raise UsageError(str(e)) from None
        rows += [[s.label(), i, u, v, r, sg, err] for r, sg, err in prof.rows()]
    dev = max(abs(r[5] - 0.5) for r in rows)
    return rows, [f"{s.label()}: {len(rows)} values, max |density - 1/2| = {dev:.3e}"], True


def cmd_heat(cfg):
    s = fixture(cfg)
    rows = []
    for i, (u, v) in enumerate(_sample_points(cfg, s)):
        uc = heat.cauchy_temperatures(s, cfg.t_grid, s.point(u, v), nodes=cfg.heat_nodes, tol=cfg.heat_tol,
                                      threads=cfg.threads, dist=0.0)
        rows += [[s.label(), i, u, v, t, val] for t, val in zip(cfg.t_grid, uc)]
    dev = max(abs(r[5] - 0.5) for r in rows)
    return rows, [f"{s.label()}: {len(rows)} values, max |u_C - 1/2| = {dev:.3e}"], True


def cmd_verify_identities(cfg):
    ids = identities.verify_all()
    rows = [list(t) for t in ids.table()]
    lines = [f"{label:8s} {status}" + ("" if status == "PASS" else f"  residual: {res}") for label, status, res in rows]
    psi = identities.psi_condition()
    lines.append(f"psi''(1) - 2 psi'(1) = {psi.condition}; vanishes iff k^2 = {psi.computed_locus} sigma"
                 f" (stated value {psi.claimed_locus} sigma{'' if psi.agrees_with_claim else ', differs'})")
    ce = identities.counterexample()
    lines.append(f"P = 1 + u^2 + v^2: psi = {ce.psi} (constant: {ce.psi_is_constant})")
    return rows, lines, ids.passed


def cmd_symmetry_check(cfg):
    targets = [fixture(cfg)] if cfg.surface != "all" else catalog.half_domain_fixtures()
    rows, ok = [], True
    for s in targets:
        try:
            rep = catalog.symmetry_check(s, n_random=cfg.n_random, seed=cfg.seed, tol=cfg.symmetry_tol, strict=False)
        except catalog.NotABoundaryError as e:
            raise UsageError(str(e)) from None
        rows.append([s.label(), rep.flow_chart_residual, rep.swap_chart_residual, rep.transport_residual,
                     rep.side_preserved, rep.side_swapped, rep.points_tested, rep.passed])
        ok = ok and rep.passed
    lines = [f"{r[0]}: {'PASS' if r[7] else 'FAIL'}" for r in rows]
    return rows, lines, ok


def cmd_acceptance(cfg, only=None):
    results = acceptance.run_all(only, threads=cfg.threads, echo=lambda line: print(line, file=sys.stderr))
    rows = [[r.number, c.name, c.value, c.threshold, c.passed, c.note] for r in results for c in r.checks]
    lines = [r.line() for r in results]
    total = sum(r.runtime for r in results)
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} criteria passed in {total:.1f}s")
    return rows, lines, all(r.passed for r in results)


COMMANDS = {
    "surface-report": cmd_surface_report,
    "invariants": cmd_invariants,
    "density": cmd_density,
    "heat": cmd_heat,
    "verify-identities": cmd_verify_identities,
    "symmetry-check": cmd_symmetry_check,
    "acceptance": cmd_acceptance,
}


def _json_cell(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def _cell(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def meta(cfg, command):
    return {"command": command, "config_hash": cfg.digest(), "config": cfg.to_dict(),
            "versions": {"halfheat": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                         "python": platform.python_version()},
            "kernel_backend": kernels.BACKEND}


def render(cfg, command, rows, summary, passed):
    cols = COLUMNS[command]
    if cfg.format == "json":
        rows = [[_json_cell(x) for x in r] for r in rows]
        doc = {"meta": meta(cfg, command), "columns": cols, "rows": [dict(zip(cols, r)) for r in rows],
               "summary": summary, "passed": bool(passed)}
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    w.writerows([_cell(x) for x in r] for r in rows)
    return buf.getvalue()


def _check_writable(path):
    d = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(d) or not os.access(d, os.W_OK) or (os.path.exists(path) and not os.access(path, os.W_OK)):
        raise UsageError(f"cannot write output to {path}")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        if cfg.output:
            _check_writable(cfg.output)
        fn = COMMANDS[args.command]
        rows, summary, passed = fn(cfg, args.only) if args.command == "acceptance" else fn(cfg)
    except (UsageError, ConfigError, OSError, catalog.NotABoundaryError, density.DensityUsageError,
            heat.HeatUsageError) as e:
        print(f"halfheat: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    text = render(cfg, args.command, rows, summary, passed)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        human = sys.stdout
    else:
        sys.stdout.write(text)
        human = sys.stderr
    for line in summary:
        print(line, file=human)
    return EXIT_OK if passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
