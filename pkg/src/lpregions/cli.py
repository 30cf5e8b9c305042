"""Command-line front end: ``lpregions {gen,solve,plot,bench,verify}``."""
from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from . import io
from .errors import LpRegionsError
from .formulations import (SppInstance, WeberInstance, WeberSolution, collapse_doubled,
                           double_visit_transform, path_from_gates, rapid_transit_transform)
from .instances import DEFAULT_BOX, NORM_MENU, random_spp, random_weber
from .solver.bnb import SolveConfig

log = logging.getLogger("lpregions")


def _box(vals):
    if vals is None:
        return DEFAULT_BOX
    x0, y0, x1, y1 = vals
    return ((x0, y0), (x1, y1))


def _read_demands(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    pts = [[float(r["x"]), float(r["y"])] for r in rows]
    w = [float(r.get("weight") or 1.0) for r in rows]
    return pts, w


def _m_star(text):
    if text in (None, "off"):
        return None
    if text in ("all", "auto"):
        return text
    return int(text)


def cmd_gen(a):
    box = _box(a.box)
    menu = tuple(a.norms.split(",")) if a.norms else NORM_MENU
    if a.kind == "spp":
        inst = random_spp(a.m, a.seed, box, menu, source=a.source, target=a.target)
    else:
        if a.demands:
            pts, w = _read_demands(a.demands)
            inst = random_weber(a.m, a.seed, points=pts, weights=w, box=box, menu=menu)
        else:
            inst = random_weber(a.m, a.seed, n=a.n, box=box, menu=menu)
    text = io.dumps(io.instance_to_json(inst))
    _write(a.output, text)
    return 0


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _config(a):
    return SolveConfig(time_limit_s=a.time_limit, rel_gap_tol=a.gap_tol, threads=a.threads,
                       trace_path=getattr(a, "trace", None))


def cmd_solve(a):
    from .pipeline import solve_locp, solve_spp
    from .verify import verify_path_optimality

    inst = io.load_instance(a.instance, a.facet_only)
    cfg = _config(a)
    m_star = _m_star(a.preprocess)
    if isinstance(inst, WeberInstance):
        if a.rapid_transit or a.double_visit:
            raise SystemExit("transforms apply to shortest-path instances only")
        res = solve_locp(inst, a.formulation, cfg, m_star=m_star)
        out = io.locp_solution_to_json(res)
        ok = res.solution is not None
        if ok:
            reports = [verify_path_optimality(_leg(inst, l, p), p).to_json()
                       for l, p in enumerate(res.solution.paths)]
            out["verification"] = reports
            ok = all(r["passed"] for r in reports)
    else:
        base_m = inst.m
        if a.rapid_transit:
            inst = rapid_transit_transform(inst, io.face_norms_from_json(
                io.load_json(a.rapid_transit), inst.graph))
        if a.double_visit:
            inst = double_visit_transform(inst)
        res = solve_spp(inst, a.formulation, cfg, m_star=m_star)
        out = io.spp_solution_to_json(res)
        ok = res.path is not None
        if ok:
            rep = verify_path_optimality(inst, res.path)
            out["verification"] = rep.to_json()
            ok = rep.passed
            if a.double_visit:
                out["base_path"] = collapse_doubled(out["path"], base_m)
    if res.elimination is not None:
        out["elimination"] = res.elimination.to_json()
    out["report"] = res.report.to_json()
    _write(a.output, io.dumps(out))
    good_status = res.report.status == "Optimal" or (
        res.report.status == "TimeLimit" and np.isfinite(res.report.ub))
    return 0 if ok and good_status else 1


def _leg(inst: WeberInstance, l, path):
    """Shortest-path view of one demand's route to the facility."""
    return SppInstance(inst.sub, inst.graph, inst.points[l], path.breaking_points[-1],
                       path.regions[0], path.regions[-1])


def _load_solution(inst, d):
    if isinstance(inst, WeberInstance):
        fac = np.asarray(d["facility"], float)
        paths = [path_from_gates(inst.sub, p["path"], x, fac, p["gates"])
                 for x, p in zip(inst.points, d["paths"])]
        value = float(sum(w * p.value for w, p in zip(inst.weights, paths)))
        return WeberSolution(int(d["region"]), fac, paths, value)
    return path_from_gates(inst.sub, d["path"], inst.xs, inst.xt, d["gates"])


def cmd_plot(a):
    from .plot import render_svg

    inst = io.load_instance(a.instance)
    sol = _load_solution(inst, io.load_json(a.solution)) if a.solution else None
    _write(a.output, render_svg(inst, sol))
    return 0


def cmd_verify(a):
    from .verify import verify_path_optimality

    inst = io.load_instance(a.instance, a.facet_only)
    sol = _load_solution(inst, io.load_json(a.solution))
    if isinstance(inst, WeberInstance):
        reps = [verify_path_optimality(_leg(inst, l, p), p, a.tol) for l, p in
                enumerate(sol.paths)]
        out = {"passed": all(r.passed for r in reps), "paths": [r.to_json() for r in reps]}
    else:
        rep = verify_path_optimality(inst, sol, a.tol)
        out = rep.to_json()
    _write(a.output, io.dumps(out))
    return 0 if out["passed"] else 1


def cmd_bench(a):
    from .bench import run_suite, side_by_side

    cfg = SolveConfig(time_limit_s=a.time_limit, rel_gap_tol=a.gap_tol, threads=a.threads)
    aggs = run_suite(a.output, a.kind, a.m, a.configs, range(a.seed, a.seed + a.runs), cfg,
                     a.dataset)
    if a.table:
        rows = side_by_side(aggs)
        with open(a.table, "w", newline="") as fh:
            fields = sorted({k for r in rows for k in r}, key=lambda k: (k != "m", k))
            w = csv.DictWriter(fh, fields)
            w.writeheader()
            w.writerows(rows)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="lpregions", description=__doc__)
    p.add_argument("-v", "--verbose", action="count", default=0)
    sp = p.add_subparsers(dest="command", required=True)

    def solve_opts(q):
        q.add_argument("--time-limit", type=float, default=7200.0, metavar="S")
        q.add_argument("--gap-tol", type=float, default=1e-4, metavar="G",
                       help="relative gap at which branch-and-bound stops")
        q.add_argument("--threads", type=int, default=1, metavar="T")

    g = sp.add_parser("gen", help="generate a random Voronoi instance")
    g.add_argument("kind", choices=["spp", "weber"])
    g.add_argument("--m", type=int, required=True, help="number of regions")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--box", type=float, nargs=4, metavar=("X0", "Y0", "X1", "Y1"))
    g.add_argument("--norms", help="comma-separated exponent menu, e.g. 1,3/2,2,3,inf")
    g.add_argument("--source", type=float, nargs=2)
    g.add_argument("--target", type=float, nargs=2)
    g.add_argument("--demands", help="CSV with x,y[,weight] columns")
    g.add_argument("--n", type=int, default=10, help="random demand count")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    s = sp.add_parser("solve", help="solve an instance and verify the result")
    s.add_argument("instance")
    s.add_argument("--formulation", choices=["f1", "f2"], default="f2")
    s.add_argument("--preprocess", default="off", help="off, a region count, auto or all")
    s.add_argument("--rapid-transit", metavar="FACES_JSON")
    s.add_argument("--double-visit", action="store_true")
    s.add_argument("--facet-only", action="store_true")
    s.add_argument("--seed", type=int, default=0, help="accepted for symmetry; solves are "
                   "deterministic")
    s.add_argument("--trace", help="CSV file for the branch-and-bound node log")
    s.add_argument("-o", "--output")
    solve_opts(s)
    s.set_defaults(func=cmd_solve)

    pl = sp.add_parser("plot", help="draw an instance (and a solution) as SVG")
    pl.add_argument("instance")
    pl.add_argument("--solution")
    pl.add_argument("-o", "--output")
    pl.set_defaults(func=cmd_plot)

    v = sp.add_parser("verify", help="check a solution's gates for local optimality")
    v.add_argument("instance")
    v.add_argument("solution")
    v.add_argument("--tol", type=float, default=1e-5)
    v.add_argument("--facet-only", action="store_true")
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_verify)

    b = sp.add_parser("bench", help="run seeded benchmark suites to CSV")
    b.add_argument("kind", choices=["spp", "weber"])
    b.add_argument("--m", type=int, nargs="+", default=[5, 10])
    b.add_argument("--configs", nargs="+", default=["f2"],
                   help="f1, f2, pre+f2, preall+f1, pre5+f2, ...")
    b.add_argument("--runs", type=int, default=5)
    b.add_argument("--seed", type=int, default=0, help="first seed")
    b.add_argument("--dataset", default="p4", help="demand set for weber suites")
    b.add_argument("--table", help="extra CSV with configurations side by side")
    b.add_argument("-o", "--output", required=True)
    solve_opts(b)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=[logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)],
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except LpRegionsError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
