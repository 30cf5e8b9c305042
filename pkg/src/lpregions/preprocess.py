"""Region elimination before branch-and-bound.

A region is dropped when forcing the solution to use it (the path must enter
it, or the facility must sit in it) pushes the continuous relaxation bound of
the disaggregated formulation above a known feasible value.  Regions far
from the terminals are tried first, since they are the likeliest to go.
"""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import config
from .errors import DegenerateCrossing, InvalidPath, NumericalTrouble
from .formulations import SppInstance, WeberInstance, build_locp_f2, build_spp_f2
from .geometry import Subdivision, locate_point, segment_induced_path
from .model import ConicModel, Expr, add_norm_constraint, combo, relax
from .solver.ipm import INFEASIBLE, solve_relaxation
from .solver.paths import fixed_path_eval, path_socp

log = logging.getLogger(__name__)


@dataclass
class EliminationList:
    instance_id: str
    eliminated: list
    bounds: dict  # region -> relaxation bound with the region forced
    upper_bound: float
    ranking: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # regions whose solve failed
    seconds: float = 0.0

    def to_json(self):
        def num(v):
            return None if not np.isfinite(v) else float(v)
        return dict(instance_id=self.instance_id, eliminated=list(map(int, self.eliminated)),
                    bounds={str(k): num(v) for k, v in sorted(self.bounds.items())},
                    upper_bound=num(self.upper_bound), ranking=list(map(int, self.ranking)),
                    skipped=list(map(int, self.skipped)), seconds=self.seconds)


# upper-bound heuristics ---------------------------------------------------------------

def heuristic_path(inst: SppInstance):
    """Region sequence met by the straight segment ``xs -> xt``.

    On transformed instances the segment is walked through the original
    tiling only, and steps without a direct edge go through a shared neighbour.
    """
    k = inst.overlay_from
    if k is None:
        return segment_induced_path(inst.sub, inst.xs, inst.xt, inst.graph,
                                    start=inst.s, end=inst.t).regions
    if inst.s >= k or inst.t >= k:
        raise InvalidPath("terminals lie in overlay regions")
    base = Subdivision(inst.sub.regions[:k], inst.sub.box)
    seq = segment_induced_path(base, inst.xs, inst.xt, start=inst.s, end=inst.t).regions
    out = [seq[0]]
    for j in seq[1:]:
        i = out[-1]
        if not inst.graph.has_edge(i, j):
            via = sorted(set(inst.graph.neighbors(i)) & set(inst.graph.neighbors(j)))
            if not via:
                raise InvalidPath(f"no connection from region {i} to {j}")
            out.append(via[0])
        out.append(j)
    return out


def spp_upper_bound(inst: SppInstance):
    """``(value, regions)`` of the best path along the segment-induced sequence."""
    regions = heuristic_path(inst)
    value, _ = fixed_path_eval(inst, regions)
    return value, regions


def euclidean_weber_point(points, weights=None):
    """``argmin_x sum_l w_l ||x_l - x||_2`` solved with the conic engine."""
    pts = np.atleast_2d(np.asarray(points, float))
    w = np.ones(len(pts)) if weights is None else np.asarray(weights, float)
    m = ConicModel()
    x = [m.add_var(f"x[{k}]") for k in range(pts.shape[1])]
    obj = Expr()
    for l, p in enumerate(pts):
        d = m.add_var(f"d[{l}]", lb=0.0)
        add_norm_constraint(m, "2", [Expr.var(h) for h in x], [Expr.constant(v) for v in p],
                            Expr.var(d), f"dist{l}:")
        obj.iadd(Expr.var(d), w[l])
    m.set_objective(obj)
    sol = solve_relaxation(m.freeze())
    if not sol.optimal:
        raise NumericalTrouble("Weber point program failed")
    return sol.x[x]


def weber_upper_bound(inst: WeberInstance):
    """Facility at the unweighted Euclidean Weber point, demands routed along segments.

    Returns ``(value, region, point, region_paths)``.
    """
    xstar = euclidean_weber_point(inst.points)
    r = locate_point(inst.sub, xstar)
    total = 0.0
    paths = []
    for l, x in enumerate(inst.points):
        seq = segment_induced_path(inst.sub, x, xstar, inst.graph,
                                   start=inst.regions[l], end=r).regions
        v, _ = path_socp(inst.sub, inst.graph, seq, x, xstar)
        total += inst.weights[l] * v
        paths.append(seq)
    return total, r, xstar, paths


# ranking ----------------------------------------------------------------------------------

def min_total_distance(vertices, anchors):
    """``min_{x in conv(vertices)} sum_a ||a - x||_2``."""
    V = np.asarray(vertices, float)
    m = ConicModel()
    lam = [m.add_var(f"lambda[{k}]", lb=0.0) for k in range(len(V))]
    m.add_linear(Expr({h: 1.0 for h in lam}), "=", 1.0)
    x = combo(lam, V)
    obj = Expr()
    for l, a in enumerate(np.atleast_2d(anchors)):
        d = m.add_var(f"d[{l}]", lb=0.0)
        add_norm_constraint(m, "2", x, [Expr.constant(v) for v in a], Expr.var(d), f"dist{l}:")
        obj.iadd(Expr.var(d))
    m.set_objective(obj)
    sol = solve_relaxation(m.freeze())
    if not sol.optimal:
        raise NumericalTrouble("distance program failed")
    return sol.objective


def rank_regions(sub, anchors):
    """Region indices sorted by decreasing total Euclidean distance to ``anchors``.

    Ties keep the lower index first.
    """
    score = [min_total_distance(sub[i].polytope.vertices, anchors) for i in range(sub.m)]
    return sorted(range(sub.m), key=lambda i: (-score[i], i)), score


def resolve_m_star(m_star, m):
    """Accept an int, ``"all"``, or ``"auto"`` (one tenth of the regions, rounded up)."""
    if m_star == "all":
        return m
    if m_star == "auto":
        return math.ceil(m / 10)
    k = int(m_star)
    if k < 0 or k > m:
        raise ValueError(f"m_star must lie in [0, {m}]")
    return k


# elimination --------------------------------------------------------------------------------

def _sweep(mr, candidates, forcing_row, ub, threads):
    def bound(i):
        mi = mr.copy()
        expr, rhs = forcing_row(i)
        mi.add_linear(expr, "=", rhs, f"force[{i}]")
        try:
            sol = solve_relaxation(mi.freeze())
        except NumericalTrouble as exc:
            log.warning("region %d skipped: %s", i, exc)
            return None
        if sol.status == INFEASIBLE:
            return np.inf
        if not sol.optimal:
            return None
        return sol.objective

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            values = list(pool.map(bound, candidates))
    else:
        values = [bound(i) for i in candidates]
    bounds, skipped, out = {}, [], []
    for i, v in zip(candidates, values):
        if v is None:
            skipped.append(i)
            continue
        bounds[i] = v
        if v > ub + max(config.ELIMINATION_MARGIN, config.ELIMINATION_REL_MARGIN * abs(ub)):
            out.append(i)
    return sorted(out), bounds, sorted(skipped)


def preprocess_spp(inst: SppInstance, m_star, instance_id="", threads=1) -> EliminationList:
    """Regions that no shortest path visits, detected from forced-visit relaxations."""
    t0 = time.perf_counter()
    k = resolve_m_star(m_star, inst.m)
    if inst.s == inst.t:
        return EliminationList(instance_id, [], {}, np.nan, seconds=time.perf_counter() - t0)
    try:
        ub, _ = spp_upper_bound(inst)
    except (DegenerateCrossing, InvalidPath, NumericalTrouble) as exc:
        log.warning("no upper bound, nothing eliminated: %s", exc)
        return EliminationList(instance_id, [], {}, np.inf, seconds=time.perf_counter() - t0)
    ranking, _ = rank_regions(inst.sub, np.vstack([inst.xs, inst.xt]))
    model, atlas = build_spp_f2(inst)
    mr = relax(model)
    z = atlas.path.z

    def forcing_row(i):
        row = Expr({h: 1.0 for a, h in z.items() if a[1] == i})
        return row, 1.0 - (1.0 if i == inst.s else 0.0)

    out, bounds, skipped = _sweep(mr, ranking[:k], forcing_row, ub, threads)
    return EliminationList(instance_id, out, bounds, ub, ranking, skipped,
                           time.perf_counter() - t0)


def preprocess_locp(inst: WeberInstance, m_star, instance_id="", threads=1) -> EliminationList:
    """Regions where placing the facility cannot be optimal."""
    t0 = time.perf_counter()
    k = resolve_m_star(m_star, inst.m)
    try:
        ub, *_ = weber_upper_bound(inst)
    except (DegenerateCrossing, InvalidPath, NumericalTrouble) as exc:
        log.warning("no upper bound, nothing eliminated: %s", exc)
        return EliminationList(instance_id, [], {}, np.inf, seconds=time.perf_counter() - t0)
    ranking, _ = rank_regions(inst.sub, inst.points)
    model, atlas = build_locp_f2(inst)
    mr = relax(model)

    def forcing_row(i):
        return Expr.var(atlas.u[i]), 1.0

    out, bounds, skipped = _sweep(mr, ranking[:k], forcing_row, ub, threads)
    return EliminationList(instance_id, out, bounds, ub, ranking, skipped,
                           time.perf_counter() - t0)
