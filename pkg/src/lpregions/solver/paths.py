"""Shortest path along a fixed region sequence, and the exhaustive oracle."""
from __future__ import annotations

import networkx as nx
import numpy as np

from ..errors import InvalidPath, NumericalTrouble, TooManyPaths
from ..model import ConicModel, Expr, add_norm_constraint, combo
from ..norms import lp_norm
from .ipm import solve_relaxation


def path_socp(sub, graph, regions, a, b):
    """Optimal gates for travelling ``a -> b`` through ``regions`` in order.

    Returns ``(value, gates)``.
    """
    regions = list(regions)
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if len(regions) != len(set(regions)):
        raise InvalidPath("region sequence is not simple")
    for i, j in zip(regions[:-1], regions[1:]):
        if not graph.has_edge(i, j):
            raise InvalidPath(f"regions {i} and {j} are not adjacent")
    if len(regions) == 1:
        r = sub[regions[0]]
        return r.weight * lp_norm(b - a, r.p), []
    m = ConicModel()
    gates = []
    for i, j in zip(regions[:-1], regions[1:]):
        F = graph.face(i, j)
        lam = [m.add_var(f"lambda[{i},{j},{k}]", lb=0.0) for k in range(len(F))]
        m.add_linear(Expr({h: 1.0 for h in lam}), "=", 1.0)
        gates.append((lam, F.vertices))
    pts = [[Expr.constant(v) for v in a]] + [combo(l, V) for l, V in gates] \
        + [[Expr.constant(v) for v in b]]
    obj = Expr()
    for k, r in enumerate(regions):
        d = m.add_var(f"d[{r}]", lb=0.0)
        add_norm_constraint(m, sub[r].p, pts[k + 1], pts[k], Expr.var(d), f"leg{k}:")
        obj.iadd(Expr.var(d), sub[r].weight)
    m.set_objective(obj)
    sol = solve_relaxation(m)
    if not sol.optimal:
        raise NumericalTrouble(f"fixed-path program ended with status {sol.status}")
    out = [V.T @ sol.x[lam] for lam, V in gates]
    # report the length of the decoded polyline, not the solver's epigraph value
    pts = [a, *out, b]
    value = sum(sub[r].weight * lp_norm(pts[k + 1] - pts[k], sub[r].p)
                for k, r in enumerate(regions))
    return float(value), out


def fixed_path_eval(inst, regions):
    """Length of the best path from ``inst.xs`` to ``inst.xt`` along ``regions``."""
    regions = list(regions)
    if not regions or regions[0] != inst.s or regions[-1] != inst.t:
        raise InvalidPath("path must start in the source region and end in the target region")
    return path_socp(inst.sub, inst.graph, regions, inst.xs, inst.xt)


def simple_paths(graph, s, t, max_paths):
    if s == t:
        return [[s]]
    out = []
    for p in nx.all_simple_paths(graph.to_networkx(), s, t):
        out.append(p)
        if len(out) > max_paths:
            raise TooManyPaths(f"more than {max_paths} simple paths")
    return out


def brute_force_spp(inst, max_paths=5000):
    """Minimum of :func:`fixed_path_eval` over every simple region path.

    Returns ``(value, best_path, best_gates)``.
    """
    best = (np.inf, None, None)
    for p in sorted(simple_paths(inst.graph, inst.s, inst.t, max_paths)):
        v, g = fixed_path_eval(inst, p)
        if v < best[0] - 1e-12:
            best = (v, p, g)
    return best
