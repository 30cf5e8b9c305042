"""Reference computations that do not go through the package's own conic engine."""
from __future__ import annotations

import cvxpy as cp
import networkx as nx
import numpy as np
from scipy.optimize import minimize


def _cvx_norm(expr, p):
    p = str(p)
    if p == "inf":
        return cp.norm(expr, "inf")
    if p == "1":
        return cp.norm(expr, 1)
    if p == "2":
        return cp.norm(expr, 2)
    num, _, den = p.partition("/")
    return cp.pnorm(expr, float(num) / float(den or 1))


def path_value(inst, regions, a=None, b=None):
    """Best cost along a fixed region sequence, solved with Clarabel through cvxpy.

    Gates are free points constrained to the convex hull of each shared face.
    """
    a = inst.xs if a is None else np.asarray(a, float)
    b = inst.xt if b is None else np.asarray(b, float)
    pts = [a]
    cons = []
    for i, j in zip(regions[:-1], regions[1:]):
        V = inst.graph.face(i, j).vertices
        lam = cp.Variable(len(V), nonneg=True)
        cons.append(cp.sum(lam) == 1)
        pts.append(V.T @ lam)
    pts.append(b)
    cost = 0
    for k, r in enumerate(regions):
        reg = inst.sub[r]
        cost = cost + reg.weight * _cvx_norm(pts[k + 1] - pts[k], reg.p)
    prob = cp.Problem(cp.Minimize(cost), cons)
    prob.solve(solver="CLARABEL")
    return float(prob.value)


def brute_force(inst, limit=20000):
    """``(value, regions)`` minimizing :func:`path_value` over all simple paths."""
    if inst.s == inst.t:
        return path_value(inst, [inst.s]), [inst.s]
    G = inst.graph.to_networkx()
    best = (np.inf, None)
    for k, path in enumerate(nx.all_simple_paths(G, inst.s, inst.t)):
        if k >= limit:
            raise RuntimeError("too many simple paths for the oracle")
        v = path_value(inst, path)
        if v < best[0]:
            best = (v, path)
    return best


def refraction_oracle(step=1e-3):
    """Three-strip refraction cost minimized over the two gate ordinates.

    Grid search at ``step`` resolution followed by a Nelder-Mead polish.
    """
    def f(y):
        y1, y2 = y[..., 0], y[..., 1]
        return (np.hypot(1.0, y1) + 2.0 * np.hypot(2.0, y2 - y1)
                + 3.0 * np.hypot(3.0, 2.0 - y2))

    # the optimum lies in [0, 2]^2 (moving a gate outside that band only adds length)
    coarse = np.arange(0.0, 2.0 + step, 10 * step)
    Y1, Y2 = np.meshgrid(coarse, coarse, indexing="ij")
    F = f(np.stack([Y1, Y2], axis=-1))
    k = np.unravel_index(np.argmin(F), F.shape)
    c = np.array([coarse[k[0]], coarse[k[1]]])
    fine = np.arange(-10 * step, 10 * step + step / 2, step)
    Y1, Y2 = np.meshgrid(c[0] + fine, c[1] + fine, indexing="ij")
    F = f(np.stack([Y1, Y2], axis=-1))
    k = np.unravel_index(np.argmin(F), F.shape)
    y0 = np.array([Y1[k], Y2[k]])
    res = minimize(lambda y: f(np.asarray(y)), y0, method="Nelder-Mead",
                   options=dict(xatol=1e-12, fatol=1e-14, maxiter=10000))
    return float(res.fun), res.x
