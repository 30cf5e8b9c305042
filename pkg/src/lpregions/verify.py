"""Optimality certificates for computed paths and relaxation-bound checks.

At a locally optimal gate ``b`` between regions ``i`` and ``j`` the weighted
polar directions of the incoming and outgoing legs balance along every
direction tangent to the smallest face of ``F_ij`` containing ``b`` (a
refraction law for lp norms).  Because that condition needs differentiable
norms, each gate is also re-optimized on its own as a universal check.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from . import config
from .errors import PointNotInFace, UnsupportedExponent, VerificationFailed
from .formulations import (SppInstance, WeberInstance, build_locp_f1, build_locp_f2,
                           build_spp_f1, build_spp_f2, same_region_value)
from .geometry import Polytope
from .model import ConicModel, Expr, add_norm_constraint, combo, relax
from .norms import as_pnorm, lp_norm, polar_vector
from .solver.ipm import solve_relaxation

DOMINANCE_TOL = 1e-7


# active faces ---------------------------------------------------------------------------

def _combination_lp(V, b, objective, tol):
    """``max objective . (lambda, t)`` over convex combinations of ``V`` equal to ``b``.

    The last variable ``t`` is a lower bound on every ``lambda``.
    """
    k, d = V.shape
    # |V^T lambda - b| <= tol, sum lambda = 1, t <= lambda
    A_ub = np.vstack([np.hstack([V.T, np.zeros((d, 1))]),
                      np.hstack([-V.T, np.zeros((d, 1))]),
                      np.hstack([-np.eye(k), np.ones((k, 1))])])
    b_ub = np.concatenate([b + tol, -(b - tol), np.zeros(k)])
    A_eq = np.hstack([np.ones((1, k)), np.zeros((1, 1))])
    bounds = [(0, None)] * k + [(None, None)]
    res = linprog(-objective, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=bounds,
                  method="highs")
    return res


def active_face(F: Polytope, b, tol=config.FACE_TOL) -> Polytope:
    """The face of ``F`` holding ``b`` in its relative interior.

    An extreme point belongs to that face exactly when some convex
    representation of ``b`` gives it a positive coefficient.
    """
    V = F.vertices
    b = np.asarray(b, float)
    k = len(V)
    if k == 1:
        if np.max(np.abs(V[0] - b)) > tol:
            raise PointNotInFace("point is not in the face")
        return F
    # one LP maximizing the smallest coefficient settles the interior case
    c = np.zeros(k + 1)
    c[-1] = 1.0
    res = _combination_lp(V, b, c, tol)
    if res.status == 2:
        raise PointNotInFace("point is not in the face")
    if res.status != 0:
        raise PointNotInFace(f"face membership LP failed: {res.message}")
    if res.x[-1] > tol:
        return F
    keep = []
    for e in range(k):
        c = np.zeros(k + 1)
        c[e] = 1.0
        res = _combination_lp(V, b, c, tol)
        if res.status == 0 and res.x[e] > tol:
            keep.append(e)
    if not keep:
        raise PointNotInFace("point is not in the face")
    return Polytope(V[keep], prune=False)


def tangent_basis(face: Polytope, rank_tol=1e-9):
    """Orthonormal basis (rows) of the direction space of ``aff(face)``."""
    V = face.vertices
    if len(V) < 2:
        return np.zeros((0, V.shape[1]))
    D = V[1:] - V[0]
    _, s, vt = np.linalg.svd(D, full_matrices=False)
    r = int(np.sum(s > rank_tol * max(1.0, s[0])))
    return vt[:r]


# Snell residuals --------------------------------------------------------------------------

@dataclass
class GateContext:
    a: np.ndarray  # incoming breaking point
    b: np.ndarray  # gate
    c: np.ndarray  # outgoing breaking point
    i: int
    j: int
    face: Polytope
    active: Polytope
    basis: np.ndarray

    @classmethod
    def create(cls, a, b, c, i, j, face):
        act = active_face(face, b)
        return cls(np.asarray(a, float), np.asarray(b, float), np.asarray(c, float), i, j,
                   face, act, tangent_basis(act))


def _unit_polar(v, p):
    u = polar_vector(v, p)
    return u / lp_norm(u, p.dual())


def snell_residual(ctx: GateContext, p_i, p_j, w_i, w_j) -> float:
    """Largest tangential imbalance of the weighted polar directions, over ``w_i + w_j``.

    Zero when the active face is a vertex, since there is no tangent direction.
    """
    p_i, p_j = as_pnorm(p_i), as_pnorm(p_j)
    for p in (p_i, p_j):
        if not p.is_smooth:
            raise UnsupportedExponent(f"refraction residual needs 1 < p < inf, got {p}")
    if len(ctx.basis) == 0:
        return 0.0
    g = w_i * _unit_polar(ctx.b - ctx.a, p_i) - w_j * _unit_polar(ctx.c - ctx.b, p_j)
    return float(np.max(np.abs(ctx.basis @ g)) / (w_i + w_j))


def best_gate(face: Polytope, a, c, p_i, p_j, w_i, w_j):
    """``min_{y in face} w_i ||y - a||_{p_i} + w_j ||c - y||_{p_j}``; returns ``(value, y)``."""
    m = ConicModel()
    lam = [m.add_var(f"lambda[{k}]", lb=0.0) for k in range(len(face))]
    m.add_linear(Expr({h: 1.0 for h in lam}), "=", 1.0)
    y = combo(lam, face.vertices)
    di = m.add_var("d_in", lb=0.0)
    dj = m.add_var("d_out", lb=0.0)
    add_norm_constraint(m, p_i, y, [Expr.constant(v) for v in a], Expr.var(di), "in:")
    add_norm_constraint(m, p_j, [Expr.constant(v) for v in c], y, Expr.var(dj), "out:")
    m.set_objective(Expr({di: w_i, dj: w_j}))
    sol = solve_relaxation(m.freeze())
    yv = face.vertices.T @ sol.x[lam]
    value = w_i * lp_norm(yv - a, p_i) + w_j * lp_norm(c - yv, p_j)
    return value, yv


@dataclass
class GateCheck:
    index: int
    regions: tuple
    face_dim: int
    residual: float | None  # None when an exponent is 1 or inf, or a leg is empty
    improvement: float


@dataclass
class OptimalityReport:
    passed: bool
    snell_tol: float
    improve_tol: float
    gates: list = field(default_factory=list)

    @property
    def max_residual(self):
        vals = [g.residual for g in self.gates if g.residual is not None]
        return max(vals, default=0.0)

    @property
    def max_improvement(self):
        return max((g.improvement for g in self.gates), default=0.0)

    def to_json(self):
        return dict(passed=self.passed, snell_tol=self.snell_tol, improve_tol=self.improve_tol,
                    max_residual=self.max_residual, max_improvement=self.max_improvement,
                    gates=[dict(index=g.index, regions=list(g.regions), face_dim=g.face_dim,
                                residual=g.residual, improvement=g.improvement)
                           for g in self.gates])


def verify_path_optimality(inst: SppInstance, sol, tol=1e-5, improve_tol=1e-6):
    """Refraction residual and single-gate re-optimization at every gate of ``sol``.

    ``improve_tol`` is relative to the path value.
    """
    sub, graph = inst.sub, inst.graph
    pts = sol.breaking_points
    checks = []
    ok = True
    limit = improve_tol * max(1.0, abs(sol.value))
    for k, (i, j) in enumerate(zip(sol.regions[:-1], sol.regions[1:])):
        a, b, c = pts[k], pts[k + 1], pts[k + 2]
        F = graph.face(i, j)
        ri, rj = sub[i], sub[j]
        ctx = GateContext.create(a, b, c, i, j, F)
        res = None
        smooth = ri.p.is_smooth and rj.p.is_smooth
        if smooth and np.linalg.norm(b - a) > 1e-12 and np.linalg.norm(c - b) > 1e-12:
            res = snell_residual(ctx, ri.p, rj.p, ri.weight, rj.weight)
            ok &= res <= tol
        here = ri.weight * lp_norm(b - a, ri.p) + rj.weight * lp_norm(c - b, rj.p)
        best, _ = best_gate(F, a, c, ri.p, rj.p, ri.weight, rj.weight)
        imp = max(0.0, here - best)
        ok &= imp <= limit
        checks.append(GateCheck(k, (i, j), ctx.active.affine_dim, res, imp))
    return OptimalityReport(bool(ok), tol, improve_tol, checks)


# relaxation dominance ----------------------------------------------------------------------

def relaxation_bound(model):
    sol = solve_relaxation(relax(model).freeze())
    if not sol.optimal:
        raise VerificationFailed(f"relaxation ended with status {sol.status}")
    return sol.objective


def dominance_check(inst, tol=DOMINANCE_TOL):
    """Continuous relaxation values ``(aggregated, disaggregated)``.

    The disaggregated bound is never weaker; a violation beyond ``tol`` raises
    :class:`VerificationFailed`.
    """
    if isinstance(inst, WeberInstance):
        zeta = relaxation_bound(build_locp_f1(inst)[0])
        zeta2 = relaxation_bound(build_locp_f2(inst)[0])
    elif inst.s == inst.t:
        v = same_region_value(inst)
        return v, v
    else:
        zeta = relaxation_bound(build_spp_f1(inst)[0])
        zeta2 = relaxation_bound(build_spp_f2(inst)[0])
    if zeta > zeta2 + tol:
        raise VerificationFailed(f"aggregated bound {zeta} exceeds disaggregated {zeta2}")
    return zeta, zeta2


# non-metric demonstration ---------------------------------------------------------------

@dataclass
class TriangleReport:
    d_st: float
    d_su: float
    d_ut: float

    @property
    def violated(self):
        return self.d_st > self.d_su + self.d_ut

    def to_json(self):
        return dict(d_st=self.d_st, d_su=self.d_su, d_ut=self.d_ut, violated=self.violated)


def triangle_violation_demo(cfg=None) -> TriangleReport:
    """Shortest simple paths on three weighted l1 strips break the triangle inequality."""
    from .fixtures import TRIANGLE_POINTS, strips_l1
    from .pipeline import solve_spp
    from .solver.bnb import SolveConfig

    cfg = cfg or SolveConfig(rel_gap_tol=1e-9)
    sub = strips_l1()
    xs, xu, xt = (TRIANGLE_POINTS[k] for k in ("s", "u", "t"))

    def dist(a, b):
        return solve_spp(SppInstance.create(sub, a, b), "f2", cfg).report.ub

    return TriangleReport(dist(xs, xt), dist(xs, xu), dist(xu, xt))
