"""Mixed-integer conic formulations of the shortest-path and Weber problems.

Binary arc variables ``z[i, j]`` pick an ordered sequence of regions; gate
points on the shared faces are convex combinations ``sum_e lambda[i, j, e] e``
of the face's extreme points, so a gate exists only on arcs with
``z[i, j] = 1``.  Each region pays its weight times the lp length of the
segment it contains.

Two variants are built for each problem.  The aggregated one (``f1``) writes
one norm term per region.  The disaggregated one (``f2``) splits the term of
an interior region over every (incoming arc, outgoing arc) pair through
flow-consistent product variables, which gives a tighter continuous
relaxation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .errors import DisconnectedGraph, InvalidPath, MissingFaceNorm
from .geometry import (AdjacencyGraph, Polytope, Region, Subdivision, adjacency_graph,
                       locate_point)
from .model import ConicModel, Expr, add_norm_constraint, combo
from .norms import as_pnorm, lp_norm


# instances ------------------------------------------------------------------------

@dataclass
class SppInstance:
    sub: Subdivision
    graph: AdjacencyGraph
    xs: np.ndarray
    xt: np.ndarray
    s: int
    t: int
    # regions from this index on overlay the ones before it (set by the transforms)
    overlay_from: int | None = None

    @classmethod
    def create(cls, sub, xs, xt, graph=None, facet_only=False, s=None, t=None):
        xs = np.asarray(xs, float)
        xt = np.asarray(xt, float)
        graph = graph if graph is not None else adjacency_graph(sub, facet_only)
        s = locate_point(sub, xs) if s is None else s
        t = locate_point(sub, xt) if t is None else t
        return cls(sub, graph, xs, xt, s, t)

    @property
    def m(self):
        return self.sub.m


@dataclass
class WeberInstance:
    sub: Subdivision
    graph: AdjacencyGraph
    points: np.ndarray
    weights: np.ndarray
    regions: list

    @classmethod
    def create(cls, sub, points, weights=None, graph=None, facet_only=False):
        pts = np.atleast_2d(np.asarray(points, float))
        w = np.ones(len(pts)) if weights is None else np.asarray(weights, float)
        if len(pts) < 1:
            raise ValueError("need at least one demand point")
        if np.any(w <= 0):
            raise ValueError("demand weights must be positive")
        graph = graph if graph is not None else adjacency_graph(sub, facet_only)
        return cls(sub, graph, pts, w, [locate_point(sub, x) for x in pts])

    @property
    def m(self):
        return self.sub.m

    @property
    def n(self):
        return len(self.points)


# atlas ----------------------------------------------------------------------------

@dataclass
class PathAtlas:
    """Handles of one shortest-path block (the whole SPP, or one Weber demand)."""

    z: dict = field(default_factory=dict)  # (i, j) -> handle
    lam: dict = field(default_factory=dict)  # (i, j) -> [handle per Ext(F_ij)]
    d: dict = field(default_factory=dict)  # i -> handle
    rho: dict = field(default_factory=dict)  # (h, i, j) -> handle
    phi: dict = field(default_factory=dict)  # (h, i, j) -> [handle per Ext(F_hi)]
    psi: dict = field(default_factory=dict)  # (h, i, j) -> [handle per Ext(F_ij)]
    ups: dict = field(default_factory=dict)  # (h, i) -> [handle per Ext(F_hi)]
    theta: dict = field(default_factory=dict)  # (h, i) -> [handle per Ext(P_i)]
    terms: dict = field(default_factory=dict)  # key -> epigraph handle of one norm term


@dataclass
class VariableAtlas:
    kind: str  # "spp-f1", "spp-f2", "locp-f1", "locp-f2"
    path: PathAtlas | None = None
    demands: list = field(default_factory=list)  # PathAtlas per demand (Weber)
    u: dict = field(default_factory=dict)  # i -> handle
    mu: dict = field(default_factory=dict)  # i -> [handle per Ext(P_i)]

    def families(self):
        blocks = [self.path] if self.path is not None else self.demands
        out = {}
        for name in ("z", "lam", "d", "rho", "phi", "psi", "ups", "theta"):
            out[name] = [getattr(b, name) for b in blocks]
        out["u"] = self.u
        out["mu"] = self.mu
        return out


# shared pieces --------------------------------------------------------------------

def _check_connected(graph, a, b):
    if not nx.has_path(graph.to_networkx(), a, b):
        raise DisconnectedGraph(f"no path between regions {a} and {b}")


def _arc_vars(m, graph, atlas, tag, exclude=()):
    for i, j in graph.arcs:
        if i in exclude or j in exclude:
            continue
        F = graph.face(i, j)
        atlas.z[(i, j)] = m.add_var(f"z{tag}[{i},{j}]", binary=True)
        atlas.lam[(i, j)] = [m.add_var(f"lambda{tag}[{i},{j},{k}]", lb=0.0)
                             for k in range(len(F))]
        m.add_linear(Expr({h: 1.0 for h in atlas.lam[(i, j)]}) - Expr.var(atlas.z[(i, j)]),
                     "=", 0.0, f"couple{tag}[{i},{j}]")


def _in_out(atlas, i):
    ins = [a for a in atlas.z if a[1] == i]
    outs = [a for a in atlas.z if a[0] == i]
    return ins, outs


def _sum_z(atlas, arcs):
    return Expr({atlas.z[a]: 1.0 for a in arcs})


def _gate(graph, atlas, arcs):
    """``sum over arcs of sum_e lambda e`` as a coordinate list."""
    out = None
    for a in arcs:
        g = combo(atlas.lam[a], graph.face(*a).vertices)
        out = g if out is None else [x + y for x, y in zip(out, g)]
    return out


def _zero(d):
    return [Expr() for _ in range(d)]


def _point_times(x, handle):
    return [Expr({handle: float(v)}) for v in x]


def _const(x):
    return [Expr.constant(float(v)) for v in x]


def _term(m, atlas, key, label):
    h = m.add_var(f"dterm{label}", lb=0.0)
    atlas.terms[key] = h
    return h


def _pair_blocks(m, graph, sub, atlas, i, tag):
    """F2 product variables and norm terms at interior region ``i``.

    Returns the list of term handles.
    """
    ins, outs = _in_out(atlas, i)
    terms = []
    for (h, _), (_, j) in itertools.product(ins, outs):
        Fhi = graph.face(h, i)
        Fij = graph.face(i, j)
        key = (h, i, j)
        atlas.rho[key] = m.add_var(f"rho{tag}[{h},{i},{j}]", lb=0.0)
        atlas.phi[key] = [m.add_var(f"Phi{tag}[{h},{i},{j},{k}]", lb=0.0)
                          for k in range(len(Fhi))]
        atlas.psi[key] = [m.add_var(f"Psi{tag}[{h},{i},{j},{k}]", lb=0.0)
                          for k in range(len(Fij))]
        m.add_linear(Expr({v: 1.0 for v in atlas.phi[key]}) - Expr.var(atlas.rho[key]), "=", 0.0,
                     f"phisum{tag}[{h},{i},{j}]")
        m.add_linear(Expr({v: 1.0 for v in atlas.psi[key]}) - Expr.var(atlas.rho[key]), "=", 0.0,
                     f"psisum{tag}[{h},{i},{j}]")
        th = _term(m, atlas, key, f"{tag}[{h},{i},{j}]")
        add_norm_constraint(m, sub[i].p, combo(atlas.psi[key], Fij.vertices),
                            combo(atlas.phi[key], Fhi.vertices), Expr.var(th),
                            f"pair{tag}[{h},{i},{j}]:")
        terms.append(th)
    return ins, outs, terms


def _pair_links(m, graph, atlas, i, ins, outs, tag, theta=None, ups=None):
    """Linking rows tying rho/Phi/Psi (and optionally Theta/Upsilon) to z and lambda."""
    for (h, _) in ins:
        row = Expr({atlas.rho[(h, i, j)]: 1.0 for (_, j) in outs})
        if theta is not None:
            row.iadd(Expr({v: 1.0 for v in theta[(h, i)]}))
        m.add_linear(row - Expr.var(atlas.z[(h, i)]), "=", 0.0, f"rhoin{tag}[{h},{i}]")
        for k, lam in enumerate(atlas.lam[(h, i)]):
            row = Expr({atlas.phi[(h, i, j)][k]: 1.0 for (_, j) in outs})
            if ups is not None:
                row.iadd(Expr.var(ups[(h, i)][k]))
            m.add_linear(row - Expr.var(lam), "=", 0.0, f"philam{tag}[{h},{i},{k}]")
    for (_, j) in outs:
        row = Expr({atlas.rho[(h, i, j)]: 1.0 for (h, _) in ins})
        m.add_linear(row - Expr.var(atlas.z[(i, j)]), "=", 0.0, f"rhoout{tag}[{i},{j}]")
        for k, lam in enumerate(atlas.lam[(i, j)]):
            row = Expr({atlas.psi[(h, i, j)][k]: 1.0 for (h, _) in ins})
            m.add_linear(row - Expr.var(lam), "=", 0.0, f"psilam{tag}[{i},{j},{k}]")


# shortest path ---------------------------------------------------------------------

def same_region_value(inst: SppInstance) -> float:
    """Closed-form length when source and target share a region (weight included)."""
    r = inst.sub[inst.s]
    return r.weight * lp_norm(inst.xt - inst.xs, r.p)


def _spp_common(inst: SppInstance, tag="", exclude=()):
    exclude = set(exclude) - {inst.s, inst.t}
    if inst.s == inst.t:
        raise ValueError("source and target share a region; use same_region_value")
    _check_connected(inst.graph, inst.s, inst.t)
    m = ConicModel()
    atlas = PathAtlas()
    _arc_vars(m, inst.graph, atlas, tag, exclude)
    for i in range(inst.m):
        if i in exclude:
            continue
        atlas.d[i] = m.add_var(f"d{tag}[{i}]", lb=0.0)
    for i in range(inst.m):
        if i in exclude:
            continue
        ins, outs = _in_out(atlas, i)
        rhs = 1.0 if i == inst.s else (-1.0 if i == inst.t else 0.0)
        m.add_linear(_sum_z(atlas, outs) - _sum_z(atlas, ins), "=", rhs, f"flow[{i}]")
        if ins:
            m.add_linear(_sum_z(atlas, ins), "<=", 1.0, f"indeg[{i}]")
        if outs:
            m.add_linear(_sum_z(atlas, outs), "<=", 1.0, f"outdeg[{i}]")
    m.set_objective(Expr({atlas.d[i]: inst.sub[i].weight for i in atlas.d}))
    return m, atlas


def build_spp_f1(inst: SppInstance, exclude=()):
    """Aggregated formulation: one norm term per region.

    Regions in ``exclude`` (for example, eliminated by preprocessing) are left
    out together with their arcs.
    """
    m, atlas = _spp_common(inst, exclude=exclude)
    d = inst.sub.dim
    for i in atlas.d:
        ins, outs = _in_out(atlas, i)
        out_g = _gate(inst.graph, atlas, outs) if outs else _zero(d)
        in_g = _gate(inst.graph, atlas, ins) if ins else _zero(d)
        if i == inst.s:
            X, Y = out_g, _const(inst.xs)
        elif i == inst.t:
            X, Y = _const(inst.xt), in_g
        else:
            X, Y = out_g, in_g
        add_norm_constraint(m, inst.sub[i].p, X, Y, Expr.var(atlas.d[i]), f"norm[{i}]:")
    return m.freeze(), VariableAtlas("spp-f1", path=atlas)


def build_spp_f2(inst: SppInstance, exclude=()):
    """Disaggregated formulation: one norm term per arc at the terminals and per
    (incoming, outgoing) arc pair at every other region."""
    m, atlas = _spp_common(inst, exclude=exclude)
    sub, graph = inst.sub, inst.graph
    for i in atlas.d:
        ins, outs = _in_out(atlas, i)
        if i == inst.s:
            terms = []
            for a in outs:
                th = _term(m, atlas, a, f"[{a[0]},{a[1]}]")
                add_norm_constraint(m, sub[i].p, combo(atlas.lam[a], graph.face(*a).vertices),
                                    _point_times(inst.xs, atlas.z[a]), Expr.var(th),
                                    f"src[{a[0]},{a[1]}]:")
                terms.append(th)
        elif i == inst.t:
            terms = []
            for a in ins:
                th = _term(m, atlas, a, f"[{a[0]},{a[1]}]")
                add_norm_constraint(m, sub[i].p, _point_times(inst.xt, atlas.z[a]),
                                    combo(atlas.lam[a], graph.face(*a).vertices), Expr.var(th),
                                    f"dst[{a[0]},{a[1]}]:")
                terms.append(th)
        else:
            ins, outs, terms = _pair_blocks(m, graph, sub, atlas, i, "")
            _pair_links(m, graph, atlas, i, ins, outs, "")
        m.add_linear(Expr.var(atlas.d[i]) - Expr({h: 1.0 for h in terms}), ">=", 0.0,
                     f"dsum[{i}]")
    return m.freeze(), VariableAtlas("spp-f2", path=atlas)


# Weber location -----------------------------------------------------------------------

def _locp_common(inst: WeberInstance, exclude=(), fix_u=None):
    _check_connected_all(inst)
    m = ConicModel()
    atlas = VariableAtlas("")
    for i in range(inst.m):
        atlas.u[i] = m.add_var(f"u[{i}]", binary=True)
        atlas.mu[i] = [m.add_var(f"mu[{i},{k}]", lb=0.0)
                       for k in range(len(inst.sub[i].polytope))]
        m.add_linear(Expr({h: 1.0 for h in atlas.mu[i]}) - Expr.var(atlas.u[i]), "=", 0.0,
                     f"musum[{i}]")
    m.add_linear(Expr({atlas.u[i]: 1.0 for i in atlas.u}), "=", 1.0, "one_facility")
    for i in exclude:
        m.add_linear(Expr.var(atlas.u[i]), "=", 0.0, f"excluded[{i}]")
    if fix_u is not None:
        m.add_linear(Expr.var(atlas.u[fix_u]), "=", 1.0, f"forced[{fix_u}]")

    obj = Expr()
    for l in range(inst.n):
        tag = f"^{l}"
        pa = PathAtlas()
        _arc_vars(m, inst.graph, pa, tag)
        sl = inst.regions[l]
        for i in range(inst.m):
            pa.d[i] = m.add_var(f"d{tag}[{i}]", lb=0.0)
            obj.iadd(Expr.var(pa.d[i]), inst.weights[l] * inst.sub[i].weight)
        us = Expr.var(atlas.u[sl])
        for i in range(inst.m):
            ins, outs = _in_out(pa, i)
            flow = _sum_z(pa, outs) - _sum_z(pa, ins)
            if i == sl:
                m.add_linear(flow + us, "=", 1.0, f"flow{tag}[{i}]")
            else:
                m.add_linear(flow + Expr.var(atlas.u[i]), "=", 0.0, f"flow{tag}[{i}]")
            if ins:
                m.add_linear(_sum_z(pa, ins) + us, "<=", 1.0, f"indeg{tag}[{i}]")
            if outs:
                m.add_linear(_sum_z(pa, outs) + us, "<=", 1.0, f"outdeg{tag}[{i}]")
        atlas.demands.append(pa)
    m.set_objective(obj)
    return m, atlas


def _check_connected_all(inst):
    g = inst.graph.to_networkx()
    if not nx.is_connected(g):
        # every region is a candidate facility site, so every demand must reach it
        raise DisconnectedGraph("adjacency graph is not connected")


def build_locp_f1(inst: WeberInstance, exclude=(), fix_u=None):
    """Aggregated Weber formulation.

    ``exclude`` fixes ``u_i = 0`` for the listed regions; ``fix_u`` forces the
    facility into one region.
    """
    m, atlas = _locp_common(inst, exclude, fix_u)
    sub, graph = inst.sub, inst.graph
    d = sub.dim
    for l, pa in enumerate(atlas.demands):
        sl = inst.regions[l]
        for i in range(inst.m):
            ins, outs = _in_out(pa, i)
            fac = combo(atlas.mu[i], sub[i].polytope.vertices)
            out_g = _gate(graph, pa, outs) if outs else _zero(d)
            X = [a + b for a, b in zip(fac, out_g)]
            if i == sl:
                Y = _const(inst.points[l])
            else:
                Y = _gate(graph, pa, ins) if ins else _zero(d)
            add_norm_constraint(m, sub[i].p, X, Y, Expr.var(pa.d[i]), f"norm^{l}[{i}]:")
    atlas.kind = "locp-f1"
    return m.freeze(), atlas


def build_locp_f2(inst: WeberInstance, exclude=(), fix_u=None):
    """Disaggregated Weber formulation with per-pair and facility-arrival terms."""
    m, atlas = _locp_common(inst, exclude, fix_u)
    sub, graph = inst.sub, inst.graph
    for l, pa in enumerate(atlas.demands):
        tag = f"^{l}"
        sl = inst.regions[l]
        x = inst.points[l]
        for i in range(inst.m):
            P = sub[i].polytope
            ins, outs = _in_out(pa, i)
            if i == sl:
                terms = []
                for a in outs:
                    th = _term(m, pa, a, f"{tag}[{a[0]},{a[1]}]")
                    add_norm_constraint(m, sub[i].p, combo(pa.lam[a], graph.face(*a).vertices),
                                        _point_times(x, pa.z[a]), Expr.var(th),
                                        f"src{tag}[{a[0]},{a[1]}]:")
                    terms.append(th)
                th = _term(m, pa, ("fac", i), f"{tag}[fac]")
                add_norm_constraint(m, sub[i].p, combo(atlas.mu[i], P.vertices),
                                    _point_times(x, atlas.u[i]), Expr.var(th), f"fac{tag}:")
                terms.append(th)
            else:
                ins, outs, terms = _pair_blocks(m, graph, sub, pa, i, tag)
                for (h, _) in ins:
                    Fhi = graph.face(h, i)
                    pa.ups[(h, i)] = [m.add_var(f"Upsilon{tag}[{h},{i},{k}]", lb=0.0)
                                      for k in range(len(Fhi))]
                    pa.theta[(h, i)] = [m.add_var(f"Theta{tag}[{h},{i},{k}]", lb=0.0)
                                        for k in range(len(P))]
                    th = _term(m, pa, ("arrive", h, i), f"{tag}[{h},{i},fac]")
                    add_norm_constraint(m, sub[i].p, combo(pa.theta[(h, i)], P.vertices),
                                        combo(pa.ups[(h, i)], Fhi.vertices), Expr.var(th),
                                        f"arrive{tag}[{h},{i}]:")
                    terms.append(th)
                _pair_links(m, graph, pa, i, ins, outs, tag, theta=pa.theta, ups=pa.ups)
                u = Expr.var(atlas.u[i])
                if ins:
                    m.add_linear(Expr({v: 1.0 for (h, _) in ins for v in pa.ups[(h, i)]}) - u,
                                 "=", 0.0, f"upssum{tag}[{i}]")
                    m.add_linear(Expr({v: 1.0 for (h, _) in ins for v in pa.theta[(h, i)]}) - u,
                                 "=", 0.0, f"thetasum{tag}[{i}]")
                    for k, mu in enumerate(atlas.mu[i]):
                        m.add_linear(Expr({pa.theta[(h, i)][k]: 1.0 for (h, _) in ins})
                                     - Expr.var(mu), "=", 0.0, f"thetamu{tag}[{i},{k}]")
                else:
                    # no way in: the facility cannot sit here for this demand
                    m.add_linear(u, "=", 0.0, f"noentry{tag}[{i}]")
            m.add_linear(Expr.var(pa.d[i]) - Expr({h: 1.0 for h in terms}), ">=", 0.0,
                         f"dsum{tag}[{i}]")
    atlas.kind = "locp-f2"
    return m.freeze(), atlas


BUILDERS = {
    ("spp", "f1"): build_spp_f1,
    ("spp", "f2"): build_spp_f2,
    ("locp", "f1"): build_locp_f1,
    ("locp", "f2"): build_locp_f2,
}


# decoding ---------------------------------------------------------------------------

@dataclass
class PathSolution:
    regions: list
    gates: list
    breaking_points: list
    lengths: list  # unweighted lp length inside each region of the path
    value: float

    def to_json(self):
        return dict(path=list(map(int, self.regions)),
                    gates=[list(map(float, g)) for g in self.gates],
                    value=float(self.value))


def _follow(atlas, x, start, stop_when):
    seq = [start]
    gates = []
    cur = start
    seen = {start}
    while not stop_when(cur):
        nxt = [a for a in atlas.z if a[0] == cur and x[atlas.z[a]] >= 0.5]
        if len(nxt) != 1:
            raise InvalidPath(f"broken arc chain at region {cur}")
        a = nxt[0]
        seq.append(a[1])
        gates.append(a)
        cur = a[1]
        if cur in seen:
            raise InvalidPath("decoded path revisits a region")
        seen.add(cur)
    return seq, gates


def path_from_gates(sub, regions, a, b, gates) -> PathSolution:
    pts = [np.asarray(a, float), *[np.asarray(g, float) for g in gates], np.asarray(b, float)]
    lengths = [lp_norm(pts[k + 1] - pts[k], sub[r].p) for k, r in enumerate(regions)]
    value = float(sum(sub[r].weight * L for r, L in zip(regions, lengths)))
    return PathSolution(list(regions), [np.asarray(g, float) for g in gates], pts, lengths, value)


def decode_spp(inst: SppInstance, atlas: VariableAtlas, x) -> PathSolution:
    pa = atlas.path
    seq, arcs = _follow(pa, x, inst.s, lambda c: c == inst.t)
    gates = [inst.graph.face(*a).vertices.T @ x[pa.lam[a]] for a in arcs]
    return path_from_gates(inst.sub, seq, inst.xs, inst.xt, gates)


@dataclass
class WeberSolution:
    region: int
    facility: np.ndarray
    paths: list  # PathSolution per demand
    value: float

    def to_json(self):
        return dict(value=float(self.value), facility=list(map(float, self.facility)),
                    region=int(self.region), paths=[p.to_json() for p in self.paths])


def decode_locp(inst: WeberInstance, atlas: VariableAtlas, x) -> WeberSolution:
    i = max(atlas.u, key=lambda k: (x[atlas.u[k]], -k))
    fac = inst.sub[i].polytope.vertices.T @ x[atlas.mu[i]]
    paths = []
    for l, pa in enumerate(atlas.demands):
        seq, arcs = _follow(pa, x, inst.regions[l], lambda c: c == i)
        gates = [inst.graph.face(*a).vertices.T @ x[pa.lam[a]] for a in arcs]
        paths.append(path_from_gates(inst.sub, seq, inst.points[l], fac, gates))
    value = float(sum(w * p.value for w, p in zip(inst.weights, paths)))
    return WeberSolution(i, fac, paths, value)


def path_binaries(atlas: PathAtlas, regions) -> dict:
    """Binary fixings ``z`` that select exactly the arcs of ``regions``."""
    used = set(zip(regions[:-1], regions[1:]))
    return {h: (1.0 if a in used else 0.0) for a, h in atlas.z.items()}


# instance transforms --------------------------------------------------------------------

def rapid_transit_transform(inst: SppInstance, face_norms: dict) -> SppInstance:
    """Append one region per shared face, travelled with its own norm and weight.

    Parameters
    ----------
    face_norms : dict
        ``(i, j) -> (p, weight)`` for every edge of the adjacency graph.
    """
    sub, graph = inst.sub, inst.graph
    regions = list(sub.regions)
    m = sub.m
    new_faces = []
    for i, j in graph.edges:
        spec = face_norms.get((i, j), face_norms.get((j, i)))
        if spec is None:
            raise MissingFaceNorm(f"edge ({i}, {j}) has no norm")
        p, w = spec
        regions.append(Region(graph.face(i, j), as_pnorm(p), float(w)))
        new_faces.append(graph.face(i, j))
    new = Subdivision(tuple(regions), sub.box)
    g = AdjacencyGraph(len(regions))
    # containment, including face regions inside other face regions
    for k, F in enumerate(new_faces):
        fk = m + k
        for i in range(m):
            if F.is_subset_by_vertices(sub[i].polytope):
                g.faces[(i, fk)] = F
        for k2, F2 in enumerate(new_faces):
            if k2 != k and F.is_subset_by_vertices(F2):
                a, b = sorted((fk, m + k2))
                g.faces[(a, b)] = F
    return SppInstance(new, g, inst.xs, inst.xt, inst.s, inst.t, inst.overlay_from or m)


def double_visit_transform(inst: SppInstance) -> SppInstance:
    """Duplicate every region so that each can be entered twice."""
    sub, graph = inst.sub, inst.graph
    m = sub.m
    regions = tuple(sub.regions) + tuple(sub.regions)
    g = AdjacencyGraph(2 * m)
    for i, j in graph.edges:
        F = graph.face(i, j)
        for a, b in ((i, j), (i, m + j), (m + i, j), (m + i, m + j)):
            g.faces[tuple(sorted((a, b)))] = F
    return SppInstance(Subdivision(regions, sub.box), g, inst.xs, inst.xt, inst.s, inst.t,
                       inst.overlay_from or m)


def collapse_doubled(regions, m):
    """Map a path over a doubled instance back to base region indices."""
    return [r % m for r in regions]
