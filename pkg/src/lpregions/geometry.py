"""Convex polytopes, polyhedral subdivisions and their adjacency graphs.

Polytopes are stored by their extreme points.  A halfspace description is
derived lazily when membership tests or segment clipping need it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx
import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

from . import config
from .errors import (DegenerateCrossing, DimensionUnsupported, DuplicateSeeds, GeometryError,
                     PointOutsideSubdivision, SeedOutsideBox)
from .norms import PNorm, as_pnorm


def _dedupe(points, tol):
    out = []
    for p in points:
        if all(np.max(np.abs(p - q)) > tol for q in out):
            out.append(p)
    return out


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex hull of a finite point set, kept as its extreme points.

    Non-extreme points in the input are dropped; duplicates closer than
    ``VERTEX_TOL`` are merged.
    """

    vertices: np.ndarray

    def __init__(self, points, prune=True):
        P = np.atleast_2d(np.asarray(points, dtype=float))
        if P.size == 0:
            raise GeometryError("empty polytope")
        P = np.array(_dedupe(list(P), config.VERTEX_TOL))
        if prune and len(P) > 1:
            P = P[_extreme_indices(P)]
        P.setflags(write=False)
        object.__setattr__(self, "vertices", P)

    @property
    def dim(self):
        return self.vertices.shape[1]

    def __len__(self):
        return len(self.vertices)

    @cached_property
    def _affine(self):
        """``(origin, basis)`` of the affine hull; basis rows are orthonormal."""
        P = self.vertices
        o = P[0]
        D = P - o
        if len(P) == 1:
            return o, np.zeros((0, self.dim))
        _, sv, Vt = np.linalg.svd(D, full_matrices=False)
        rank = int(np.sum(sv > 1e-9 * max(1.0, sv[0])))
        return o, Vt[:rank]

    @property
    def affine_dim(self):
        return self._affine[1].shape[0]

    @cached_property
    def halfspaces(self):
        """``(E, f, N, g)``: ``E x <= f`` inside the affine hull, ``N x = g`` for the hull.

        ``E`` rows are unit normals (within the hull's direction space).
        """
        o, B = self._affine
        d = self.dim
        k = B.shape[0]
        # complement of the hull directions gives the equality part
        if k < d:
            _, _, Vt = np.linalg.svd(B if k else np.zeros((1, d)), full_matrices=True)
            N = Vt[k:] if k else np.eye(d)
            g = N @ o
        else:
            N = np.zeros((0, d))
            g = np.zeros(0)
        if k == 0:
            return np.zeros((0, d)), np.zeros(0), N, g
        Q = (self.vertices - o) @ B.T  # coordinates in the hull
        if k == 1:
            lo, hi = Q[:, 0].min(), Q[:, 0].max()
            E = np.vstack([B[0], -B[0]])
            f = np.array([hi + B[0] @ o, -(lo + B[0] @ o)])
            return E, f, N, g
        eqs = ConvexHull(Q).equations  # a.q + c <= 0 with unit a
        # triangulated facets repeat the same plane
        _, idx = np.unique(np.round(eqs, 10), axis=0, return_index=True)
        eqs = eqs[np.sort(idx)]
        E_loc, f_loc = eqs[:, :-1], -eqs[:, -1]
        E = E_loc @ B
        f = f_loc + E @ o
        return E, f, N, g

    def contains(self, x, tol=config.MEMBERSHIP_TOL):
        x = np.asarray(x, dtype=float)
        E, f, N, g = self.halfspaces
        if len(N) and np.max(np.abs(N @ x - g)) > tol:
            return False
        return bool(np.all(E @ x <= f + tol))

    def interior_contains(self, x, tol):
        """Strictly inside by more than ``tol`` (full-dimensional polytopes only)."""
        E, f, N, _ = self.halfspaces
        if len(N):
            return False
        return bool(np.all(E @ np.asarray(x, dtype=float) < f - tol))

    @property
    def centroid(self):
        return self.vertices.mean(axis=0)

    def volume(self):
        if self.affine_dim < self.dim:
            return 0.0
        return float(ConvexHull(self.vertices).volume)

    def bbox(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def has_vertex(self, v, tol=config.VERTEX_TOL):
        return bool(np.any(np.max(np.abs(self.vertices - v), axis=1) <= tol))

    def common_vertices(self, other, tol=config.VERTEX_TOL):
        return np.array([v for v in self.vertices if other.has_vertex(v, tol)])

    def is_subset_by_vertices(self, other, tol=config.VERTEX_TOL):
        """Every extreme point of ``self`` is an extreme point of ``other``."""
        return all(other.has_vertex(v, tol) for v in self.vertices)

    def same_as(self, other, tol=config.VERTEX_TOL):
        return len(self) == len(other) and self.is_subset_by_vertices(other, tol)

    def ordered_2d(self):
        """Vertices of a 2-D polygon in counter-clockwise order."""
        if self.dim != 2:
            raise DimensionUnsupported("ordering needs d = 2")
        P = self.vertices
        c = P.mean(axis=0)
        ang = np.arctan2(P[:, 1] - c[1], P[:, 0] - c[0])
        return P[np.argsort(ang, kind="stable")]

    def clip_segment(self, a, b, tol=1e-12):
        """Parameter interval ``[t0, t1]`` of ``a + t (b - a)`` inside, or None."""
        E, f, N, g = self.halfspaces
        a = np.asarray(a, float)
        b = np.asarray(b, float)
        d = b - a
        if len(N) and (np.max(np.abs(N @ a - g)) > config.MEMBERSHIP_TOL
                       or np.max(np.abs(N @ d)) > config.MEMBERSHIP_TOL):
            return None
        t0, t1 = 0.0, 1.0
        num = f - E @ a
        den = E @ d
        for nu, de in zip(num, den):
            if abs(de) <= tol:
                if nu < -config.MEMBERSHIP_TOL:
                    return None
                continue
            t = nu / de
            if de > 0:
                t1 = min(t1, t)
            else:
                t0 = max(t0, t)
        if t0 > t1 + tol:
            return None
        return t0, t1


def _extreme_indices(P):
    """Indices of the extreme points of the point set ``P``."""
    o = P[0]
    D = P - o
    _, sv, Vt = np.linalg.svd(D, full_matrices=False)
    rank = int(np.sum(sv > 1e-9 * max(1.0, sv[0]))) if sv.size else 0
    if rank == 0:
        return [0]
    Q = D @ Vt[:rank].T
    if rank == 1:
        q = Q[:, 0]
        return sorted({int(np.argmin(q)), int(np.argmax(q))})
    try:
        hull = ConvexHull(Q)
    except QhullError as exc:
        raise GeometryError(f"degenerate polytope: {exc}") from exc
    return sorted(hull.vertices.tolist())


@dataclass(frozen=True)
class Region:
    polytope: Polytope
    p: PNorm
    weight: float

    def __post_init__(self):
        object.__setattr__(self, "p", as_pnorm(self.p))
        if not self.weight > 0:
            raise GeometryError("region weight must be positive")


@dataclass(frozen=True)
class Subdivision:
    regions: tuple
    box: tuple | None = None  # (lo, hi) arrays if declared

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        if not self.regions:
            raise GeometryError("empty subdivision")

    @property
    def dim(self):
        return self.regions[0].polytope.dim

    @property
    def m(self):
        return len(self.regions)

    def __len__(self):
        return self.m

    def __getitem__(self, i):
        return self.regions[i]

    def bounding_box(self):
        if self.box is not None:
            return np.asarray(self.box[0], float), np.asarray(self.box[1], float)
        V = np.vstack([r.polytope.vertices for r in self.regions])
        return V.min(axis=0), V.max(axis=0)

    def check(self, samples=10_000, seed=0, tol=config.SUBDIVISION_TOL):
        """Sampled check of disjoint interiors and box coverage.

        Returns a list of human-readable problems (empty when valid).
        """
        rng = np.random.default_rng(seed)
        lo, hi = self.bounding_box()
        problems = []
        pts = rng.uniform(lo, hi, size=(samples, self.dim))
        for x in pts:
            inside = [i for i, r in enumerate(self.regions) if r.polytope.contains(x, tol)]
            if not inside:
                problems.append(f"uncovered point {x.tolist()}")
                continue
            strict = [i for i in inside if self.regions[i].polytope.interior_contains(x, tol)]
            if len(strict) > 1:
                problems.append(f"overlapping interiors {strict} at {x.tolist()}")
        return problems


def locate_point(sub: Subdivision, x) -> int:
    """Lowest index of a region containing ``x`` (0-based)."""
    x = np.asarray(x, dtype=float)
    for i, r in enumerate(sub.regions):
        if r.polytope.contains(x):
            return i
    raise PointOutsideSubdivision(f"{x.tolist()} is in no region")


# adjacency ------------------------------------------------------------------------

@dataclass
class AdjacencyGraph:
    m: int
    faces: dict = field(default_factory=dict)  # (i, j) with i < j -> Polytope

    @property
    def edges(self):
        return sorted(self.faces)

    @property
    def arcs(self):
        return sorted([(i, j) for i, j in self.faces] + [(j, i) for i, j in self.faces])

    def face(self, i, j) -> Polytope:
        return self.faces[(i, j) if i < j else (j, i)]

    def has_edge(self, i, j):
        return ((i, j) if i < j else (j, i)) in self.faces

    def neighbors(self, i):
        return sorted([b for a, b in self.faces if a == i] + [a for a, b in self.faces if b == i])

    def to_networkx(self):
        g = nx.Graph()
        g.add_nodes_from(range(self.m))
        g.add_edges_from(self.faces)
        return g


def adjacency_graph(sub: Subdivision, facet_only: bool = False) -> AdjacencyGraph:
    """Regions sharing extreme points; ``F_ij`` is the hull of the shared points."""
    g = AdjacencyGraph(sub.m)
    boxes = [r.polytope.bbox() for r in sub.regions]
    d = sub.dim
    for i, j in itertools.combinations(range(sub.m), 2):
        (lo1, hi1), (lo2, hi2) = boxes[i], boxes[j]
        if np.any(lo1 > hi2 + config.VERTEX_TOL) or np.any(lo2 > hi1 + config.VERTEX_TOL):
            continue
        common = sub.regions[i].polytope.common_vertices(sub.regions[j].polytope)
        if len(common) == 0:
            continue
        F = Polytope(common, prune=False)
        if facet_only and F.affine_dim != d - 1:
            continue
        g.faces[(i, j)] = F
    return g


# Voronoi --------------------------------------------------------------------------

def _clip_halfplane(poly, a, c):
    """Sutherland-Hodgman: keep ``a . x <= c``."""
    out = []
    n = len(poly)
    for k in range(n):
        P = poly[k]
        Q = poly[(k + 1) % n]
        fp = a @ P - c
        fq = a @ Q - c
        if fp <= 0:
            out.append(P)
        if (fp < 0 < fq) or (fq < 0 < fp):
            t = fp / (fp - fq)
            out.append(P + t * (Q - P))
    return out


def voronoi_subdivision(seeds, box, weights=None, norms=None) -> Subdivision:
    """Euclidean Voronoi cells of ``seeds`` clipped to ``box = (lo, hi)`` (2-D).

    Vertices shared by neighbouring cells are snapped to one representative,
    so shared faces match exactly under the vertex tolerance.
    """
    S = np.asarray(seeds, dtype=float)
    lo, hi = (np.asarray(v, float) for v in box)
    if S.ndim != 2 or S.shape[1] != 2:
        raise DimensionUnsupported("Voronoi generation is 2-D only")
    if len(S) < 2:
        raise GeometryError("need at least two seeds")
    if np.any(S < lo - config.MEMBERSHIP_TOL) or np.any(S > hi + config.MEMBERSHIP_TOL):
        raise SeedOutsideBox("seed outside the box")
    for i, j in itertools.combinations(range(len(S)), 2):
        if np.max(np.abs(S[i] - S[j])) <= config.VERTEX_TOL:
            raise DuplicateSeeds(f"seeds {i} and {j} coincide")
    square = [np.array([lo[0], lo[1]]), np.array([hi[0], lo[1]]),
              np.array([hi[0], hi[1]]), np.array([lo[0], hi[1]])]
    cells = []
    for i, s in enumerate(S):
        poly = list(square)
        # nearest seeds first keeps intermediate polygons small
        for j in np.argsort(np.linalg.norm(S - s, axis=1), kind="stable"):
            if j == i:
                continue
            t = S[j]
            a = t - s
            c = (t @ t - s @ s) / 2.0
            poly = _clip_halfplane(poly, a, c)
            if not poly:
                break
        cells.append(poly)

    # snap vertices globally so neighbouring cells share identical coordinates
    V = np.array([v for poly in cells for v in poly])
    rep = np.arange(len(V))
    for i, j in sorted(cKDTree(V).query_pairs(config.VERTEX_TOL * max(1.0, np.abs(V).max()))):
        ri, rj = _find(rep, i), _find(rep, j)
        rep[max(ri, rj)] = min(ri, rj)
    V = V[[_find(rep, k) for k in range(len(V))]]

    m = len(S)
    weights = np.ones(m) if weights is None else weights
    norms = ["2"] * m if norms is None else norms
    regions = []
    k0 = 0
    for k, poly in enumerate(cells):
        pts = V[k0:k0 + len(poly)]
        k0 += len(poly)
        regions.append(Region(Polytope(pts), as_pnorm(norms[k]), float(weights[k])))
    return Subdivision(tuple(regions), (lo, hi))


def _find(parent, i):
    while parent[i] != i:
        i = parent[i]
    return i


def box_polytope(lo, hi):
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    return Polytope(list(itertools.product(*zip(lo, hi))))


def clip_halfplanes(halfplanes, box):
    """2-D polygon ``{x in box : a . x <= c for (a, c)}`` as a Polytope."""
    lo, hi = (np.asarray(v, float) for v in box)
    poly = [np.array([lo[0], lo[1]]), np.array([hi[0], lo[1]]),
            np.array([hi[0], hi[1]]), np.array([lo[0], hi[1]])]
    for a, c in halfplanes:
        poly = _clip_halfplane(poly, np.asarray(a, float), float(c))
    return Polytope(poly)


# segment-induced paths ------------------------------------------------------------

@dataclass
class SegmentPath:
    regions: list
    crossings: list  # point where the segment leaves regions[k] for regions[k+1]
    perturbed: bool = False


def segment_induced_path(sub: Subdivision, a, b, graph: AdjacencyGraph | None = None,
                         start=None, end=None) -> SegmentPath:
    """Regions met by the segment ``[a, b]`` in order, with the crossing points.

    A crossing through a face of dimension below ``d - 1`` (or a segment
    running inside a shared face) is degenerate; then ``b`` is moved by
    ``CROSSING_PERTURBATION`` along a fixed direction and the walk is
    retried, up to a few times.
    """
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    d = sub.dim
    direction = np.array([1.0] + [np.sqrt(k + 2) % 1 for k in range(d - 1)])
    direction /= np.linalg.norm(direction)
    s = locate_point(sub, a) if start is None else start
    t = locate_point(sub, b) if end is None else end
    for attempt in range(8):
        bb = b + attempt * config.CROSSING_PERTURBATION * direction
        try:
            path = _walk(sub, a, bb, s, t, graph)
            path.perturbed = attempt > 0
            return path
        except DegenerateCrossing:
            continue
    raise DegenerateCrossing("segment crossing stays degenerate after perturbation")


def _walk(sub, a, b, s, t, graph):
    if s == t:
        return SegmentPath([s], [])
    length = np.linalg.norm(b - a)
    if length == 0:
        return SegmentPath([s], [])
    eps = 1e-10
    pieces = []
    for i, r in enumerate(sub.regions):
        iv = r.polytope.clip_segment(a, b)
        if iv is None:
            continue
        t0, t1 = iv
        if (t1 - t0) * length > eps:
            pieces.append((t0, t1, i))
    pieces.sort()
    # the walk must start in s and end in t
    seq = []
    cross = []
    pos = 0.0
    current = s
    if not any(i == s for _, _, i in pieces):
        raise DegenerateCrossing("segment leaves the start region immediately")
    # interval of s
    t_end = max(t1 for t0, t1, i in pieces if i == s)
    seq.append(s)
    pos = t_end
    while pos < 1.0 - 1e-12:
        nxt = [(t0, t1, i) for t0, t1, i in pieces
               if abs(t0 - pos) * length <= 1e-9 and t1 > pos + 1e-12 and i not in seq]
        if len(nxt) != 1:
            raise DegenerateCrossing(f"ambiguous crossing at parameter {pos}")
        t0, t1, i = nxt[0]
        x = a + pos * (b - a)
        if graph is not None and not graph.has_edge(current, i):
            raise DegenerateCrossing("crossing between non-adjacent regions")
        # the crossing must be on a facet
        F = sub.regions[current].polytope.common_vertices(sub.regions[i].polytope)
        if len(F) < sub.dim or Polytope(F, prune=False).affine_dim < sub.dim - 1:
            raise DegenerateCrossing("crossing through a lower-dimensional face")
        seq.append(i)
        cross.append(x)
        current = i
        pos = t1
    if seq[-1] != t:
        if sub.regions[t].polytope.contains(b) and sub.regions[seq[-1]].polytope.contains(b):
            # b on the boundary between the last region and t
            if graph is not None and not graph.has_edge(seq[-1], t):
                raise DegenerateCrossing("end point on a degenerate face")
            if t in seq:
                raise DegenerateCrossing("end region already visited")
            seq.append(t)
            cross.append(b.copy())
        else:
            raise DegenerateCrossing("walk does not end in the target region")
    return SegmentPath(seq, cross)
