"""Small hand-built instances with known or easily checked answers.

Strip subdivisions are clipped to boxes wide enough that every optimal gate
lies strictly inside its clipped face.
"""
from __future__ import annotations

import csv
from importlib import resources

import numpy as np

from .formulations import SppInstance, WeberInstance
from .geometry import Region, Subdivision, clip_halfplanes, voronoi_subdivision

# three l1 strips along the diagonal, weights 1, 2, 3 from top-left to bottom-right
STRIPS_L1_BOX = ((-2.0, -2.0), (12.0, 12.0))
TRIANGLE_POINTS = {"s": np.array([1.0, 0.0]), "u": np.array([1.0, 9.0]),
                   "t": np.array([10.0, 9.0])}

# three vertical l2 strips split at x = 1 and x = 3, weights 1, 2, 3
STRIPS_L2_BOX = ((-2.0, -4.0), (8.0, 6.0))


def strips_l1() -> Subdivision:
    """``{y - x >= 5}``, ``{0 <= y - x <= 5}``, ``{y - x <= 0}`` with l1 and weights 1, 2, 3."""
    box = STRIPS_L1_BOX
    polys = [clip_halfplanes([((1, -1), -5)], box),
             clip_halfplanes([((1, -1), 0), ((-1, 1), 5)], box),
             clip_halfplanes([((-1, 1), 0)], box)]
    return Subdivision(tuple(Region(P, "1", w) for P, w in zip(polys, (1, 2, 3))), box)


def strips_l2() -> Subdivision:
    """``{x <= 1}``, ``{1 <= x <= 3}``, ``{x >= 3}`` with l2 and weights 1, 2, 3."""
    box = STRIPS_L2_BOX
    polys = [clip_halfplanes([((1, 0), 1)], box),
             clip_halfplanes([((-1, 0), -1), ((1, 0), 3)], box),
             clip_halfplanes([((-1, 0), -3)], box)]
    return Subdivision(tuple(Region(P, "2", w) for P, w in zip(polys, (1, 2, 3))), box)


def refraction_instance() -> SppInstance:
    """Three l2 strips crossed from ``(0, 0)`` to ``(6, 2)``; the optimum has no closed form."""
    return SppInstance.create(strips_l2(), (0.0, 0.0), (6.0, 2.0))


def detour_instance() -> SppInstance:
    """A heavy middle strip next to a cheap one: re-entering the heavy strip pays off.

    Strips ``{x <= 0}`` (weight 1), ``{0 <= x <= 1}`` (weight 10) and
    ``{x >= 1}`` (weight 5), all l2.  Going from ``(0.1, 0)`` to ``(1.1, 10)``
    the best simple path crosses straight into the right strip, while the
    path that first runs up the cheap left strip and then recrosses the heavy
    one is far shorter.
    """
    box = ((-2.0, -2.0), (4.0, 12.0))
    polys = [clip_halfplanes([((1, 0), 0)], box),
             clip_halfplanes([((-1, 0), 0), ((1, 0), 1)], box),
             clip_halfplanes([((-1, 0), -1)], box)]
    sub = Subdivision(tuple(Region(P, "2", w) for P, w in zip(polys, (1, 10, 5))), box)
    return SppInstance.create(sub, (0.1, 0.0), (1.1, 10.0))


def transit_instance():
    """Two weight-5 l2 half-planes sharing the line ``y = 0``.

    Returns ``(instance, face_norms)`` where the shared boundary is an l2
    corridor of weight 1.  The terminals sit one unit off the boundary and
    ten units apart along it.
    """
    box = ((-1.0, -3.0), (11.0, 3.0))
    polys = [clip_halfplanes([((0, 1), 0)], box), clip_halfplanes([((0, -1), 0)], box)]
    sub = Subdivision(tuple(Region(P, "2", 5.0) for P in polys), box)
    inst = SppInstance.create(sub, (0.0, -1.0), (10.0, 1.0))
    return inst, {(0, 1): ("2", 1.0)}


# demand sets ----------------------------------------------------------------------------

# Synthetic stand-ins with the sizes and bounding rectangles of five classic
# Weber demand sets.  They are generated, not transcribed.
DEMAND_SETS = {
    "p4": (4, ((0.0, 0.0), (12.0, 12.0))),
    "p18": (18, ((0.0, 0.0), (20.0, 15.0))),
    "b30": (30, ((0.0, 0.0), (10.0, 10.0))),
    "b50": (50, ((0.0, 0.0), (20.0, 20.0))),
    "e50": (50, ((0.0, 0.0), (10.0, 10.0))),
}


def demand_set(name):
    """``(points, weights, box)`` for one of :data:`DEMAND_SETS`, read from package data."""
    _, box = DEMAND_SETS[name]
    path = resources.files("lpregions") / "data" / f"demands_{name}.csv"
    with path.open() as fh:
        rows = [r for r in csv.DictReader(fh)]
    pts = np.array([[float(r["x"]), float(r["y"])] for r in rows])
    w = np.array([float(r["weight"]) for r in rows])
    return pts, w, box


def make_demand_set(name, seed=2019):
    """Regenerate a stand-in demand set (used once to write the shipped CSV files)."""
    n, (lo, hi) = DEMAND_SETS[name]
    rng = np.random.default_rng([seed, n, int(hi[0]), int(hi[1])])
    lo, hi = np.asarray(lo), np.asarray(hi)
    # keep points off the rectangle edges
    pts = lo + 0.05 * (hi - lo) + 0.9 * (hi - lo) * rng.random((n, 2))
    return np.round(pts, 3), np.ones(n)


def weber_instance(name, m, seed=0, norms=None) -> WeberInstance:
    """Voronoi subdivision with ``m`` cells over a demand set's rectangle."""
    from .instances import random_norms

    pts, w, box = demand_set(name)
    rng = np.random.default_rng(seed)
    lo, hi = (np.asarray(v) for v in box)
    seeds = lo + (hi - lo) * rng.random((m, 2))
    norms = norms if norms is not None else random_norms(m, rng)
    sub = voronoi_subdivision(seeds, box, norms=norms)
    return WeberInstance.create(sub, pts, w)
