"""Seeded random instances: Voronoi cells with norms drawn from a menu."""
from __future__ import annotations

import numpy as np

from .formulations import SppInstance, WeberInstance
from .geometry import voronoi_subdivision

NORM_MENU = ("1", "3/2", "2", "3", "inf")
DEFAULT_BOX = ((0.0, 0.0), (10.0, 10.0))


def random_norms(m, rng, menu=NORM_MENU):
    return [menu[k] for k in rng.integers(0, len(menu), m)]


def random_subdivision(m, seed, box=DEFAULT_BOX, menu=NORM_MENU):
    """``m`` uniform seeds in ``box``, unit weights, norms uniform over ``menu``."""
    if m < 2:
        raise ValueError("need at least two regions")
    rng = np.random.default_rng(seed)
    lo, hi = (np.asarray(v, float) for v in box)
    seeds = lo + (hi - lo) * rng.random((m, 2))
    return voronoi_subdivision(seeds, box, norms=random_norms(m, rng, menu))


def random_spp(m, seed, box=DEFAULT_BOX, menu=NORM_MENU, source=None, target=None,
               facet_only=False) -> SppInstance:
    """Shortest-path instance; terminals default to opposite corners of ``box``."""
    sub = random_subdivision(m, seed, box, menu)
    lo, hi = box
    return SppInstance.create(sub, lo if source is None else source,
                              hi if target is None else target, facet_only=facet_only)


def random_weber(m, seed, n=None, points=None, weights=None, box=DEFAULT_BOX,
                 menu=NORM_MENU, facet_only=False) -> WeberInstance:
    """Weber instance with given demand points, or ``n`` uniform ones."""
    sub = random_subdivision(m, seed, box, menu)
    if points is None:
        if n is None:
            raise ValueError("give either points or n")
        rng = np.random.default_rng([seed, n])
        lo, hi = (np.asarray(v, float) for v in box)
        points = lo + (hi - lo) * rng.random((n, 2))
    return WeberInstance.create(sub, points, weights, facet_only=facet_only)
