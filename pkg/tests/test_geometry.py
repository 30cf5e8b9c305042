import numpy as np
import pytest

from lpregions.errors import DimensionUnsupported, DuplicateSeeds, SeedOutsideBox
from lpregions.fixtures import refraction_instance, strips_l1, strips_l2
from lpregions.geometry import (Polytope, Region, Subdivision, adjacency_graph, box_polytope,
                                locate_point, segment_induced_path, voronoi_subdivision)
from lpregions.instances import random_subdivision

BOX = ((0.0, 0.0), (10.0, 10.0))


def _has_vertices(P, expected):
    got = {tuple(np.round(v, 9)) for v in P.vertices}
    return got == {tuple(map(float, v)) for v in expected}


def test_two_seed_bisector():
    sub = voronoi_subdivision([(2, 2), (8, 8)], BOX)
    assert sub.m == 2
    assert _has_vertices(sub[0].polytope, [(0, 0), (10, 0), (0, 10)])
    assert _has_vertices(sub[1].polytope, [(10, 0), (0, 10), (10, 10)])


def test_fifty_cells_tile_the_box():
    sub = random_subdivision(50, seed=3)
    assert sub.m == 50
    assert sub.check(samples=3000) == []
    assert sum(r.polytope.volume() for r in sub.regions) == pytest.approx(100.0, rel=1e-9)


def test_corner_seeds_give_congruent_cells():
    sub = voronoi_subdivision([(2.5, 2.5), (7.5, 2.5), (2.5, 7.5), (7.5, 7.5)], BOX)
    # Monte-Carlo area per cell, independent of the polygon area routine
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 10, size=(40000, 2))
    counts = np.zeros(4)
    for x in pts:
        counts[locate_point(sub, x)] += 1
    assert np.allclose(counts / len(pts) * 100.0, 25.0, atol=0.5)


def test_voronoi_input_errors():
    with pytest.raises(DuplicateSeeds):
        voronoi_subdivision([(1, 1), (1, 1)], BOX)
    with pytest.raises(SeedOutsideBox):
        voronoi_subdivision([(1, 1), (11, 1)], BOX)


def test_two_halves_share_one_segment():
    sub = Subdivision((Region(box_polytope((0, 0), (1, 2)), "2", 1.0),
                       Region(box_polytope((1, 0), (2, 2)), "2", 1.0)))
    g = adjacency_graph(sub)
    assert g.edges == [(0, 1)]
    assert len(g.face(0, 1)) == 2


def test_grid_adjacency_with_and_without_vertex_contacts():
    cells = [box_polytope((x, y), (x + 1, y + 1)) for x in (0, 1) for y in (0, 1)]
    sub = Subdivision(tuple(Region(P, "2", 1.0) for P in cells))
    assert len(adjacency_graph(sub, facet_only=True).edges) == 4
    full = adjacency_graph(sub, facet_only=False)
    assert len(full.edges) == 6
    # the diagonal pair meets in the single centre point
    assert _has_vertices(full.face(0, 3), [(1, 1)])


def test_strip_graph_is_a_path():
    g = adjacency_graph(strips_l2())
    assert g.edges == [(0, 1), (1, 2)]


def test_locate_point_in_diagonal_strips():
    sub = strips_l1()
    assert locate_point(sub, (1.0, 0.0)) == 2
    # a point on the face between regions 1 and 2 goes to the lower index
    assert locate_point(sub, (3.0, 3.0)) == 1


def test_locate_point_interior_samples():
    sub = random_subdivision(12, seed=5)
    rng = np.random.default_rng(1)
    for k, r in enumerate(sub.regions):
        V = r.polytope.vertices
        for _ in range(5):
            w = rng.dirichlet(np.ones(len(V)))
            assert locate_point(sub, w @ V) == k


def test_segment_crosses_the_strips_in_order():
    inst = refraction_instance()
    sp = segment_induced_path(inst.sub, inst.xs, inst.xt, inst.graph)
    assert sp.regions == [0, 1, 2]
    assert [c[0] for c in sp.crossings] == pytest.approx([1.0, 3.0])


def test_segment_inside_one_region():
    inst = refraction_instance()
    sp = segment_induced_path(inst.sub, (-1, 0), (0.5, 1), inst.graph)
    assert sp.regions == [0]
    assert sp.crossings == []


@pytest.mark.parametrize("seed", range(5))
def test_segment_path_follows_graph_edges(seed):
    sub = random_subdivision(10, seed)
    g = adjacency_graph(sub)
    rng = np.random.default_rng(seed)
    a, b = rng.uniform(0, 10, size=(2, 2))
    sp = segment_induced_path(sub, a, b, g)
    assert sp.regions[0] == locate_point(sub, a)
    for i, j in zip(sp.regions[:-1], sp.regions[1:]):
        assert g.has_edge(i, j)


def test_polytope_drops_interior_points():
    P = Polytope([(0, 0), (1, 0), (0, 1), (1, 1), (0.5, 0.5)])
    assert len(P) == 4
    assert P.affine_dim == 2


def test_three_dimensional_voronoi_rejected():
    with pytest.raises(DimensionUnsupported):
        voronoi_subdivision([(1, 1, 1), (2, 2, 2)], ((0, 0, 0), (3, 3, 3)))
