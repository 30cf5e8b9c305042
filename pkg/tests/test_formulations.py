import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from lpregions.errors import DisconnectedGraph, MissingFaceNorm
from lpregions.fixtures import (TRIANGLE_POINTS, detour_instance, refraction_instance,
                                strips_l1, transit_instance, weber_instance)
from lpregions.formulations import (SppInstance, WeberInstance, build_spp_f1, build_spp_f2,
                                   collapse_doubled, double_visit_transform,
                                   rapid_transit_transform)
from lpregions.geometry import AdjacencyGraph, Region, Subdivision, box_polytope
from lpregions.instances import random_spp
from lpregions.pipeline import solve_locp, solve_spp
from lpregions.solver.bnb import SolveConfig
from lpregions.solver.paths import brute_force_spp

import oracles

TIGHT = SolveConfig(rel_gap_tol=1e-8, time_limit_s=300)


def _two_halves(p="2", w=(1.0, 1.0)):
    cells = [box_polytope((0, 0), (1, 2)), box_polytope((1, 0), (2, 2))]
    return Subdivision(tuple(Region(P, p, wk) for P, wk in zip(cells, w)), ((0, 0), (2, 2)))


def test_refraction_f1_shape():
    model, atlas = build_spp_f1(refraction_instance())
    assert sorted(atlas.path.z) == [(0, 1), (1, 0), (1, 2), (2, 1)]
    assert len(model.binaries()) == 4
    assert len(atlas.path.d) == 3
    for a, lam in atlas.path.lam.items():
        assert len(lam) == 2  # each clipped face is a segment


def test_straight_crossing_of_two_halves():
    inst = SppInstance.create(_two_halves(), (0.2, 1.0), (1.7, 1.0))
    for f in ("f1", "f2"):
        res = solve_spp(inst, f, TIGHT)
        assert res.report.ub == pytest.approx(1.5, abs=1e-7)


@pytest.mark.parametrize("seed", [0, 1])
def test_five_regions_match_brute_force(seed):
    inst = random_spp(5, seed)
    ref = oracles.brute_force(inst)[0]
    v1 = solve_spp(inst, "f1", TIGHT).report.ub
    v2 = solve_spp(inst, "f2", TIGHT).report.ub
    assert v1 == pytest.approx(ref, rel=1e-5)
    assert v2 == pytest.approx(v1, rel=1e-6)


def test_triangle_leg_through_all_strips():
    inst = SppInstance.create(strips_l1(), TRIANGLE_POINTS["s"], TRIANGLE_POINTS["u"])
    res = solve_spp(inst, "f2", TIGHT)
    assert res.report.ub == pytest.approx(16.0, abs=1e-6)


def test_disconnected_graph_detected():
    sub = _two_halves()
    g = AdjacencyGraph(2)  # no faces recorded
    inst = SppInstance(sub, g, np.array([0.5, 1.0]), np.array([1.5, 1.0]), 0, 1)
    with pytest.raises(DisconnectedGraph):
        build_spp_f2(inst)


# location --------------------------------------------------------------------------

@pytest.mark.parametrize("f", ["f1", "f2"])
def test_single_demand_sits_on_the_facility(f):
    inst = weber_instance("p4", 4, seed=0)
    one = WeberInstance.create(inst.sub, inst.points[:1])
    res = solve_locp(one, f, TIGHT)
    assert res.report.ub == pytest.approx(0.0, abs=1e-7)
    assert res.solution.facility == pytest.approx(one.points[0], abs=1e-7)
    assert res.solution.region == one.regions[0]
    assert all(len(p.gates) == 0 for p in res.solution.paths)


def test_symmetric_demands_on_the_axis():
    sub = _two_halves("2", (1.0, 3.0))
    pts = [(0.3, 0.4), (0.3, 1.6)]
    inst = WeberInstance.create(sub, pts)
    res = solve_locp(inst, "f2", TIGHT)
    # the optimum is at a point on y = 1 inside region 0; golden section along that axis
    ref = minimize_scalar(lambda x: sum(np.hypot(x - px, 1.0 - py) for px, py in pts),
                          bounds=(0.0, 1.0), method="bounded", options=dict(xatol=1e-10))
    assert res.solution.region == 0
    assert res.solution.facility[1] == pytest.approx(1.0, abs=1e-5)
    assert res.report.ub == pytest.approx(ref.fun, rel=1e-6)


def test_four_demands_on_five_cells():
    inst = weber_instance("p4", 5, seed=0)
    res = solve_locp(inst, "f2", SolveConfig(time_limit_s=300))
    assert res.report.status == "Optimal"
    assert np.isfinite(res.report.ub)
    assert res.report.gap_pct <= 0.01


@pytest.mark.slow
def test_location_formulations_agree():
    inst = weber_instance("p4", 4, seed=1)
    v1 = solve_locp(inst, "f1", TIGHT).report.ub
    v2 = solve_locp(inst, "f2", TIGHT).report.ub
    assert v1 == pytest.approx(v2, rel=1e-5)


# transforms -------------------------------------------------------------------------

def test_rapid_transit_graph_shape():
    inst, norms = transit_instance()
    rt = rapid_transit_transform(inst, norms)
    assert rt.m == 3
    assert rt.graph.edges == [(0, 2), (1, 2)]


def test_rapid_transit_needs_every_face():
    inst, _ = transit_instance()
    with pytest.raises(MissingFaceNorm):
        rapid_transit_transform(inst, {})


def test_expensive_boundary_changes_nothing():
    inst, _ = transit_instance()
    base = solve_spp(inst, "f2", TIGHT).report.ub
    rt = rapid_transit_transform(inst, {(0, 1): ("2", 1e4)})
    assert solve_spp(rt, "f2", TIGHT).report.ub == pytest.approx(base, rel=1e-5)


def test_cheap_boundary_beats_direct_route():
    inst, norms = transit_instance()
    base = solve_spp(inst, "f2", TIGHT)
    rt = solve_spp(rapid_transit_transform(inst, norms), "f2", TIGHT)
    # hand-built route: straight down to the boundary, along it, straight up
    assert base.report.ub == pytest.approx(5.0 * np.hypot(10.0, 2.0), rel=1e-6)
    assert rt.report.ub <= 5.0 + 10.0 + 5.0 + 1e-6
    assert rt.report.ub < base.report.ub - 1.0


def test_double_visit_graph_shape():
    inst = refraction_instance()
    dv = double_visit_transform(inst)
    assert dv.m == 6
    for i in range(3):
        assert not dv.graph.has_edge(i, i + 3)
    assert collapse_doubled([0, 4, 2], 3) == [0, 1, 2]


def test_double_visit_detour_is_shorter():
    inst = detour_instance()
    d = solve_spp(inst, "f2", TIGHT).report.ub
    dv = solve_spp(double_visit_transform(inst), "f2", TIGHT)
    assert dv.report.ub < d - 1e-3
    assert brute_force_spp(inst)[0] == pytest.approx(d, rel=1e-6)
