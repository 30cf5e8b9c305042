import json

import numpy as np
import pytest

from lpregions.fixtures import weber_instance
from lpregions.formulations import WeberInstance, build_spp_f2
from lpregions.instances import random_spp
from lpregions.model import relax
from lpregions.pipeline import solve_locp, solve_spp
from lpregions.preprocess import (euclidean_weber_point, min_total_distance, preprocess_locp,
                                  preprocess_spp, rank_regions, resolve_m_star,
                                  spp_upper_bound)
from lpregions.solver.bnb import SolveConfig
from lpregions.solver.ipm import solve_relaxation
from lpregions.solver.paths import brute_force_spp, fixed_path_eval

TIGHT = SolveConfig(rel_gap_tol=1e-8, time_limit_s=300)


def test_resolve_m_star():
    assert resolve_m_star("auto", 50) == 5
    assert resolve_m_star("auto", 7) == 1
    assert resolve_m_star("all", 9) == 9
    with pytest.raises(ValueError):
        resolve_m_star(10, 9)


def test_upper_bound_is_a_real_path():
    inst = random_spp(8, seed=4)
    ub, regions = spp_upper_bound(inst)
    assert ub == pytest.approx(fixed_path_eval(inst, regions)[0])
    assert ub >= brute_force_spp(inst)[0] - 1e-9


def test_weber_point_of_a_triangle():
    # equilateral triangle: the Fermat point is the centroid
    pts = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, np.sqrt(3.0)]])
    assert euclidean_weber_point(pts) == pytest.approx(pts.mean(axis=0), abs=1e-6)


def test_min_total_distance_inside_and_outside():
    square = [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert min_total_distance(square, [(0.5, 0.5)]) == pytest.approx(0.0, abs=1e-7)
    assert min_total_distance(square, [(3.0, 0.5)]) == pytest.approx(2.0, abs=1e-7)


def test_ranking_puts_far_regions_first():
    inst = random_spp(10, seed=0)
    order, score = rank_regions(inst.sub, np.vstack([inst.xs, inst.xt]))
    assert sorted(order) == list(range(10))
    assert all(score[a] >= score[b] for a, b in zip(order, order[1:]))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_spp_elimination_keeps_the_optimal_path(seed):
    inst = random_spp(7, seed)
    best, path, _ = brute_force_spp(inst)
    el = preprocess_spp(inst, "all")
    assert inst.s not in el.eliminated
    assert not set(el.eliminated) & set(path)
    res = solve_spp(inst, "f2", TIGHT, exclude=el.eliminated)
    assert res.report.ub == pytest.approx(best, rel=1e-6)


def test_forced_bounds_dominate_the_plain_relaxation():
    inst = random_spp(6, seed=5)
    base = solve_relaxation(relax(build_spp_f2(inst)[0])).objective
    el = preprocess_spp(inst, "all")
    assert all(v >= base - 1e-8 for v in el.bounds.values())


def test_auto_count_limits_the_sweep():
    inst = random_spp(12, seed=3)
    el = preprocess_spp(inst, "auto")
    assert len(el.bounds) + len(el.skipped) <= 2


def test_elimination_list_json():
    inst = random_spp(6, seed=0)
    d = preprocess_spp(inst, 2, instance_id="r6").to_json()
    json.dumps(d, allow_nan=False)
    assert d["instance_id"] == "r6"


def test_single_demand_region_survives():
    inst = weber_instance("p4", 5, seed=2)
    one = WeberInstance.create(inst.sub, inst.points[:1])
    el = preprocess_locp(one, "all")
    assert one.regions[0] not in el.eliminated


@pytest.mark.slow
@pytest.mark.parametrize("seed", [0, 1])
def test_locp_elimination_keeps_the_facility(seed):
    inst = weber_instance("p4", 5, seed)
    ref = solve_locp(inst, "f2", TIGHT)
    el = preprocess_locp(inst, "all")
    assert ref.solution.region not in el.eliminated
    again = solve_locp(inst, "f2", TIGHT, exclude=el.eliminated)
    assert again.report.ub == pytest.approx(ref.report.ub, rel=1e-6)


def test_heuristic_on_transformed_instances():
    from lpregions.fixtures import transit_instance
    from lpregions.formulations import double_visit_transform, rapid_transit_transform
    from lpregions.preprocess import heuristic_path
    inst = random_spp(6, seed=12)
    doubled = double_visit_transform(inst)
    assert doubled.overlay_from == inst.m
    seq = heuristic_path(doubled)
    assert all(r < inst.m for r in seq)
    assert all(doubled.graph.has_edge(i, j) for i, j in zip(seq, seq[1:]))
    base, faces = transit_instance()
    rt = rapid_transit_transform(base, faces)
    seq = heuristic_path(rt)
    assert seq == [0, 2, 1]
    assert all(rt.graph.has_edge(i, j) for i, j in zip(seq, seq[1:]))
