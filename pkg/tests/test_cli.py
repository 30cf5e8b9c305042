import csv
import json

import numpy as np
import pytest

from lpregions import io
from lpregions.bench import BenchConfig, aggregate, run_suite
from lpregions.cli import main
from lpregions.errors import DimensionUnsupported
from lpregions.fixtures import (TRIANGLE_POINTS, demand_set, refraction_instance, strips_l1,
                                weber_instance)
from lpregions.formulations import SppInstance, path_from_gates
from lpregions.geometry import Polytope, Region, Subdivision
from lpregions.plot import render_svg
from lpregions.solver.bnb import SolveConfig

import oracles


def _write_instance(tmp_path, inst, name="inst.json"):
    p = tmp_path / name
    io.save_instance(inst, p)
    return str(p)


def test_gen_matches_the_recipe(tmp_path):
    out = tmp_path / "a.json"
    assert main(["gen", "spp", "--m", "50", "--seed", "4", "-o", str(out)]) == 0
    d = json.loads(out.read_text())
    assert len(d["regions"]) == 50
    assert d["source"] == [0.0, 0.0] and d["target"] == [10.0, 10.0]
    assert {r["p"] for r in d["regions"]} <= {"1", "3/2", "2", "3", "inf"}


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["gen", "spp", "--m", "12", "--seed", "9", "-o", str(a)])
    main(["gen", "spp", "--m", "12", "--seed", "9", "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_gen_weber_from_csv(tmp_path):
    pts, w, _ = demand_set("p4")
    csv_path = tmp_path / "d.csv"
    with open(csv_path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["x", "y", "weight"])
        wr.writerows([[*p, wk] for p, wk in zip(pts, w)])
    out = tmp_path / "w.json"
    assert main(["gen", "weber", "--m", "5", "--demands", str(csv_path), "--box", "0", "0",
                 "12", "12", "-o", str(out)]) == 0
    inst = io.load_instance(out)
    assert inst.n == 4


def test_instance_round_trip(tmp_path):
    inst = refraction_instance()
    path = _write_instance(tmp_path, inst)
    back = io.load_instance(path)
    assert io.dumps(io.instance_to_json(back)) == io.dumps(io.instance_to_json(inst))
    assert back.graph.edges == inst.graph.edges


def test_solve_refraction(tmp_path):
    path = _write_instance(tmp_path, refraction_instance())
    out = tmp_path / "sol.json"
    code = main(["solve", path, "--formulation", "f2", "--gap-tol", "1e-8", "-o", str(out)])
    assert code == 0
    d = json.loads(out.read_text())
    assert d["report"]["status"] == "Optimal"
    assert d["verification"]["passed"]
    assert d["value"] == pytest.approx(oracles.refraction_oracle()[0], rel=1e-4)


def test_solve_direct_leg_is_54(tmp_path):
    inst = SppInstance.create(strips_l1(), TRIANGLE_POINTS["s"], TRIANGLE_POINTS["t"])
    path = _write_instance(tmp_path, inst)
    out = tmp_path / "sol.json"
    assert main(["solve", path, "-o", str(out)]) == 0
    assert json.loads(out.read_text())["value"] == pytest.approx(54.0, abs=1e-6)


def test_solve_then_verify_and_plot(tmp_path):
    path = _write_instance(tmp_path, refraction_instance())
    sol = tmp_path / "sol.json"
    main(["solve", path, "--gap-tol", "1e-8", "-o", str(sol)])
    assert main(["verify", path, str(sol), "-o", str(tmp_path / "v.json")]) == 0
    svg = tmp_path / "p.svg"
    assert main(["plot", path, "--solution", str(sol), "-o", str(svg)]) == 0
    assert svg.read_text().count('class="gate"') == 2


def test_verify_flags_bad_gates(tmp_path):
    path = _write_instance(tmp_path, refraction_instance())
    bad = {"path": [0, 1, 2], "gates": [[1.0, 0.2], [3.0, 1.9]]}
    sol = tmp_path / "bad.json"
    sol.write_text(json.dumps(bad))
    assert main(["verify", path, str(sol), "-o", str(tmp_path / "v.json")]) == 1


@pytest.mark.slow
def test_weber_preprocessing_keeps_the_value(tmp_path):
    path = _write_instance(tmp_path, weber_instance("p4", 5, seed=0))
    off, on = tmp_path / "off.json", tmp_path / "on.json"
    assert main(["solve", path, "--gap-tol", "1e-7", "-o", str(off)]) == 0
    assert main(["solve", path, "--gap-tol", "1e-7", "--preprocess", "all", "-o", str(on)]) == 0
    a, b = json.loads(off.read_text()), json.loads(on.read_text())
    assert "eliminated" in b["elimination"]
    assert b["value"] == pytest.approx(a["value"], rel=1e-6)


def test_transforms_through_cli(tmp_path):
    from lpregions.fixtures import detour_instance, transit_instance
    det = _write_instance(tmp_path, detour_instance(), "det.json")
    out = tmp_path / "dv.json"
    assert main(["solve", det, "--double-visit", "--gap-tol", "1e-8", "-o", str(out)]) == 0
    d = json.loads(out.read_text())
    assert all(0 <= r < 3 for r in d["base_path"])
    inst, _ = transit_instance()
    tr = _write_instance(tmp_path, inst, "tr.json")
    faces = tmp_path / "faces.json"
    faces.write_text(json.dumps({"default": {"p": "2", "weight": 1.0}}))
    out2 = tmp_path / "rt.json"
    assert main(["solve", tr, "--rapid-transit", str(faces), "-o", str(out2)]) == 0
    assert json.loads(out2.read_text())["value"] < 5.0 * np.hypot(10.0, 2.0) - 1.0


def test_missing_file_is_an_error(tmp_path):
    with pytest.raises(FileNotFoundError):
        main(["solve", str(tmp_path / "nope.json")])


# plotting ------------------------------------------------------------------------------

def test_plot_strips_with_path():
    sub = strips_l1()
    inst = SppInstance.create(sub, TRIANGLE_POINTS["s"], TRIANGLE_POINTS["u"])
    sol = path_from_gates(sub, [2, 1, 0], inst.xs, inst.xt, [(1, 1), (1, 6)])
    svg = render_svg(inst, sol)
    assert svg.count("<polygon") == 3
    assert svg.count('class="gate"') == 2
    assert svg == render_svg(inst, sol)


def test_plot_without_solution():
    svg = render_svg(refraction_instance())
    assert "<polyline" not in svg and svg.count("<polygon") == 3


def test_plot_rejects_3d():
    cube = Polytope([(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)])
    inst = SppInstance.create(Subdivision((Region(cube, "2", 1.0),)), (0.1, 0.1, 0.1),
                              (0.9, 0.9, 0.9))
    with pytest.raises(DimensionUnsupported):
        render_svg(inst)


# benchmarks ----------------------------------------------------------------------------

def test_bench_config_names():
    assert BenchConfig.parse("pre+f2") == BenchConfig("f2", "auto")
    assert BenchConfig.parse("pre5+f1").name == "pre5+f1"
    assert BenchConfig.parse("f2").m_star is None


def test_bench_row_counts(tmp_path):
    out = tmp_path / "b.csv"
    aggs = run_suite(out, "spp", (5, 6), ("f2",), range(5), SolveConfig(time_limit_s=60))
    rows = list(csv.DictReader(open(out)))
    assert sum(r["row"] == "run" for r in rows) == 10
    assert sum(r["row"] == "aggregate" for r in rows) == 2
    assert len(aggs) == 2


def test_aggregate_gap_convention():
    rows = [dict(kind="spp", m=5, config="f2", cpu=1.0, gap=0.0),
            dict(kind="spp", m=5, config="f2", cpu=3.0, gap=100.0)]
    a = aggregate(rows)
    assert (a["cpu_aver"], a["cpu_min"], a["cpu_max"]) == (2.0, 1.0, 3.0)
    assert a["gap_max"] == 100.0
