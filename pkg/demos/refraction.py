"""Shortest path across three l2 strips, checked against the refraction law.

Writes ``refraction.svg`` next to the current directory.
"""
from lpregions.fixtures import refraction_instance
from lpregions.pipeline import solve_spp
from lpregions.plot import render_svg
from lpregions.solver.bnb import SolveConfig
from lpregions.verify import verify_path_optimality

inst = refraction_instance()
res = solve_spp(inst, "f2", SolveConfig(rel_gap_tol=1e-8))
path = res.path
print(f"status {res.report.status}, length {path.value:.9f}, {res.report.nodes} nodes")
for g in path.gates:
    print(f"  gate at ({g[0]:.6f}, {g[1]:.6f})")

rep = verify_path_optimality(inst, path)
for g in rep.gates:
    print(f"  regions {g.regions}: residual {g.residual:.2e}, improvement {g.improvement:.1e}")
print("locally optimal:", rep.passed)

with open("refraction.svg", "w") as fh:
    fh.write(render_svg(inst, path))
