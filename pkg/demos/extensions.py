"""Two model extensions: visiting a region twice, and travelling along a shared boundary."""
from lpregions.fixtures import detour_instance, transit_instance
from lpregions.formulations import double_visit_transform, rapid_transit_transform
from lpregions.pipeline import solve_spp
from lpregions.solver.bnb import SolveConfig

cfg = SolveConfig(rel_gap_tol=1e-8)

inst = detour_instance()
simple = solve_spp(inst, "f2", cfg)
twice = solve_spp(double_visit_transform(inst), "f2", cfg)
m = inst.m
print(f"simple path {simple.path.regions}: {simple.report.ub:.4f}")
print(f"with repeats {[r % m for r in twice.path.regions]}: {twice.report.ub:.4f}")

inst, faces = transit_instance()
direct = solve_spp(inst, "f2", cfg)
transit = solve_spp(rapid_transit_transform(inst, faces), "f2", cfg)
print(f"without the corridor: {direct.report.ub:.4f}")
print(f"using the corridor:   {transit.report.ub:.4f} along regions {transit.path.regions}")
