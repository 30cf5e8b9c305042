"""Place one facility among regions with mixed norms, with and without elimination."""
import time

from lpregions.instances import random_weber
from lpregions.pipeline import solve_locp
from lpregions.solver.bnb import SolveConfig

inst = random_weber(5, seed=3, n=4)
cfg = SolveConfig(rel_gap_tol=1e-6, time_limit_s=300)
for m_star in (None, "all"):
    t0 = time.perf_counter()
    res = solve_locp(inst, "f2", cfg, m_star=m_star)
    sol = res.solution
    label = "no preprocessing" if m_star is None else "all regions tested"
    print(f"{label}: value {sol.value:.6f}, facility ({sol.facility[0]:.4f}, "
          f"{sol.facility[1]:.4f}) in region {sol.region}, {time.perf_counter() - t0:.1f}s")
    if res.elimination is not None:
        print(f"  eliminated regions: {res.elimination.eliminated}")
