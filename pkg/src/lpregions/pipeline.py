"""End-to-end solves: optional region elimination, warm start, branch-and-bound, decode."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass

from .errors import DegenerateCrossing, InvalidPath, NumericalTrouble
from .formulations import (BUILDERS, SppInstance, WeberInstance, decode_locp, decode_spp,
                           path_binaries, path_from_gates, same_region_value)
from .preprocess import (EliminationList, heuristic_path, preprocess_locp, preprocess_spp,
                         weber_upper_bound)
from .solver.bnb import SolveConfig, SolveReport, solve_misocp
from .solver.ipm import solve_relaxation

log = logging.getLogger(__name__)

_HEURISTIC_ERRORS = (DegenerateCrossing, InvalidPath, NumericalTrouble)


@dataclass
class SppResult:
    report: SolveReport
    path: object  # PathSolution or None
    build_seconds: float
    elimination: EliminationList | None = None


@dataclass
class LocpResult:
    report: SolveReport
    solution: object  # WeberSolution or None
    build_seconds: float
    elimination: EliminationList | None = None


def _fix_and_solve(model, fixed):
    try:
        sol = solve_relaxation(model, fixed=fixed)
    except NumericalTrouble:
        return None
    if not sol.optimal:
        return None
    return sol.objective, sol.x


def _budget(cfg, spent):
    """Copy of ``cfg`` with ``spent`` seconds taken off the time limit."""
    from dataclasses import replace
    return replace(cfg, time_limit_s=max(cfg.time_limit_s - spent, 1e-3))


def solve_spp(inst: SppInstance, formulation="f2", cfg: SolveConfig | None = None,
              m_star=None, exclude=(), warm_start=True) -> SppResult:
    """Shortest simple path by branch-and-bound on the chosen formulation.

    Parameters
    ----------
    m_star : int or "all" or "auto", optional
        Number of regions to test for elimination before solving.  The
        elimination time is taken off the time limit.
    exclude : iterable of int
        Regions removed up front, in addition to any eliminated ones.
    """
    cfg = cfg or SolveConfig()
    if inst.s == inst.t:
        v = same_region_value(inst)
        rep = SolveReport("Optimal", v, v, 0, 0.0)
        return SppResult(rep, path_from_gates(inst.sub, [inst.s], inst.xs, inst.xt, []), 0.0)
    elim = None
    exclude = set(exclude)
    if m_star is not None:
        elim = preprocess_spp(inst, m_star, threads=cfg.threads)
        exclude |= set(elim.eliminated)
        cfg = _budget(cfg, elim.seconds)
    t0 = time.perf_counter()
    model, atlas = BUILDERS[("spp", formulation)](inst, exclude=sorted(exclude))
    build = time.perf_counter() - t0
    incumbent = None
    if warm_start:
        try:
            regions = heuristic_path(inst)
            if not set(regions) & exclude:
                incumbent = _fix_and_solve(model, path_binaries(atlas.path, regions))
        except _HEURISTIC_ERRORS as exc:
            log.info("no warm start: %s", exc)
    report, x = solve_misocp(model, _budget(cfg, build), incumbent)
    path = decode_spp(inst, atlas, x) if x is not None else None
    report.wall_time += build
    return SppResult(report, path, build, elim)


def locp_binaries(atlas, region, paths):
    """Binary fixings for a facility in ``region`` reached along ``paths``."""
    fixed = {h: (1.0 if i == region else 0.0) for i, h in atlas.u.items()}
    for pa, seq in zip(atlas.demands, paths):
        fixed.update(path_binaries(pa, seq))
    return fixed


def solve_locp(inst: WeberInstance, formulation="f2", cfg: SolveConfig | None = None,
               m_star=None, exclude=(), warm_start=True) -> LocpResult:
    """Weber location by branch-and-bound on the chosen formulation."""
    cfg = cfg or SolveConfig()
    elim = None
    exclude = set(exclude)
    if m_star is not None:
        elim = preprocess_locp(inst, m_star, threads=cfg.threads)
        exclude |= set(elim.eliminated)
        cfg = _budget(cfg, elim.seconds)
    t0 = time.perf_counter()
    model, atlas = BUILDERS[("locp", formulation)](inst, exclude=sorted(exclude))
    build = time.perf_counter() - t0
    incumbent = None
    if warm_start:
        try:
            _, r, _, paths = weber_upper_bound(inst)
            if r not in exclude:
                incumbent = _fix_and_solve(model, locp_binaries(atlas, r, paths))
        except _HEURISTIC_ERRORS as exc:
            log.info("no warm start: %s", exc)
    report, x = solve_misocp(model, _budget(cfg, build), incumbent)
    sol = decode_locp(inst, atlas, x) if x is not None else None
    report.wall_time += build
    return LocpResult(report, sol, build, elim)
