"""Best-first branch-and-bound over the conic relaxation engine."""
from __future__ import annotations

import csv
import heapq
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import Infeasible, NumericalTrouble
from ..model import ConicModel, relax
from .ipm import INFEASIBLE, OPTIMAL, solve_relaxation

log = logging.getLogger(__name__)

BRANCHING_RULES = ("most_fractional", "lowest_index")


@dataclass
class SolveConfig:
    time_limit_s: float = 7200.0
    rel_gap_tol: float = 1e-4
    feas_tol: float = 1e-8
    integrality_tol: float = 1e-6
    node_limit: int | None = None
    branching_rule: str = "most_fractional"
    threads: int = 1
    trace_path: str | None = None

    def __post_init__(self):
        if self.time_limit_s <= 0:
            raise ValueError("time limit must be positive")
        for name in ("rel_gap_tol", "feas_tol", "integrality_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.branching_rule not in BRANCHING_RULES:
            raise ValueError(f"unknown branching rule {self.branching_rule!r}")


@dataclass
class SolveReport:
    status: str  # Optimal, TimeLimit, NodeLimit, Infeasible
    ub: float = np.inf
    lb: float = -np.inf
    nodes: int = 0
    wall_time: float = 0.0
    numerical_failures: int = 0

    @property
    def gap_pct(self):
        return gap_pct(self.ub, self.lb)

    def to_json(self):
        d = asdict(self)
        d["gap_pct"] = self.gap_pct
        for k in ("ub", "lb"):
            d[k] = None if not np.isfinite(d[k]) else float(d[k])
        return d


def gap_pct(ub, lb):
    if not np.isfinite(ub):
        return 100.0
    if not np.isfinite(lb):
        return 100.0
    return float(100.0 * max(0.0, ub - lb) / max(abs(ub), 1e-12))


@dataclass(order=True)
class _Node:
    lb: float
    seq: int
    depth: int = field(compare=False)
    bounds: dict = field(compare=False)
    branch_var: int | None = field(compare=False, default=None)


def solve_misocp(m: ConicModel, cfg: SolveConfig | None = None, incumbent=None,
                 relaxation=None):
    """Minimize ``m`` over its binaries by best-first branch-and-bound.

    Parameters
    ----------
    incumbent : (value, x), optional
        Known feasible solution used as the starting upper bound.
    relaxation : callable, optional
        ``relaxation(model, bounds) -> RelaxSolution``; defaults to the
        embedded interior-point engine.

    Returns
    -------
    (SolveReport, x or None)
    """
    cfg = cfg or SolveConfig()
    t0 = time.perf_counter()
    binaries = m.binaries()
    mr = relax(m).freeze()
    solve = relaxation or (lambda model, bounds: solve_relaxation(model, bounds=bounds))
    ub, best_x = np.inf, None
    if incumbent is not None:
        ub, best_x = float(incumbent[0]), np.asarray(incumbent[1], float)
    trace = _Trace(cfg.trace_path)
    report = SolveReport("Optimal")

    def frac_var(x, bounds):
        cands = []
        for h in binaries:
            if h in bounds:
                continue
            f = min(x[h], 1.0 - x[h])
            if f > cfg.integrality_tol:
                cands.append((h, f))
        if not cands:
            return None
        if cfg.branching_rule == "lowest_index":
            return cands[0][0]
        # most fractional; ties go to the lowest handle
        return max(cands, key=lambda c: (c[1], -c[0]))[0]

    def run(node):
        try:
            return solve(mr, node.bounds)
        except NumericalTrouble as exc:
            return exc

    heap = [_Node(-np.inf, 0, 0, {})]
    seq = 1
    pruned_lb = np.inf  # smallest bound among nodes closed by bound
    pool = ThreadPoolExecutor(cfg.threads) if cfg.threads > 1 else None
    status = "Optimal"
    try:
        while heap:
            if time.perf_counter() - t0 > cfg.time_limit_s:
                status = "TimeLimit"
                break
            if cfg.node_limit is not None and report.nodes >= cfg.node_limit:
                status = "NodeLimit"
                break
            if heap[0].lb >= _prune_level(ub, cfg):
                pruned_lb = min(pruned_lb, heap[0].lb)
                heapq.heappop(heap)
                continue
            batch = [heapq.heappop(heap)]
            while pool and heap and len(batch) < cfg.threads:
                batch.append(heapq.heappop(heap))
            results = list(pool.map(run, batch)) if pool else [run(batch[0])]
            for node, sol in zip(batch, results):
                report.nodes += 1
                if report.nodes % 25 == 0:
                    log.info("%d nodes, %d open, lb %.9g, ub %.9g, %.1fs", report.nodes,
                             len(heap), min([node.lb] + [q.lb for q in heap[:1]]), ub,
                             time.perf_counter() - t0)
                if isinstance(sol, Exception):
                    report.numerical_failures += 1
                    log.warning("node %d: %s", node.seq, sol)
                    h = next((b for b in binaries if b not in node.bounds), None)
                    if h is None:
                        continue
                    for v in (0.0, 1.0):
                        b = dict(node.bounds)
                        b[h] = (v, v)
                        heapq.heappush(heap, _Node(node.lb, seq, node.depth + 1, b, h))
                        seq += 1
                    continue
                if sol.status == INFEASIBLE:
                    if node.seq == 0:
                        raise Infeasible("root relaxation is infeasible")
                    trace.write(node, np.inf, ub, None)
                    continue
                if sol.status != OPTIMAL:
                    raise NumericalTrouble(f"relaxation status {sol.status}")
                lb = max(node.lb, sol.objective)
                if lb >= _prune_level(ub, cfg):
                    pruned_lb = min(pruned_lb, lb)
                    trace.write(node, lb, ub, None)
                    continue
                h = frac_var(sol.x, node.bounds)
                if h is None:
                    val, x = _polish(mr, sol, binaries, node.bounds, solve)
                    if val < ub:
                        ub, best_x = val, x
                        log.info("node %d: incumbent %.9g", node.seq, ub)
                    pruned_lb = min(pruned_lb, lb)
                    trace.write(node, lb, ub, None)
                    continue
                trace.write(node, lb, ub, h)
                # explore the branch the relaxation leans to first on equal bounds
                order = (1.0, 0.0) if sol.x[h] >= 0.5 else (0.0, 1.0)
                for v in order:
                    b = dict(node.bounds)
                    b[h] = (v, v)
                    heapq.heappush(heap, _Node(lb, seq, node.depth + 1, b, h))
                    seq += 1
    finally:
        if pool:
            pool.shutdown()
        trace.close()

    if heap:
        lb = min(heap[0].lb, pruned_lb)
    else:
        lb = pruned_lb
        if not np.isfinite(ub):
            report.status = "Infeasible"
            report.wall_time = time.perf_counter() - t0
            return report, None
    report.ub = ub
    report.lb = min(lb, ub)
    report.status = status
    report.wall_time = time.perf_counter() - t0
    return report, best_x


def _prune_level(ub, cfg):
    if not np.isfinite(ub):
        return np.inf
    return ub - cfg.rel_gap_tol * abs(ub) - 1e-12


def _polish(mr, sol, binaries, bounds, solve):
    """Re-solve with the binaries rounded, so the incumbent is exactly integral."""
    fixed = dict(bounds)
    for h in binaries:
        v = float(round(sol.x[h]))
        fixed[h] = (v, v)
    try:
        s2 = solve(mr, fixed)
    except NumericalTrouble:
        s2 = None
    if s2 is not None and s2.status == OPTIMAL:
        return s2.objective, s2.x
    return sol.objective, sol.x


class _Trace:
    def __init__(self, path):
        self.fh = open(path, "w", newline="") if path else None
        if self.fh:
            self.w = csv.writer(self.fh)
            self.w.writerow(["node", "depth", "lb", "ub", "branch_var"])

    def write(self, node, lb, ub, var):
        if self.fh:
            self.w.writerow([node.seq, node.depth, lb, ub, "" if var is None else var])

    def close(self):
        if self.fh:
            self.fh.close()
