"""Benchmark tables: seeded runs per region count, aggregated like the published tables."""
from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, replace

import numpy as np

from .instances import random_spp
from .pipeline import solve_locp, solve_spp
from .solver.bnb import SolveConfig

log = logging.getLogger(__name__)

FIELDS = ["row", "kind", "m", "config", "seed", "cpu", "gap", "status", "preprocess_s",
          "eliminated", "cpu_aver", "cpu_min", "cpu_max", "gap_aver", "gap_min", "gap_max"]


@dataclass(frozen=True)
class BenchConfig:
    """One column group: a formulation with or without region elimination."""

    formulation: str = "f2"
    m_star: object = None  # None, int, "auto" or "all"

    @property
    def name(self):
        pre = "" if self.m_star is None else f"pre{self.m_star}+"
        return pre + self.formulation

    @classmethod
    def parse(cls, text):
        """``"f2"``, ``"pre+f2"`` (auto count), ``"preall+f1"`` or ``"pre5+f2"``."""
        if "+" not in text:
            return cls(text)
        pre, form = text.split("+", 1)
        arg = pre[3:] or "auto"
        return cls(form, arg if arg in ("all", "auto") else int(arg))


def run_one(kind, m, seed, bc: BenchConfig, cfg: SolveConfig, dataset=None):
    if kind == "spp":
        inst = random_spp(m, seed)
        res = solve_spp(inst, bc.formulation, cfg, m_star=bc.m_star)
    else:
        from .fixtures import weber_instance
        inst = weber_instance(dataset or "p4", m, seed)
        res = solve_locp(inst, bc.formulation, cfg, m_star=bc.m_star)
    pre = res.elimination.seconds if res.elimination is not None else 0.0
    elim = len(res.elimination.eliminated) if res.elimination is not None else 0
    return dict(row="run", kind=kind, m=m, config=bc.name, seed=seed,
                cpu=res.report.wall_time + pre, gap=res.report.gap_pct,
                status=res.report.status, preprocess_s=pre, eliminated=elim)


def aggregate(rows):
    cpu = np.array([r["cpu"] for r in rows])
    gap = np.array([r["gap"] for r in rows])
    r0 = rows[0]
    return dict(row="aggregate", kind=r0["kind"], m=r0["m"], config=r0["config"],
                cpu_aver=cpu.mean(), cpu_min=cpu.min(), cpu_max=cpu.max(),
                gap_aver=gap.mean(), gap_min=gap.min(), gap_max=gap.max())


def run_suite(out_path, kind="spp", ms=(5, 10), configs=("f2",), seeds=range(5),
              cfg: SolveConfig | None = None, dataset=None):
    """Write raw and aggregate rows to ``out_path``; returns the aggregate rows.

    Rows are flushed as they complete, so an interrupted run keeps its results.
    """
    cfg = cfg or SolveConfig()
    configs = [c if isinstance(c, BenchConfig) else BenchConfig.parse(c) for c in configs]
    aggs = []
    with open(out_path, "w", newline="") as fh:
        w = csv.DictWriter(fh, FIELDS)
        w.writeheader()
        try:
            for m in ms:
                for bc in configs:
                    rows = []
                    for seed in seeds:
                        t0 = time.perf_counter()
                        row = run_one(kind, m, seed, bc, replace(cfg), dataset)
                        log.info("%s m=%d seed=%d: %.2fs gap %.2f%% (%.1fs total)", bc.name, m,
                                 seed, row["cpu"], row["gap"], time.perf_counter() - t0)
                        w.writerow(row)
                        fh.flush()
                        rows.append(row)
                    agg = aggregate(rows)
                    w.writerow(agg)
                    fh.flush()
                    aggs.append(agg)
        except KeyboardInterrupt:
            log.warning("interrupted; partial results kept in %s", out_path)
    return aggs


def side_by_side(aggs):
    """One row per region count with every configuration's columns next to each other."""
    by_m = {}
    for a in aggs:
        row = by_m.setdefault(a["m"], {"m": a["m"]})
        for k in ("cpu_aver", "cpu_min", "cpu_max", "gap_aver", "gap_min", "gap_max"):
            row[f"{a['config']}:{k}"] = a[k]
    return [by_m[m] for m in sorted(by_m)]
