"""Compile a :class:`~lpregions.model.ConicModel` into array standard form.

The target is::

    minimize    c @ x + offset
    subject to  A x = b
                G x + s = h,   s in K = R_+^l x SOC(n_1) x ... x SOC(n_k)

Variables pinned by bounds (``lb == ub``) or by ``fixed`` are substituted
out.  A small presolve then propagates zeros to a fixpoint, which matters a
lot for branch-and-bound nodes where most binaries are fixed to 0: the
coupling rows ``sum_e lambda_e = z`` then pin every ``lambda_e`` too.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..errors import Infeasible

_ROW_TOL = 1e-9


@dataclass
class StandardForm:
    c: np.ndarray
    offset: float
    A: sp.csc_matrix
    b: np.ndarray
    G: sp.csc_matrix
    h: np.ndarray
    l: int
    soc_dims: list
    columns: np.ndarray  # model handle of each column
    fixed_values: np.ndarray  # full-length; NaN where free
    n_model: int

    @property
    def n(self):
        return self.c.size

    def expand(self, xcol):
        """Full model vector from a column solution."""
        x = self.fixed_values.copy()
        x[self.columns] = xcol
        return np.nan_to_num(x, nan=0.0)


def _bounds(m, bounds):
    lb = np.array([-np.inf if v.lb is None else v.lb for v in m.variables], dtype=float)
    ub = np.array([np.inf if v.ub is None else v.ub for v in m.variables], dtype=float)
    if bounds:
        for h, (lo, hi) in bounds.items():
            if lo is not None:
                lb[h] = max(lb[h], lo)
            if hi is not None:
                ub[h] = min(ub[h], hi)
    return lb, ub


def presolve(m, fixed=None, bounds=None):
    """Return ``(values, lb, ub)`` where ``values`` is NaN for free variables.

    Raises :class:`Infeasible` when a row or bound is violated by the
    propagated fixings.
    """
    n = m.n
    lb, ub = _bounds(m, bounds)
    val = np.full(n, np.nan)
    if fixed:
        for h, v in fixed.items():
            val[h] = v
    if np.any(lb > ub + _ROW_TOL):
        raise Infeasible("empty variable bounds")
    pinned = np.isnan(val) & (ub - lb <= 0.0)
    val[pinned] = lb[pinned]

    rows = [(list(r.coefs.items()), r.sense, r.rhs) for r in m.linear if r.coefs]
    active = list(range(len(rows)))
    changed = True
    while changed:
        changed = False
        keep = []
        for ri in active:
            coefs, sense, rhs = rows[ri]
            free = []
            rest = rhs
            for h, a in coefs:
                v = val[h]
                if np.isnan(v):
                    free.append((h, a))
                else:
                    rest -= a * v
            if not free:
                _check_row(sense, rest)
                continue
            if sense == "=" and len(free) == 1:
                h, a = free[0]
                val[h] = rest / a
                changed = True
                continue
            if abs(rest) <= _ROW_TOL and all(lb[h] >= 0.0 for h, _ in free):
                pos = all(a > 0 for _, a in free)
                neg = all(a < 0 for _, a in free)
                zero_forced = (sense == "=" and (pos or neg)) or \
                    (sense == "<=" and pos) or (sense == ">=" and neg)
                if zero_forced:
                    for h, _ in free:
                        val[h] = 0.0
                    changed = True
                    continue
            keep.append(ri)
        active = keep
    done = ~np.isnan(val)
    if np.any(val[done] < lb[done] - 1e-7) or np.any(val[done] > ub[done] + 1e-7):
        raise Infeasible("fixing violates a bound")
    return val, lb, ub


def _check_row(sense, rest):
    # rest = rhs - lhs
    tol = _ROW_TOL * max(1.0, abs(rest))
    if sense == "=" and abs(rest) > 1e-7:
        raise Infeasible("fixed equality row violated")
    if sense == "<=" and rest < -1e-7 - tol:
        raise Infeasible("fixed <= row violated")
    if sense == ">=" and rest > 1e-7 + tol:
        raise Infeasible("fixed >= row violated")


def compile_model(m, fixed=None, bounds=None) -> StandardForm:
    """Standard form of ``m`` with ``fixed`` values and tightened ``bounds``.

    Binary flags are ignored: callers relax (or fix) them first.
    """
    val, lb, ub = presolve(m, fixed, bounds)
    free = np.isnan(val)
    fv = np.where(free, 0.0, val)

    # only keep columns that occur somewhere
    used = np.zeros(m.n, dtype=bool)
    for r in m.linear:
        for h in r.coefs:
            used[h] = True
    for r in m.socs:
        for e in [r.t, *r.args]:
            for h in e.terms:
                used[h] = True
    for h in m.objective.terms:
        used[h] = True
    cols = np.flatnonzero(free & used)
    # free, unused, no objective: pick a feasible value
    idle = np.flatnonzero(free & ~used)
    val[idle] = np.clip(0.0, lb[idle], ub[idle])
    col_of = np.full(m.n, -1)
    col_of[cols] = np.arange(cols.size)
    n = cols.size

    c = np.zeros(n)
    offset = m.objective.const
    for h, a in m.objective.terms.items():
        if col_of[h] >= 0:
            c[col_of[h]] += a
        else:
            offset += a * fv[h]

    eq_r, eq_c, eq_v, b = [], [], [], []
    lp_r, lp_c, lp_v, lp_h = [], [], [], []

    def split(coefs, rhs, sign=-1.0):
        # free columns, their coefficients, and rhs + sign * (fixed part)
        cs, vs = [], []
        for h, a in coefs:
            j = col_of[h]
            if j >= 0:
                cs.append(j)
                vs.append(a)
            else:
                rhs += sign * a * fv[h]
        return cs, vs, rhs

    for r in m.linear:
        cs, vs, rhs = split(r.coefs.items(), r.rhs)
        if not cs:
            _check_row(r.sense, rhs)
            continue
        if r.sense == "=":
            k = len(b)
            eq_r += [k] * len(cs)
            eq_c += cs
            eq_v += vs
            b.append(rhs)
        else:
            k = len(lp_h)
            sgn = 1.0 if r.sense == "<=" else -1.0
            lp_r += [k] * len(cs)
            lp_c += cs
            lp_v += [sgn * v for v in vs]
            lp_h.append(sgn * rhs)
    for j, h in enumerate(cols):
        if np.isfinite(lb[h]):
            k = len(lp_h)
            lp_r.append(k)
            lp_c.append(j)
            lp_v.append(-1.0)
            lp_h.append(-lb[h])
        if np.isfinite(ub[h]):
            k = len(lp_h)
            lp_r.append(k)
            lp_c.append(j)
            lp_v.append(1.0)
            lp_h.append(ub[h])

    # SOC rows: s = h - G x, with s_0 = t(x), s_i = arg_i(x)
    socs = []
    for r in m.socs:
        entries = []
        for e in [r.t, *r.args]:
            cs, vs, const = split(e.terms.items(), e.const, 1.0)
            entries.append((cs, vs, const))
        t_cs, t_vs, t_const = entries[0]
        args = [a for a in entries[1:] if a[0] or a[2] != 0.0]
        if not args:
            # plain t(x) >= 0
            if not t_cs:
                if t_const < -1e-7:
                    raise Infeasible("fixed cone row violated")
                continue
            k = len(lp_h)
            lp_r += [k] * len(t_cs)
            lp_c += t_cs
            lp_v += [-v for v in t_vs]
            lp_h.append(t_const)
            continue
        if not t_cs and all(not a[0] for a in args):
            if np.hypot.reduce([a[2] for a in args]) > t_const + 1e-7:
                raise Infeasible("fixed cone row violated")
            continue
        socs.append([entries[0], *args])

    l = len(lp_h)
    socs.sort(key=len)  # group equal dimensions together (stable)
    g_r, g_c, g_v, g_h = list(lp_r), list(lp_c), list(lp_v), list(lp_h)
    dims = []
    k = l
    for rows in socs:
        dims.append(len(rows))
        for cs, vs, const in rows:
            g_r += [k] * len(cs)
            g_c += cs
            g_v += [-v for v in vs]
            g_h.append(const)
            k += 1

    A = sp.csc_matrix((eq_v, (eq_r, eq_c)), shape=(len(b), n))
    G = sp.csc_matrix((g_v, (g_r, g_c)), shape=(k, n))
    A.sum_duplicates()
    G.sum_duplicates()
    known = val.copy()
    known[cols] = np.nan
    return StandardForm(c, offset, A, np.array(b, dtype=float), G,
                        np.array(g_h, dtype=float), l, dims, cols, known, m.n)
