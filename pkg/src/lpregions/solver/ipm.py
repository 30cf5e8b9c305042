"""Primal-dual interior-point method for linear + second-order cone programs.

The solver works on the homogeneous self-dual embedding of the standard
form produced by :mod:`lpregions.solver.standard`, with Nesterov-Todd
scaling and Mehrotra predictor-corrector steps.  It returns either an
optimal primal-dual pair or an infeasibility certificate, which makes it
usable as the node engine of branch-and-bound without any phase-one.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import Infeasible, ModelError, NumericalTrouble
from .cones import NTScaling, ProductCone
from .kkt import KKTSolver
from .standard import StandardForm, compile_model

log = logging.getLogger(__name__)

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"
TROUBLE = "NumericalTrouble"


@dataclass
class IPMSettings:
    feas_tol: float = 1e-8
    gap_tol: float = 1e-8
    abs_gap_tol: float = 1e-9
    # accepted when the iteration stalls before reaching the tight tolerances
    loose_tol: float = 1e-6
    max_iter: int = 200
    step_fraction: float = 0.99


@dataclass
class RelaxSolution:
    status: str
    x: np.ndarray | None = None
    objective: float = np.nan
    y: np.ndarray | None = None
    z: np.ndarray | None = None
    iterations: int = 0
    primal_residual: float = np.nan
    dual_residual: float = np.nan
    gap: float = np.nan
    accurate: bool = True
    certificate: dict = field(default_factory=dict)

    @property
    def optimal(self):
        return self.status == OPTIMAL


def _norm(v):
    return float(np.linalg.norm(v)) if v.size else 0.0


def solve_standard(sf: StandardForm, settings: IPMSettings | None = None) -> RelaxSolution:
    """Run the embedded interior-point method on a standard-form problem."""
    st = settings or IPMSettings()
    c, A, b, G, h = sf.c, sf.A, sf.b, sf.G, sf.h
    n, p, m = c.size, b.size, h.size
    cone = ProductCone(sf.l, sf.soc_dims)
    if cone.size != m:
        raise ModelError("cone size does not match G")

    if m == 0:
        return _solve_equality_only(sf)

    kkt = KKTSolver(A, G, cone)
    AT, GT = kkt.AT, kkt.GT
    e = cone.identity()
    nb, nh, nc = max(1.0, _norm(b)), max(1.0, _norm(h)), max(1.0, _norm(c))

    # initial point: least-norm primal slack and dual multiplier, pushed inside K
    class _Identity:
        def squared_blocks(self_inner):
            return np.ones(cone.l), [np.broadcast_to(np.eye(d), (cnt, d, d)).copy()
                                     for _, cnt, d in cone.groups]

    kkt.factor(_Identity())
    sol = kkt.solve(np.concatenate([np.zeros(n), b, h]))
    x = sol[:n]
    s = cone.shift_inside(-sol[n + p:])
    sol = kkt.solve(np.concatenate([-c, np.zeros(p), np.zeros(m)]))
    y = sol[n:n + p]
    z = cone.shift_inside(sol[n + p:])
    tau, kappa = 1.0, 1.0

    best = None
    it = 0
    for it in range(st.max_iter + 1):
        rx = AT @ y + GT @ z + c * tau
        ry = A @ x - b * tau
        rz = G @ x + s - h * tau
        cx, by, hz = c @ x, b @ y, h @ z
        rt = kappa + cx + by + hz
        mu = (s @ z + tau * kappa) / (cone.degree + 1)

        pres = max(_norm(ry) / nb, _norm(rz) / nh) / tau
        dres = _norm(rx) / nc / tau
        pcost = cx / tau
        dcost = -(by + hz) / tau
        gap = (s @ z) / tau**2
        if pcost < 0:
            relgap = gap / -pcost
        elif dcost > 0:
            relgap = gap / dcost
        else:
            relgap = np.inf
        relgap = min(relgap, gap / max(1.0, abs(pcost)))
        log.debug("it %d pcost %.9g dcost %.9g pres %.2e dres %.2e gap %.2e tau %.2e kap %.2e",
                  it, pcost, dcost, pres, dres, gap, tau, kappa)

        if pres < st.feas_tol and dres < st.feas_tol and (
                gap < st.abs_gap_tol or relgap < st.gap_tol):
            return _finish(sf, OPTIMAL, x / tau, y / tau, z / tau, s / tau, it, pres, dres,
                           relgap, True)
        if pres < st.loose_tol and dres < st.loose_tol and (
                gap < st.loose_tol or relgap < st.loose_tol):
            best = (x / tau, y / tau, z / tau, s / tau, it, pres, dres, relgap)

        # infeasibility certificates
        if by + hz < 0:
            nrm = -(by + hz)
            if _norm(AT @ y + GT @ z) / nrm < st.feas_tol:
                return RelaxSolution(INFEASIBLE, iterations=it,
                                     certificate=dict(y=y / nrm, z=z / nrm))
        if cx < 0:
            nrm = -cx
            if max(_norm(A @ x), _norm(G @ x + s)) / nrm < st.feas_tol:
                return RelaxSolution(UNBOUNDED, iterations=it, certificate=dict(x=x / nrm))
        if it == st.max_iter:
            break

        try:
            W = NTScaling(cone, s, z)
            kkt.factor(W)
            lam = W.lam
            d1 = kkt.solve(np.concatenate([-c, b, h]))
            x1, y1, z1 = d1[:n], d1[n:n + p], d1[n + p:]
            denom = c @ x1 + b @ y1 + h @ z1 - kappa / tau

            def direction(eta, xi_s, xi_k):
                u = cone.jordan_solve(lam, xi_s)
                rhs = np.concatenate([-eta * rx, -eta * ry, -eta * rz - W.apply(u)])
                d2 = kkt.solve(rhs)
                x2, y2, z2 = d2[:n], d2[n:n + p], d2[n + p:]
                dtau = (-eta * rt - xi_k / tau - (c @ x2 + b @ y2 + h @ z2)) / denom
                dx = x2 + dtau * x1
                dy = y2 + dtau * y1
                dz = z2 + dtau * z1
                ds = W.apply(u - W.apply(dz))
                dkap = (xi_k - kappa * dtau) / tau
                return dx, dy, dz, ds, dtau, dkap

            def step_len(ds, dz, dtau, dkap):
                a = min(cone.max_step(s, ds), cone.max_step(z, dz))
                if dtau < 0:
                    a = min(a, -tau / dtau)
                if dkap < 0:
                    a = min(a, -kappa / dkap)
                return a

            # predictor
            aff = direction(1.0, -cone.jordan(lam, lam), -tau * kappa)
            a_aff = min(1.0, step_len(aff[3], aff[2], aff[4], aff[5]))
            sigma = min(1.0, max(0.0, (1.0 - a_aff) ** 3))
            # corrector
            xi_s = (-cone.jordan(lam, lam)
                    - cone.jordan(W.apply(aff[3], inverse=True), W.apply(aff[2]))
                    + sigma * mu * e)
            xi_k = -tau * kappa - aff[4] * aff[5] + sigma * mu
            dx, dy, dz, ds, dtau, dkap = direction(1.0 - sigma, xi_s, xi_k)
            alpha = min(1.0, st.step_fraction * step_len(ds, dz, dtau, dkap))
            log.debug("   a_aff %.3f sigma %.3g alpha %.3f", a_aff, sigma, alpha)
        except (NumericalTrouble, FloatingPointError, ZeroDivisionError) as exc:
            log.debug("iteration %d failed: %s", it, exc)
            break
        if not np.isfinite(alpha) or alpha < 1e-12:
            break

        x = x + alpha * dx
        y = y + alpha * dy
        z = z + alpha * dz
        s = s + alpha * ds
        tau = tau + alpha * dtau
        kappa = kappa + alpha * dkap
        # renormalize the embedding; it is invariant under positive scaling
        scale = max(tau, kappa)
        if scale > 1e6 or scale < 1e-6:
            x, y, z, s = x / scale, y / scale, z / scale, s / scale
            tau, kappa = tau / scale, kappa / scale

    if best is not None:
        return _finish(sf, OPTIMAL, *best, False)
    raise NumericalTrouble(f"no convergence after {it} iterations")


def _finish(sf, status, x, y, z, s, it, pres, dres, relgap, accurate):
    xf = sf.expand(x)
    obj = float(sf.c @ x + sf.offset)
    return RelaxSolution(status, xf, obj, y, z, it, pres, dres, relgap, accurate)


def _solve_equality_only(sf):
    """No cone rows: only ``A x = b``; bounded only if ``c`` is in range(A^T)."""
    from scipy.sparse.linalg import lsqr

    A = sf.A
    if sf.n == 0:
        return _finish(sf, OPTIMAL, np.zeros(0), np.zeros(0), np.zeros(0), np.zeros(0),
                       0, 0.0, 0.0, 0.0, True)
    x = lsqr(A, sf.b, atol=1e-14, btol=1e-14)[0] if A.shape[0] else np.zeros(sf.n)
    if A.shape[0] and np.linalg.norm(A @ x - sf.b) > 1e-8 * max(1.0, np.linalg.norm(sf.b)):
        return RelaxSolution(INFEASIBLE)
    y = -lsqr(A.T, sf.c, atol=1e-14, btol=1e-14)[0] if A.shape[0] else np.zeros(0)
    if np.linalg.norm(A.T @ y + sf.c) > 1e-8 * max(1.0, np.linalg.norm(sf.c)):
        return RelaxSolution(UNBOUNDED)
    return _finish(sf, OPTIMAL, x, y, np.zeros(0), np.zeros(0), 0, 0.0, 0.0, 0.0, True)


def solve_relaxation(m, fixed=None, bounds=None, settings=None, backend=None) -> RelaxSolution:
    """Solve the continuous conic program ``m`` (binaries must be relaxed or fixed).

    Parameters
    ----------
    m : ConicModel
    fixed : dict, optional
        Variable handle -> value substitutions.
    bounds : dict, optional
        Variable handle -> ``(lb, ub)`` tightenings (branching bounds).
    backend : callable, optional
        Replacement engine taking a :class:`StandardForm` and returning a
        :class:`RelaxSolution`; defaults to the embedded interior-point method.

    Returns
    -------
    RelaxSolution
        ``status`` is ``"Optimal"``, ``"Infeasible"`` or ``"Unbounded"``.

    Raises
    ------
    NumericalTrouble
        When the iteration fails to converge.
    """
    free_bin = [i for i, v in enumerate(m.variables) if v.binary
                and not (fixed and i in fixed)
                and not (bounds and i in bounds and bounds[i][0] == bounds[i][1])]
    if free_bin and any(m.variables[i].lb != m.variables[i].ub for i in free_bin):
        raise ModelError("model has free binaries; relax it first")
    try:
        sf = compile_model(m, fixed, bounds)
    except Infeasible as exc:
        return RelaxSolution(INFEASIBLE, certificate=dict(presolve=str(exc)))
    engine = backend or solve_standard
    return engine(sf, settings) if backend is None else engine(sf)
