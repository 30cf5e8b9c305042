"""Vectorized operations on the product cone R_+^l x SOC(n_1) x ... x SOC(n_k).

Second-order cones of equal dimension are stored contiguously, so each group
is viewed as a ``(count, dim)`` array and handled with one numpy expression.
"""
from __future__ import annotations

import numpy as np

from ..errors import NumericalTrouble


class ProductCone:
    def __init__(self, l: int, soc_dims):
        self.l = int(l)
        self.groups = []  # (offset, count, dim)
        off = self.l
        dims = list(soc_dims)
        i = 0
        while i < len(dims):
            d = dims[i]
            j = i
            while j < len(dims) and dims[j] == d:
                j += 1
            self.groups.append((off, j - i, d))
            off += (j - i) * d
            i = j
        self.size = off
        self.degree = self.l + len(dims)

    def blocks(self, v):
        """Yield ``(count, dim)`` views of ``v`` for each SOC group."""
        for off, cnt, d in self.groups:
            yield v[off:off + cnt * d].reshape(cnt, d)

    def identity(self):
        e = np.zeros(self.size)
        e[:self.l] = 1.0
        for off, cnt, d in self.groups:
            e[off:off + cnt * d:d] = 1.0
        return e

    def margin(self, v):
        """Smallest ``v0 - ||v1||`` over cones (``v_k`` for LP entries)."""
        out = np.inf
        if self.l:
            out = v[:self.l].min()
        for B in self.blocks(v):
            out = min(out, np.min(B[:, 0] - np.linalg.norm(B[:, 1:], axis=1)))
        return out

    def shift_inside(self, v):
        """``v + (1 + a) e`` when ``v`` is not strictly interior (``a`` = violation)."""
        a = -self.margin(v)
        if a >= 0.0:
            v = v + (1.0 + a) * self.identity()
        return v

    def jordan(self, x, y):
        out = np.empty_like(x)
        out[:self.l] = x[:self.l] * y[:self.l]
        for X, Y, O in zip(self.blocks(x), self.blocks(y), self.blocks(out)):
            O[:, 0] = np.einsum("ij,ij->i", X, Y)
            O[:, 1:] = X[:, :1] * Y[:, 1:] + Y[:, :1] * X[:, 1:]
        return out

    def jordan_solve(self, lam, xi):
        """``u`` with ``lam o u = xi``."""
        out = np.empty_like(xi)
        out[:self.l] = xi[:self.l] / lam[:self.l]
        for L, X, O in zip(self.blocks(lam), self.blocks(xi), self.blocks(out)):
            l0 = L[:, 0]
            l1 = L[:, 1:]
            det = l0 * l0 - np.einsum("ij,ij->i", l1, l1)
            u0 = (l0 * X[:, 0] - np.einsum("ij,ij->i", l1, X[:, 1:])) / det
            O[:, 0] = u0
            O[:, 1:] = (X[:, 1:] - u0[:, None] * l1) / l0[:, None]
        return out

    def max_step(self, v, dv):
        """Largest ``a`` with ``v + a dv`` in the cone (``inf`` if unbounded)."""
        alpha = np.inf
        if self.l:
            d = dv[:self.l]
            neg = d < 0
            if np.any(neg):
                alpha = np.min(-v[:self.l][neg] / d[neg])
        for V, D in zip(self.blocks(v), self.blocks(dv)):
            alpha = min(alpha, _soc_step(V, D))
        return alpha


def _soc_step(V, D):
    """Vectorized boundary step for a group of SOCs with interior points ``V``."""
    jn = np.sqrt(np.maximum(V[:, 0] ** 2 - np.einsum("ij,ij->i", V[:, 1:], V[:, 1:]), 1e-300))
    U = V / jn[:, None]
    rho0 = (U[:, 0] * D[:, 0] - np.einsum("ij,ij->i", U[:, 1:], D[:, 1:])) / jn
    factor = (rho0 + D[:, 0] / jn) / (U[:, 0] + 1.0)
    rho1 = D[:, 1:] / jn[:, None] - factor[:, None] * U[:, 1:]
    t = np.linalg.norm(rho1, axis=1) - rho0
    pos = t > 0
    if not np.any(pos):
        return np.inf
    return float(np.min(1.0 / t[pos]))


class NTScaling:
    """Nesterov-Todd scaling ``W`` with ``W z = W^{-1} s = lam``."""

    def __init__(self, cone: ProductCone, s, z):
        self.cone = cone
        l = cone.l
        if cone.margin(s) <= 0.0 or cone.margin(z) <= 0.0:
            raise NumericalTrouble("iterate left the cone interior")
        self.d = np.sqrt(s[:l] / z[:l])
        self.beta = []
        self.v = []
        for S, Z in zip(cone.blocks(s), cone.blocks(z)):
            aa = np.sqrt(S[:, 0] ** 2 - np.einsum("ij,ij->i", S[:, 1:], S[:, 1:]))
            bb = np.sqrt(Z[:, 0] ** 2 - np.einsum("ij,ij->i", Z[:, 1:], Z[:, 1:]))
            Sn = S / aa[:, None]
            Zn = Z / bb[:, None]
            gamma = np.sqrt((1.0 + np.einsum("ij,ij->i", Sn, Zn)) / 2.0)
            Zj = Zn.copy()
            Zj[:, 1:] *= -1.0
            wbar = (Sn + Zj) / (2.0 * gamma[:, None])
            e = np.zeros_like(wbar)
            e[:, 0] = 1.0
            v = (wbar + e) / np.sqrt(2.0 * (wbar[:, 0] + 1.0))[:, None]
            self.beta.append(np.sqrt(aa / bb))
            self.v.append(v)
        self.lam = self.apply(z)

    def apply(self, x, inverse=False):
        out = np.empty_like(x)
        l = self.cone.l
        out[:l] = x[:l] / self.d if inverse else x[:l] * self.d
        for X, O, beta, v in zip(self.cone.blocks(x), self.cone.blocks(out), self.beta, self.v):
            if not inverse:
                # beta (2 v v^T - J) x
                vx = np.einsum("ij,ij->i", v, X)
                O[:] = 2.0 * vx[:, None] * v
                O[:, 0] -= X[:, 0]
                O[:, 1:] += X[:, 1:]
                O *= beta[:, None]
            else:
                # (1/beta) (2 J v v^T J - J) x
                Jx = X.copy()
                Jx[:, 1:] *= -1.0
                Jv = v.copy()
                Jv[:, 1:] *= -1.0
                vJx = np.einsum("ij,ij->i", v, Jx)
                O[:] = 2.0 * vJx[:, None] * Jv - Jx
                O /= beta[:, None]
        return out

    def squared_blocks(self):
        """``W^2`` as an LP diagonal and ``(count, dim, dim)`` dense SOC blocks."""
        mats = []
        for beta, v in zip(self.beta, self.v):
            cnt, d = v.shape
            J = np.eye(d)
            J[1:, 1:] *= -1.0
            H = 2.0 * np.einsum("ki,kj->kij", v, v) - J
            W = beta[:, None, None] * H
            mats.append(np.einsum("kij,kjl->kil", W, W))
        return self.d ** 2, mats
