"""Quasi-definite KKT systems of the interior-point method.

The matrix is::

    [ dI   A^T   G^T        ]
    [ A   -dI    0          ]
    [ G    0    -(W^2 + dI) ]

with a small static regularization ``d``.  Solutions are polished with
iterative refinement against the unregularized operator.  The sparsity
pattern is fixed for a given problem, so only the ``W^2`` entries are
refreshed between iterations.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import NumericalTrouble

DENSE_LIMIT = 600
PIVOT_THRESHOLD = 0.1


class KKTSolver:
    def __init__(self, A, G, cone, reg=1e-9, refine=4):
        self.A = A.tocsr()
        self.G = G.tocsr()
        self.AT = A.T.tocsr()
        self.GT = G.T.tocsr()
        self.cone = cone
        self.n = A.shape[1]
        self.p = A.shape[0]
        self.m = G.shape[0]
        self.N = self.n + self.p + self.m
        self.reg = reg
        self.refine = refine
        self.dense = self.N <= DENSE_LIMIT
        self._build_pattern()

    def _build_pattern(self):
        n, p, m = self.n, self.p, self.m
        A = self.A.tocoo()
        G = self.G.tocoo()
        rows = [A.row + n, A.col, G.row + n + p, G.col,
                np.arange(n), np.arange(n, n + p)]
        cols = [A.col, A.row + n, G.col, G.row + n + p,
                np.arange(n), np.arange(n, n + p)]
        vals = [A.data, A.data, G.data, G.data,
                np.full(n, self.reg), np.full(p, -self.reg)]
        # W^2 block entries, in the order produced by _w_values
        l = self.cone.l
        wr = [np.arange(l)]
        wc = [np.arange(l)]
        for off, cnt, d in self.cone.groups:
            base = off + d * np.arange(cnt)
            ii, jj = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
            wr.append((base[:, None, None] + ii[None]).ravel())
            wc.append((base[:, None, None] + jj[None]).ravel())
        wr = np.concatenate(wr) + n + p
        wc = np.concatenate(wc) + n + p
        self._nw = wr.size
        static_r = np.concatenate(rows)
        static_c = np.concatenate(cols)
        self._static = np.concatenate(vals)
        r = np.concatenate([static_r, wr])
        c = np.concatenate([static_c, wc])
        tag = np.arange(1, r.size + 1, dtype=float)
        K = sp.coo_matrix((tag, (r, c)), shape=(self.N, self.N)).tocsc()
        if K.nnz != r.size:
            raise RuntimeError("duplicate KKT pattern entries")
        self._order = K.data.astype(np.int64) - 1
        self._K = K

    def _w_values(self, W):
        diag, mats = W.squared_blocks()
        parts = [-(diag + self.reg)]
        for M in mats:
            d = M.shape[1]
            parts.append(-(M + self.reg * np.eye(d)[None]).ravel())
        return np.concatenate(parts), diag, mats

    def factor(self, W):
        wv, self._diag, self._mats = self._w_values(W)
        data = np.concatenate([self._static, wv])
        K = self._K
        K.data = data[self._order]
        if self.dense:
            try:
                self._lu = sla.lu_factor(K.toarray(), check_finite=True)
            except (ValueError, sla.LinAlgError) as exc:
                raise NumericalTrouble(f"KKT factorization failed: {exc}") from exc
            return
        try:
            # threshold pivoting: equality rows may be rank deficient and W^2
            # spans many orders of magnitude near the optimum
            self._lu = spla.splu(K, permc_spec="COLAMD", diag_pivot_thresh=PIVOT_THRESHOLD)
        except RuntimeError as exc:
            raise NumericalTrouble(f"KKT factorization failed: {exc}") from exc

    def _raw_solve(self, r):
        if self.dense:
            return sla.lu_solve(self._lu, r)
        return self._lu.solve(r)

    def matvec(self, v):
        """Unregularized KKT operator."""
        n, p = self.n, self.p
        x, y, z = v[:n], v[n:n + p], v[n + p:]
        out = np.empty_like(v)
        out[:n] = self.AT @ y + self.GT @ z
        out[n:n + p] = self.A @ x
        w2z = np.empty_like(z)
        l = self.cone.l
        w2z[:l] = self._diag * z[:l]
        for (off, cnt, d), M in zip(self.cone.groups, self._mats):
            Z = z[off:off + cnt * d].reshape(cnt, d)
            w2z[off:off + cnt * d] = np.einsum("kij,kj->ki", M, Z).ravel()
        out[n + p:] = self.G @ x - w2z
        return out

    def solve(self, rhs):
        x = self._raw_solve(rhs)
        scale = max(1.0, np.abs(rhs).max())
        for _ in range(self.refine):
            res = rhs - self.matvec(x)
            if np.abs(res).max() <= 1e-14 * scale:
                break
            x = x + self._raw_solve(res)
        if not np.all(np.isfinite(x)):
            raise NumericalTrouble("non-finite KKT solution")
        return x
