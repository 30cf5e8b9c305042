"""lp norms, polar vectors, lp-angles and conic encodings of norm epigraphs.

A norm is tagged by :class:`PNorm`, a rational exponent ``p = q/r`` in lowest
terms or infinity.  The encoding of ``Z >= ||X - Y||_p`` depends on the tag:

* ``p = 2``: a single second-order cone row.
* ``p in {1, inf}``: one linear row per vertex of the polar unit ball.
* other rational ``p``: per coordinate, ``U_k >= |X_k - Y_k|`` and
  ``U_k**q <= W_k**r * Z**(q-r)`` with ``sum W_k <= Z``.  The power inequality
  is split into a binary tower of rotated cones ``a**2 <= b*c``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import config
from .errors import InvalidExponent, UnsupportedExponent, ZeroVector
from .model import Expr, as_expr

_MAX_DENOMINATOR = 10**6


@dataclass(frozen=True, order=True)
class PNorm:
    """Exponent tag.  ``q = r = 0`` encodes the infinity norm."""

    q: int
    r: int

    def __post_init__(self):
        if self.is_inf:
            return
        if self.r < 1 or self.q < self.r:
            raise InvalidExponent(f"need q >= r >= 1, got {self.q}/{self.r}")
        if math.gcd(self.q, self.r) != 1:
            raise InvalidExponent(f"{self.q}/{self.r} is not in lowest terms")

    @classmethod
    def inf(cls):
        return cls(0, 0)

    @classmethod
    def rational(cls, q, r=1):
        g = math.gcd(int(q), int(r))
        return cls(int(q) // g, int(r) // g)

    @classmethod
    def parse(cls, spec) -> "PNorm":
        """Accept ``"3/2"``, ``"inf"``, ``2``, ``1.5``, ``Fraction`` or a PNorm."""
        if isinstance(spec, PNorm):
            return spec
        if isinstance(spec, str):
            s = spec.strip().lower()
            if s in ("inf", "infinity", "∞"):
                return cls.inf()
            try:
                frac = Fraction(s)
            except (ValueError, ZeroDivisionError) as exc:
                raise InvalidExponent(f"cannot parse exponent {spec!r}") from exc
        elif isinstance(spec, float) and math.isinf(spec):
            if spec < 0:
                raise InvalidExponent("negative infinity")
            return cls.inf()
        else:
            frac = Fraction(str(spec)) if isinstance(spec, float) else Fraction(spec)
        if frac < 1:
            raise InvalidExponent(f"exponent {spec!r} is below 1")
        if frac.denominator > _MAX_DENOMINATOR:
            raise UnsupportedExponent(f"exponent {spec!r} is not a small rational")
        return cls.rational(frac.numerator, frac.denominator)

    @property
    def is_inf(self):
        return self.q == 0 and self.r == 0

    @property
    def value(self) -> float:
        return math.inf if self.is_inf else self.q / self.r

    @property
    def is_smooth(self):
        """True for 1 < p < inf (where polar vectors and Snell's law apply)."""
        return not self.is_inf and self.q != self.r

    def dual(self) -> "PNorm":
        if self.is_inf:
            return PNorm(1, 1)
        if self.q == self.r:
            return PNorm.inf()
        return PNorm.rational(self.q, self.q - self.r)

    def __str__(self):
        if self.is_inf:
            return "inf"
        return str(self.q) if self.r == 1 else f"{self.q}/{self.r}"


def as_pnorm(p) -> PNorm:
    return PNorm.parse(p)


def lp_norm(x, p) -> float:
    """``||x||_p``; scaled by ``max|x_k|`` to avoid overflow for large p."""
    p = as_pnorm(p)
    a = np.abs(np.asarray(x, dtype=float)).ravel()
    if a.size == 0:
        return 0.0
    m = a.max()
    if p.is_inf or m == 0.0:
        return float(m)
    if p.q == p.r:
        return float(a.sum())
    if p.q == 2 and p.r == 1:
        return float(np.sqrt(a @ a))
    pv = p.value
    return float(m * np.sum((a / m) ** pv) ** (1.0 / pv))


def polar_vector(v, p) -> np.ndarray:
    """Polar vector of ``v``: same lp-angle direction, ``||v°||_{p°} = ||v||_p``."""
    p = as_pnorm(p)
    if not p.is_smooth:
        raise InvalidExponent(f"polar vector needs 1 < p < inf, got {p}")
    v = np.asarray(v, dtype=float)
    nv = lp_norm(v, p)
    if nv == 0.0:
        return np.zeros_like(v)
    return (np.abs(v) / nv) ** (p.value - 1.0) * np.sign(v) * nv


def lp_angle(v, w, p) -> float:
    """``arccos(v.w / (||v||_p ||w||_{p°}))`` in [0, pi]."""
    p = as_pnorm(p)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    nv = lp_norm(v, p)
    nw = lp_norm(w, p.dual())
    if nv == 0.0 or nw == 0.0:
        raise ZeroVector("lp-angle of a zero vector")
    c = float(v @ w) / (nv * nw)
    if abs(c) > 1.0:
        if abs(c) - 1.0 > config.ANGLE_CLAMP_TOL:
            raise ArithmeticError(f"cosine {c!r} outside [-1, 1] beyond rounding")
        c = math.copysign(1.0, c)
    return math.acos(c)


# epigraph encoding -------------------------------------------------------------

@dataclass
class ConeBlock:
    """Fragment of a conic model encoding ``Z >= ||X - Y||_p``.

    ``aux`` maps local keys to ``(name, lower bound)``.  Rows refer to the
    caller's variable handles and to these local keys; every linear row is
    ``expr sense 0``.  :func:`lpregions.model.splice_block` installs it.
    """

    p: PNorm
    dim: int
    Z: Expr
    aux: dict = field(default_factory=dict)
    linear: list = field(default_factory=list)
    socs: list = field(default_factory=list)

    def new_aux(self, name, lb=None):
        key = ("aux", len(self.aux))
        self.aux[key] = (name, lb)
        return key

    def cone_rows_per_coordinate(self):
        return len(self.socs) // self.dim if self.dim else 0


def rotated_cone(a: Expr, b: Expr, c: Expr):
    """``a**2 <= b*c, b, c >= 0`` as the SOC row ``||(2a, b-c)|| <= b+c``."""
    return (b + c, [a * 2.0, b - c])


def power_tower(q: int, r: int):
    """Rotated cones encoding ``u**q <= w**r * z**(q-r)`` for ``u, w, z >= 0``.

    Leaves of a complete binary tree of height ``k = ceil(log2 q)`` hold ``r``
    copies of ``w``, ``q - r`` copies of ``z`` and ``2**k - q`` copies of
    ``u``; every internal node is a geometric mean of its two children and the
    root is ``u`` itself.  A segment of identical leaves collapses to that
    leaf, and equal segments share one node, so at most ``2k - 1`` cones are
    emitted.

    Returns ``(nodes, cones)`` where ``nodes`` lists the tower variables as
    ``("t", i)`` keys and each cone is ``(a, b, c)`` over ``{"u", "w", "z"}``
    and those keys.
    """
    k = max(1, math.ceil(math.log2(q)))
    leaves = ("w",) * r + ("z",) * (q - r) + ("u",) * (2**k - q)
    memo = {}
    nodes = []
    cones = []

    def build(seg):
        if all(s == seg[0] for s in seg):
            return seg[0]
        if seg in memo:
            return memo[seg]
        half = len(seg) // 2
        left, right = build(seg[:half]), build(seg[half:])
        node = ("t", len(nodes))
        nodes.append(node)
        cones.append((node, left, right))
        memo[seg] = node
        return node

    half = len(leaves) // 2
    cones.append(("u", build(leaves[:half]), build(leaves[half:])))
    return nodes, cones


def norm_epigraph_block(p, dim, X, Y, Z) -> ConeBlock:
    """Conic encoding of ``Z >= ||X - Y||_p``.

    Parameters
    ----------
    p : PNorm or exponent spec
    dim : int
    X, Y : sequences of length ``dim``
        Entries are Expr, integer variable handles, or float constants.
    Z : Expr or variable handle
    """
    p = as_pnorm(p)
    X = [_coerce(x) for x in X]
    Y = [_coerce(y) for y in Y]
    Z = _coerce(Z)
    if len(X) != dim or len(Y) != dim:
        raise ValueError("X and Y must have length dim")
    diff = [x - y for x, y in zip(X, Y)]
    block = ConeBlock(p, dim, Z)

    if not p.is_inf and p.q == 2 and p.r == 1:
        block.socs.append((Z, diff))
        return block

    if p.is_inf or p.q == p.r:
        if dim > config.MAX_POLYHEDRAL_DIM:
            raise UnsupportedExponent(
                f"polyhedral norm in dimension {dim} > {config.MAX_POLYHEDRAL_DIM}")
        if p.is_inf:
            # polar ball of l_inf is the cross-polytope
            dirs = [s * np.eye(dim)[k] for k in range(dim) for s in (1.0, -1.0)]
        else:
            dirs = [np.array(e) for e in itertools.product((1.0, -1.0), repeat=dim)]
        for e in dirs:
            row = Z.copy()
            for k in range(dim):
                if e[k] != 0.0:
                    row.iadd(diff[k], -e[k])
            block.linear.append((row, ">="))
        return block

    nodes, cones = power_tower(p.q, p.r)
    wsum = Expr()
    for k in range(dim):
        U = Expr.var(block.new_aux(f"U[{k}]"))
        W = Expr.var(block.new_aux(f"W[{k}]", 0.0))
        block.linear.append((U - diff[k], ">="))
        block.linear.append((U + diff[k], ">="))
        wsum.iadd(W)
        local = {"u": U, "w": W, "z": Z}
        for node in nodes:
            local[node] = Expr.var(block.new_aux(f"T[{k},{node[1]}]"))
        for a, b, c in cones:
            block.socs.append(rotated_cone(local[a], local[b], local[c]))
    block.linear.append((Z - wsum, ">="))
    return block


def _coerce(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return Expr.var(int(v))
    return as_expr(float(v))


def verify_block(p, samples) -> float:
    """Largest ``|Z* - ||x - y||_p|`` where ``Z*`` minimizes ``Z`` over the block.

    ``X`` is a free variable pinned to ``x`` by equality rows and ``Y`` is the
    constant ``y``, so the solve goes through the same path as a formulation.
    """
    from .model import ConicModel, splice_block
    from .solver.ipm import IPMSettings, solve_relaxation

    p = as_pnorm(p)
    tight = IPMSettings(feas_tol=1e-11, gap_tol=1e-11, abs_gap_tol=1e-11)
    worst = 0.0
    for x, y in samples:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        m = ConicModel()
        xs = [m.add_var(f"X[{k}]") for k in range(len(x))]
        z = m.add_var("Z")
        for h, v in zip(xs, x):
            m.add_linear(Expr.var(h), "=", v)
        splice_block(m, norm_epigraph_block(p, len(x), xs, list(y), z))
        m.set_objective(Expr.var(z))
        sol = solve_relaxation(m, settings=tight)
        worst = max(worst, abs(sol.objective - lp_norm(x - y, p)))
    return worst
