"""Solver-agnostic conic model: variables, linear rows, second-order cone rows.

Every formulation builder emits a :class:`ConicModel`.  Rows are stored with
affine expressions (:class:`Expr`) over integer variable handles, so the
model can be inspected and dumped before it is compiled into the array form
consumed by the interior-point engine.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ModelError


class Expr:
    """Affine expression ``sum(coef * var) + const``.

    Keys of ``terms`` are variable handles.  Inside a :class:`~lpregions.norms.ConeBlock`
    they may also be local auxiliary keys, which are remapped on splicing.
    """

    __slots__ = ("terms", "const")

    def __init__(self, terms=None, const=0.0):
        self.terms = dict(terms) if terms else {}
        self.const = float(const)

    @classmethod
    def var(cls, h, coef=1.0):
        return cls({h: float(coef)})

    @classmethod
    def constant(cls, c):
        return cls(None, c)

    def copy(self):
        return Expr(self.terms, self.const)

    def iadd(self, other, scale=1.0):
        """In-place ``self += scale * other`` (other: Expr or number)."""
        if isinstance(other, Expr):
            t = self.terms
            for k, v in other.terms.items():
                t[k] = t.get(k, 0.0) + scale * v
            self.const += scale * other.const
        else:
            self.const += scale * float(other)
        return self

    def __add__(self, other):
        return self.copy().iadd(other)

    __radd__ = __add__

    def __sub__(self, other):
        return self.copy().iadd(other, -1.0)

    def __rsub__(self, other):
        return (-self).iadd(other)

    def __neg__(self):
        return Expr({k: -v for k, v in self.terms.items()}, -self.const)

    def __mul__(self, a):
        a = float(a)
        return Expr({k: a * v for k, v in self.terms.items()}, a * self.const)

    __rmul__ = __mul__

    def is_constant(self):
        return all(v == 0.0 for v in self.terms.values())

    def value(self, x):
        return self.const + sum(v * x[k] for k, v in self.terms.items())

    def remap(self, mapping):
        return Expr({mapping.get(k, k): v for k, v in self.terms.items()}, self.const)

    def __repr__(self):
        return f"Expr({self.terms!r}, {self.const!r})"


def as_expr(v) -> Expr:
    return v if isinstance(v, Expr) else Expr.constant(v)


def vec_expr(points) -> list[Expr]:
    """Constant point -> list of constant expressions."""
    return [Expr.constant(c) for c in np.asarray(points, dtype=float)]


def combo(handles, points, scale=None) -> list[Expr]:
    """Vector expression ``sum_e handle_e * point_e`` (optionally ``- scale``)."""
    points = np.asarray(points, dtype=float)
    d = points.shape[1]
    out = [Expr() for _ in range(d)]
    for h, e in zip(handles, points):
        for k in range(d):
            if e[k] != 0.0:
                out[k].terms[h] = out[k].terms.get(h, 0.0) + e[k]
    return out


@dataclass
class Variable:
    name: str
    lb: float | None = None
    ub: float | None = None
    binary: bool = False


@dataclass
class LinearRow:
    coefs: dict
    sense: str  # "=", "<=", ">="
    rhs: float
    label: str = ""


@dataclass
class SocRow:
    """``||args||_2 <= t`` with affine ``t`` and ``args``."""

    t: Expr
    args: list
    label: str = ""


@dataclass
class ConicModel:
    variables: list = field(default_factory=list)
    linear: list = field(default_factory=list)
    socs: list = field(default_factory=list)
    objective: Expr = field(default_factory=Expr)
    frozen: bool = False

    # construction -------------------------------------------------------
    def _check_mutable(self):
        if self.frozen:
            raise ModelError("model is frozen")

    def add_var(self, name, lb=None, ub=None, binary=False) -> int:
        self._check_mutable()
        if binary:
            lb = 0.0 if lb is None else lb
            ub = 1.0 if ub is None else ub
        self.variables.append(Variable(name, lb, ub, binary))
        return len(self.variables) - 1

    def add_linear(self, expr: Expr, sense: str, rhs=0.0, label="") -> None:
        """Add ``expr sense rhs``; the constant of ``expr`` moves to the right."""
        self._check_mutable()
        if sense not in ("=", "<=", ">="):
            raise ModelError(f"bad sense {sense!r}")
        coefs = {k: v for k, v in expr.terms.items() if v != 0.0}
        self.linear.append(LinearRow(coefs, sense, float(rhs) - expr.const, label))

    def add_soc(self, t: Expr, args: Iterable[Expr], label="") -> None:
        self._check_mutable()
        self.socs.append(SocRow(as_expr(t), [as_expr(a) for a in args], label))

    def set_objective(self, expr: Expr) -> None:
        self._check_mutable()
        self.objective = expr

    def freeze(self):
        self.validate()
        self.frozen = True
        return self

    # queries --------------------------------------------------------------
    @property
    def n(self):
        return len(self.variables)

    def binaries(self):
        return [i for i, v in enumerate(self.variables) if v.binary]

    def name(self, h):
        return self.variables[h].name

    def index(self):
        """Map from variable name to handle."""
        return {v.name: i for i, v in enumerate(self.variables)}

    def validate(self):
        n = self.n

        def check(keys, where):
            for k in keys:
                if not isinstance(k, (int, np.integer)) or not 0 <= k < n:
                    raise ModelError(f"{where} references undeclared variable {k!r}")

        for r in self.linear:
            check(r.coefs, f"linear row {r.label!r}")
        for r in self.socs:
            check(r.t.terms, f"soc row {r.label!r}")
            for a in r.args:
                check(a.terms, f"soc row {r.label!r}")
        check(self.objective.terms, "objective")

    def copy(self):
        m = copy.deepcopy(self)
        m.frozen = False
        return m

    # evaluation -------------------------------------------------------------
    def violations(self, x):
        """Largest linear-row and SOC-row violation at ``x``."""
        x = np.asarray(x, dtype=float)
        lin = 0.0
        for r in self.linear:
            v = sum(c * x[k] for k, c in r.coefs.items()) - r.rhs
            if r.sense == "=":
                lin = max(lin, abs(v))
            elif r.sense == "<=":
                lin = max(lin, v)
            else:
                lin = max(lin, -v)
        for i, var in enumerate(self.variables):
            if var.lb is not None:
                lin = max(lin, var.lb - x[i])
            if var.ub is not None:
                lin = max(lin, x[i] - var.ub)
        soc = 0.0
        for r in self.socs:
            nrm = np.sqrt(sum(a.value(x) ** 2 for a in r.args))
            soc = max(soc, nrm - r.t.value(x))
        return lin, soc

    def objective_value(self, x):
        return self.objective.value(np.asarray(x, dtype=float))


def relax(m: ConicModel) -> ConicModel:
    """Copy of ``m`` with binaries turned into continuous variables in [0, 1]."""
    r = m.copy()
    for v in r.variables:
        if v.binary:
            v.binary = False
            v.lb = 0.0 if v.lb is None else max(v.lb, 0.0)
            v.ub = 1.0 if v.ub is None else min(v.ub, 1.0)
    return r


def add_norm_constraint(m: ConicModel, p, X, Y, Z, label="") -> dict:
    """Splice the epigraph block ``Z >= ||X - Y||_p`` into ``m``.

    Returns the mapping from the block's local auxiliary keys to the new
    variable handles.
    """
    from .norms import norm_epigraph_block

    block = norm_epigraph_block(p, len(X), X, Y, Z)
    return splice_block(m, block, label)


def splice_block(m: ConicModel, block, label="") -> dict:
    mapping = {}
    for key, (name, lb) in block.aux.items():
        mapping[key] = m.add_var(f"{label}{name}" if label else name, lb=lb)
    for expr, sense in block.linear:
        m.add_linear(expr.remap(mapping), sense, 0.0, label)
    for t, args in block.socs:
        m.add_soc(t.remap(mapping), [a.remap(mapping) for a in args], label)
    return mapping


# text dump --------------------------------------------------------------------

def _fmt(x):
    return "none" if x is None else repr(float(x))


def _parse(tok):
    return None if tok == "none" else float(tok)


def _terms_str(terms):
    return " ".join(f"{k}:{float(v)!r}" for k, v in sorted(terms.items()))


def _terms_parse(toks):
    out = {}
    for tok in toks:
        k, v = tok.split(":")
        out[int(k)] = float(v)
    return out


def dumps(m: ConicModel) -> str:
    """Deterministic line-oriented dump.  ``loads(dumps(m))`` round-trips exactly."""
    lines = [f"model {m.n} {len(m.linear)} {len(m.socs)}"]
    for i, v in enumerate(m.variables):
        lines.append(f"var {i} {v.name} {_fmt(v.lb)} {_fmt(v.ub)} {int(v.binary)}")
    for r in m.linear:
        lines.append(f"lin {r.label or '-'} {r.sense} {r.rhs!r} | {_terms_str(r.coefs)}")
    for r in m.socs:
        parts = [f"{r.t.const!r} {_terms_str(r.t.terms)}"]
        parts += [f"{a.const!r} {_terms_str(a.terms)}" for a in r.args]
        lines.append(f"soc {r.label or '-'} | " + " | ".join(parts))
    lines.append(f"obj {m.objective.const!r} {_terms_str(m.objective.terms)}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> ConicModel:
    m = ConicModel()

    def expr_of(chunk):
        toks = chunk.split()
        return Expr(_terms_parse(toks[1:]), float(toks[0]))

    for line in text.splitlines():
        if not line:
            continue
        kind = line.split(" ", 1)[0]
        if kind == "var":
            _, _, name, lb, ub, b = line.split(" ")
            m.variables.append(Variable(name, _parse(lb), _parse(ub), b == "1"))
        elif kind == "lin":
            head, body = line.split(" | ") if " | " in line else (line.rstrip(" |"), "")
            _, label, sense, rhs = head.split(" ")[:4]
            m.linear.append(LinearRow(_terms_parse(body.split()), sense, float(rhs),
                                      "" if label == "-" else label))
        elif kind == "soc":
            chunks = line.split(" | ")
            label = chunks[0].split(" ")[1]
            exprs = [expr_of(c) for c in chunks[1:]]
            m.socs.append(SocRow(exprs[0], exprs[1:], "" if label == "-" else label))
        elif kind == "obj":
            toks = line.split()
            m.objective = Expr(_terms_parse(toks[2:]), float(toks[1]))
    return m
