"""Deterministic SVG drawings of planar instances and their solutions."""
from __future__ import annotations

import numpy as np

from .errors import DimensionUnsupported
from .formulations import WeberInstance

# pale fills keyed by norm, so cells sharing a norm read as one medium
FILL = {"1": "#dbe9f6", "3/2": "#e2f0d9", "2": "#fdf2d0", "3": "#f8dcdc", "inf": "#e9def2"}
SIZE = 600.0
MARGIN = 20.0


def _fmt(v):
    return f"{v:.3f}"


class _Frame:
    """Maps instance coordinates to SVG pixels (y axis flipped)."""

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, float)
        span = np.asarray(hi, float) - self.lo
        self.scale = (SIZE - 2 * MARGIN) / max(span.max(), 1e-12)
        self.h = span[1] * self.scale + 2 * MARGIN
        self.w = span[0] * self.scale + 2 * MARGIN

    def __call__(self, x):
        u = MARGIN + (x[0] - self.lo[0]) * self.scale
        v = self.h - MARGIN - (x[1] - self.lo[1]) * self.scale
        return _fmt(u), _fmt(v)


def render_svg(inst, solution=None) -> str:
    """SVG text for ``inst`` (and an optional PathSolution or WeberSolution)."""
    sub = inst.sub
    if sub.dim != 2:
        raise DimensionUnsupported("plotting needs d = 2")
    lo, hi = sub.bounding_box()
    fr = _Frame(lo, hi)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(fr.w)}" '
           f'height="{_fmt(fr.h)}" viewBox="0 0 {_fmt(fr.w)} {_fmt(fr.h)}">',
           '<g id="regions" stroke="#555" stroke-width="1">']
    for k, r in enumerate(sub.regions):
        P = r.polytope
        if P.affine_dim < 2:
            continue
        pts = " ".join(",".join(fr(v)) for v in P.ordered_2d())
        fill = FILL.get(str(r.p), "#eeeeee")
        out.append(f'<polygon points="{pts}" fill="{fill}"><title>region {k}</title></polygon>')
    out.append("</g>")
    out.append('<g id="labels" font-family="sans-serif" font-size="11" fill="#333" '
               'text-anchor="middle">')
    for k, r in enumerate(sub.regions):
        if r.polytope.affine_dim < 2:
            continue
        x, y = fr(r.polytope.centroid)
        out.append(f'<text x="{x}" y="{y}">{k}: l{r.p} w{r.weight:g}</text>')
    out.append("</g>")

    if isinstance(inst, WeberInstance):
        out.append('<g id="demands" fill="#1f4e8c">')
        for x in inst.points:
            u, v = fr(x)
            out.append(f'<circle cx="{u}" cy="{v}" r="3"/>')
        out.append("</g>")
        paths = solution.paths if solution is not None else []
        fac = solution.facility if solution is not None else None
    else:
        out.append('<g id="terminals" fill="#1f4e8c">')
        for x in (inst.xs, inst.xt):
            u, v = fr(x)
            out.append(f'<circle cx="{u}" cy="{v}" r="4"/>')
        out.append("</g>")
        paths = [solution] if solution is not None else []
        fac = None

    for p in paths:
        pts = " ".join(",".join(fr(b)) for b in p.breaking_points)
        out.append(f'<polyline class="path" points="{pts}" fill="none" stroke="#c0392b" '
                   'stroke-width="2"/>')
        for g in p.gates:
            u, v = fr(g)
            out.append(f'<rect class="gate" x="{_fmt(float(u) - 3)}" y="{_fmt(float(v) - 3)}" '
                       'width="6" height="6" fill="#c0392b"/>')
    if fac is not None:
        u, v = fr(fac)
        out.append(f'<circle id="facility" cx="{u}" cy="{v}" r="6" fill="none" '
                   'stroke="#000" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
