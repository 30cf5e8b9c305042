"""JSON and CSV reading and writing for instances, solutions and face norms."""
from __future__ import annotations

import json

import numpy as np

from .formulations import SppInstance, WeberInstance
from .geometry import Polytope, Region, Subdivision


def _coords(P: Polytope):
    V = P.ordered_2d() if P.dim == 2 and P.affine_dim == 2 else P.vertices
    return [[float(v) for v in row] for row in V]


def subdivision_to_json(sub: Subdivision) -> dict:
    d = {"dim": sub.dim,
         "regions": [{"vertices": _coords(r.polytope), "p": str(r.p), "weight": float(r.weight)}
                     for r in sub.regions]}
    if sub.box is not None:
        d["box"] = [[float(v) for v in sub.box[0]], [float(v) for v in sub.box[1]]]
    return d


def subdivision_from_json(d) -> Subdivision:
    regions = tuple(Region(Polytope(np.asarray(r["vertices"], float)), r["p"], float(r["weight"]))
                    for r in d["regions"])
    box = d.get("box")
    if box is not None:
        box = (np.asarray(box[0], float), np.asarray(box[1], float))
    sub = Subdivision(regions, box)
    if sub.dim != int(d.get("dim", sub.dim)):
        raise ValueError("declared dimension does not match the vertices")
    return sub


def instance_to_json(inst) -> dict:
    d = subdivision_to_json(inst.sub)
    if isinstance(inst, WeberInstance):
        d["demands"] = [{"point": [float(v) for v in x], "weight": float(w)}
                        for x, w in zip(inst.points, inst.weights)]
    else:
        d["source"] = [float(v) for v in inst.xs]
        d["target"] = [float(v) for v in inst.xt]
    return d


def instance_from_json(d, facet_only=False):
    sub = subdivision_from_json(d)
    if "demands" in d:
        pts = [x["point"] for x in d["demands"]]
        w = [float(x.get("weight", 1.0)) for x in d["demands"]]
        return WeberInstance.create(sub, pts, w, facet_only=facet_only)
    return SppInstance.create(sub, d["source"], d["target"], facet_only=facet_only)


def dumps(obj) -> str:
    """Deterministic JSON text (floats written with shortest round-trip repr)."""
    return json.dumps(obj, indent=1, allow_nan=False) + "\n"


def save_json(obj, path):
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


def load_instance(path, facet_only=False):
    return instance_from_json(load_json(path), facet_only)


def save_instance(inst, path):
    save_json(instance_to_json(inst), path)


def _num(v):
    return None if v is None or not np.isfinite(v) else float(v)


def spp_solution_to_json(result) -> dict:
    rep = result.report
    d = {"value": _num(rep.ub), "lb": _num(rep.lb), "gap_pct": rep.gap_pct,
         "status": rep.status}
    if result.path is not None:
        d["path"] = [int(r) for r in result.path.regions]
        d["gates"] = [[float(v) for v in g] for g in result.path.gates]
    return d


def locp_solution_to_json(result) -> dict:
    rep = result.report
    d = {"value": _num(rep.ub), "lb": _num(rep.lb), "gap_pct": rep.gap_pct,
         "status": rep.status}
    sol = result.solution
    if sol is not None:
        d["facility"] = [float(v) for v in sol.facility]
        d["region"] = int(sol.region)
        d["paths"] = [{"path": [int(r) for r in p.regions],
                       "gates": [[float(v) for v in g] for g in p.gates]} for p in sol.paths]
    return d


def face_norms_from_json(d, graph):
    """Face norms for the transit transform.

    ``{"default": {"p": "2", "weight": 1.0}, "faces": [{"regions": [i, j], "p": ..., "weight": ...}]}``;
    edges without an entry take the default when one is given.
    """
    out = {}
    default = d.get("default")
    if default is not None:
        for e in graph.edges:
            out[e] = (default["p"], float(default["weight"]))
    for f in d.get("faces", []):
        i, j = sorted(f["regions"])
        out[(i, j)] = (f["p"], float(f["weight"]))
    return out
