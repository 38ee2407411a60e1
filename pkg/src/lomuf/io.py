"""JSON instance and solution files.

Instance document::

    {"graph": {"directed": false, "vertices": ["a", "b"],
               "edges": [{"u": "a", "v": "b", "cap": 1}]},
     "commodities": [{"name": "d1", "supply": {"a": -1}}],
     "candidates": ["b"],      # optional
     "meta": {}}               # optional

Solution document::

    {"targets": {"d1": "b"}, "lambda": 1.0 | "unbounded", "objective": 1.0,
     "flows": [{"commodity": "d1", "edge": {"u": "a", "v": "b"}, "value": 1.0}],
     "solver": "tree", "tolerance": 1e-06}

plus an optional ``"lambdas"`` list (one scale per commodity) for the
total-flow objective.  Unknown keys are rejected everywhere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .mcf import UNBOUNDED
from .model import (CapacitatedGraph, Edge, Instance, ValidationError, Verdict,
                    target_demand, validate_multiflow)


def _load(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") \
            from None


def _obj(value, where, required, optional=()):
    if not isinstance(value, dict):
        raise ValidationError(f"{where}: expected an object")
    unknown = sorted(set(value) - set(required) - set(optional))
    if unknown:
        raise ValidationError(f"{where}: unknown keys {unknown}")
    missing = [k for k in required if k not in value]
    if missing:
        raise ValidationError(f"{where}: missing keys {missing}")
    return value


def _list(value, where):
    if not isinstance(value, list):
        raise ValidationError(f"{where}: expected a list")
    return value


def _num(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ValidationError(f"{where}: expected a finite number")
    return float(value)


def _str(value, where):
    if not isinstance(value, str):
        raise ValidationError(f"{where}: expected a string")
    return value


# --- instances -----------------------------------------------------------------------

def parse_instance(text: str) -> Instance:
    doc = _obj(_load(text), "document", ("graph", "commodities"), ("candidates", "meta"))
    g = _obj(doc["graph"], "graph", ("directed", "vertices", "edges"))
    if not isinstance(g["directed"], bool):
        raise ValidationError("graph.directed: expected true or false")
    vertices = [_str(v, f"graph.vertices[{i}]") for i, v in enumerate(_list(g["vertices"], "graph.vertices"))]
    edges = []
    for i, e in enumerate(_list(g["edges"], "graph.edges")):
        where = f"graph.edges[{i}]"
        e = _obj(e, where, ("u", "v", "cap"))
        edges.append(Edge(_str(e["u"], where + ".u"), _str(e["v"], where + ".v"),
                          _num(e["cap"], where + ".cap")))
    try:
        graph = CapacitatedGraph(tuple(vertices), tuple(edges), g["directed"])
    except ValidationError as exc:
        raise ValidationError(f"graph: {exc}") from None

    names, supplies = [], []
    for i, c in enumerate(_list(doc["commodities"], "commodities")):
        where = f"commodities[{i}]"
        c = _obj(c, where, ("name", "supply"))
        name = _str(c["name"], where + ".name")
        supply = {}
        if not isinstance(c["supply"], dict):
            raise ValidationError(f"{where}.supply: expected an object")
        for v, x in c["supply"].items():
            x = _num(x, f"{where}.supply.{v}")
            if x > 0:
                raise ValidationError(f"commodity {name!r}: supply at {v!r} is positive ({x})")
            supply[v] = x
        names.append(name)
        supplies.append(supply)
    candidates = None
    if "candidates" in doc:
        candidates = tuple(_str(v, f"candidates[{i}]")
                           for i, v in enumerate(_list(doc["candidates"], "candidates")))
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise ValidationError("meta: expected an object")
    return Instance(graph, supplies, names=names, candidates=candidates, meta=meta)


def instance_to_dict(inst: Instance) -> dict:
    g = inst.graph
    doc = {"graph": {"directed": g.directed, "vertices": list(g.vertices),
                     "edges": [{"u": u, "v": v, "cap": cap} for u, v, cap in g.edges]},
           "commodities": [{"name": n, "supply": dict(s)} for n, s in zip(inst.names, inst.supplies)]}
    if inst.candidates is not None:
        doc["candidates"] = list(inst.candidates)
    if inst.meta:
        doc["meta"] = inst.meta
    return doc


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2) + "\n"


# --- solutions -----------------------------------------------------------------------

@dataclass
class Solution:
    """Targets (``None`` for commodities left unplaced), objective values and witness flows.

    ``flows`` is a ``(k, m)`` array aligned with the instance's commodities
    and edges.  ``lambdas`` holds per-commodity scales when they differ
    (total-flow objective); otherwise every commodity is scaled by ``lam``.
    """

    targets: list
    lam: float
    objective: float
    flows: np.ndarray
    solver: str
    tolerance: float = 1e-6
    lambdas: list | None = None
    names: list = field(default_factory=list)

    def __eq__(self, other):
        if not isinstance(other, Solution):
            return NotImplemented
        return (self.targets == other.targets and self.lam == other.lam
                and self.objective == other.objective and self.solver == other.solver
                and self.tolerance == other.tolerance and self.lambdas == other.lambdas
                and self.names == other.names and np.array_equal(self.flows, other.flows))


def _lam_out(x):
    return "unbounded" if x == UNBOUNDED else float(x)


def solution_to_dict(sol: Solution, inst: Instance) -> dict:
    names = sol.names or inst.names
    flows = []
    for i, name in enumerate(names):
        for j, (u, v, _) in enumerate(inst.graph.edges):
            if sol.flows[i, j] != 0:
                flows.append({"commodity": name, "edge": {"u": u, "v": v},
                              "value": float(sol.flows[i, j])})
    doc = {"targets": {n: t for n, t in zip(names, sol.targets)},
           "lambda": _lam_out(sol.lam),
           "objective": _lam_out(sol.objective),
           "flows": flows, "solver": sol.solver, "tolerance": sol.tolerance}
    if sol.lambdas is not None:
        doc["lambdas"] = [_lam_out(x) for x in sol.lambdas]
    return doc


def serialize_solution(sol: Solution, inst: Instance) -> str:
    return json.dumps(solution_to_dict(sol, inst), indent=2) + "\n"


def _lam_in(x, where):
    if x == "unbounded":
        return UNBOUNDED
    return _num(x, where)


def parse_solution(text: str, inst: Instance) -> Solution:
    doc = _obj(_load(text), "solution",
               ("targets", "lambda", "objective", "flows", "solver", "tolerance"), ("lambdas",))
    targets_doc = doc["targets"]
    if not isinstance(targets_doc, dict):
        raise ValidationError("targets: expected an object")
    unknown = sorted(set(targets_doc) - set(inst.names))
    if unknown:
        raise ValidationError(f"targets: unknown commodities {unknown}")
    targets = []
    for n in inst.names:
        t = targets_doc.get(n)
        if t is not None and t not in inst.graph.index:
            raise ValidationError(f"targets.{n}: unknown vertex {t!r}")
        targets.append(t)
    pos = {n: i for i, n in enumerate(inst.names)}
    F = np.zeros((len(inst.names), inst.graph.m))
    for i, f in enumerate(_list(doc["flows"], "flows")):
        where = f"flows[{i}]"
        f = _obj(f, where, ("commodity", "edge", "value"))
        e = _obj(f["edge"], where + ".edge", ("u", "v"))
        if f["commodity"] not in pos:
            raise ValidationError(f"{where}: unknown commodity {f['commodity']!r}")
        key = (e["u"], e["v"])
        j = inst.graph.edge_index.get(key)
        if j is None or (not inst.graph.directed and inst.graph.edges[j][:2] != key):
            raise ValidationError(f"{where}: no edge {e['u']}->{e['v']}")
        F[pos[f["commodity"]], j] = _num(f["value"], where + ".value")
    lambdas = None
    if "lambdas" in doc:
        lambdas = [_lam_in(x, f"lambdas[{i}]") for i, x in enumerate(_list(doc["lambdas"], "lambdas"))]
    return Solution(targets, _lam_in(doc["lambda"], "lambda"), _lam_in(doc["objective"], "objective"),
                    F, _str(doc["solver"], "solver"), _num(doc["tolerance"], "tolerance"),
                    lambdas, list(inst.names))


def validate_solution(inst: Instance, sol: Solution, tol: float | None = None) -> Verdict:
    """Check the witness against the instance at the claimed scale(s)."""
    tol = sol.tolerance if tol is None else tol
    scales = sol.lambdas if sol.lambdas is not None else [sol.lam] * len(inst.supplies)
    demands = []
    for s, t, lam in zip(inst.supplies, sol.targets, scales):
        if t is None or lam == UNBOUNDED:
            demands.append({})
        else:
            demands.append({v: lam * x for v, x in target_demand(s, t).items()})
    return validate_multiflow(inst.graph, demands, sol.flows, tol)
