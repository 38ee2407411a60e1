"""Directed machinery: the diamond gadget, the induced undirected graph and
approximate target location on symmetric digraphs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .locators import locate_master_source, locate_tree
from .mcf import UNBOUNDED, solve_concurrent
from .model import (CapacitatedGraph, Edge, ValidationError, as_multiflow,
                    cancel_circulations, target_demand, validate_multiflow)

# arc slots inside one gadget, in the order they are stored
US, VS, ST, TU, TV = range(5)


@dataclass(frozen=True)
class DiamondMap:
    """Link between an undirected graph and its diamond expansion.

    Gadget ``j`` replaces ``original.edges[j] = (u, v)`` and owns arcs
    ``5j .. 5j+4`` of ``expanded``: (u,s), (v,s), (s,t), (t,u), (t,v).
    """

    original: CapacitatedGraph
    expanded: CapacitatedGraph
    gadgets: tuple[tuple[str, str], ...]  # (s_e, t_e) per original edge

    @property
    def gadget_of(self) -> dict[str, int]:
        out = {}
        for j, (s, t) in enumerate(self.gadgets):
            out[s] = out[t] = j
        return out


def diamond_expand(graph: CapacitatedGraph) -> tuple[CapacitatedGraph, DiamondMap]:
    """Replace every undirected edge by a five-arc diamond of the same capacity."""
    if graph.directed:
        raise ValidationError("diamond expansion needs an undirected graph")
    taken = set(graph.vertices)
    gadgets, arcs = [], []
    for u, v, cap in graph.edges:
        s, t = f"<s:{u},{v}>", f"<t:{u},{v}>"
        if s in taken or t in taken:
            raise ValidationError(f"gadget vertex name clashes with an existing vertex near {u}-{v}")
        taken.update((s, t))
        gadgets.append((s, t))
        arcs += [Edge(u, s, cap), Edge(v, s, cap), Edge(s, t, cap), Edge(t, u, cap), Edge(t, v, cap)]
    expanded = CapacitatedGraph(tuple(taken), tuple(arcs), directed=True)
    dmap = DiamondMap(graph, expanded, tuple(gadgets))
    return expanded, dmap


def diamond_push(dmap: DiamondMap, flows) -> np.ndarray:
    """Route every undirected edge flow through its gadget (same demands, same value)."""
    F = as_multiflow(dmap.original, flows)
    out = np.zeros((F.shape[0], dmap.expanded.m))
    for j in range(dmap.original.m):
        fwd, bwd = np.maximum(F[:, j], 0.0), np.maximum(-F[:, j], 0.0)
        out[:, 5 * j + US] = fwd
        out[:, 5 * j + TV] = fwd
        out[:, 5 * j + VS] = bwd
        out[:, 5 * j + TU] = bwd
        out[:, 5 * j + ST] = fwd + bwd
    return out


def diamond_pullback(dmap: DiamondMap, targets: Sequence[str], flows,
                     supplies: Sequence[Mapping[str, float]] | None = None,
                     scale: float = 1.0, tol: float = 1e-6) -> tuple[list[str], np.ndarray]:
    """Map targets and a valid multiflow on the expansion back to the original graph.

    Each commodity's flow is made acyclic first; after that a commodity whose
    target sits in gadget ``e = (u, v)`` only enters the gadget, with amounts
    ``a`` on (u,s) and ``b`` on (v,s).  Its target becomes ``u`` when
    ``a > b`` (edge flow ``-b``) and ``v`` otherwise (edge flow ``+a``).
    Every other commodity gets ``a - b``.

    The result is checked: capacities always, demands too when ``supplies``
    is given (scaled by ``scale``).  Failures raise :class:`ValidationError`.
    The construction can overload an edge when a gadget holds a target and
    carries through traffic in both directions at once, which needs at
    least three commodities.
    """
    G, H = dmap.original, dmap.expanded
    F = as_multiflow(H, flows)
    if len(targets) != F.shape[0]:
        raise ValidationError(f"{len(targets)} targets but {F.shape[0]} flows")
    gadget_of = dmap.gadget_of
    out_targets, out = [], np.zeros((F.shape[0], G.m))
    for i, tgt in enumerate(targets):
        if tgt not in H.index:
            raise ValidationError(f"unknown vertex {tgt!r}")
        f, _ = cancel_circulations(H, F[i])
        a, b = f[US::5], f[VS::5]
        out[i] = a - b
        j = gadget_of.get(tgt)
        if j is None:
            out_targets.append(tgt)
            continue
        u, v, _ = G.edges[j]
        if a[j] > b[j]:
            out_targets.append(u)
            out[i, j] = -b[j]
        else:
            out_targets.append(v)
            out[i, j] = a[j]

    if supplies is not None:
        demands = [{x: scale * y for x, y in target_demand(s, t).items()}
                   for s, t in zip(supplies, out_targets)]
    else:
        demands = None
    if demands is not None:
        verdict = validate_multiflow(G, demands, out, tol)
    else:
        congestion = np.abs(out).sum(axis=0)
        verdict = not (congestion > G.capacities + tol).any()
    if not verdict:
        raise ValidationError("pulled-back multiflow is not valid on the original graph")
    return out_targets, out


# --- induced graph and symmetric digraphs ---------------------------------------------

def induced_undirected(graph: CapacitatedGraph) -> CapacitatedGraph:
    """Forget arc directions and add up twin capacities.

    Each edge keeps the orientation of the first arc seen for its pair.
    """
    if not graph.directed:
        raise ValidationError("induced graph needs a directed graph")
    order, caps = [], {}
    for u, v, cap in graph.edges:
        key = frozenset((u, v))
        if key not in caps:
            order.append((u, v))
            caps[key] = 0.0
        caps[key] += cap
    edges = tuple(Edge(u, v, caps[frozenset((u, v))]) for u, v in order)
    return CapacitatedGraph(graph.vertices, edges, directed=False)


def merge_twins(graph: CapacitatedGraph, induced: CapacitatedGraph, flows) -> np.ndarray:
    """Net traffic of twin arcs as signed flow on the induced graph."""
    F = as_multiflow(graph, flows)
    out = np.zeros((F.shape[0], induced.m))
    for j, (u, v, _) in enumerate(graph.edges):
        e = induced.edge_index[(u, v)]
        sign = 1.0 if induced.edges[e].u == u else -1.0
        out[:, e] += sign * F[:, j]
    return out


def lift_halved(graph: CapacitatedGraph, induced: CapacitatedGraph, flows) -> np.ndarray:
    """Half of each undirected flow, placed on the arc that points the same way."""
    F = as_multiflow(induced, flows)
    out = np.zeros((F.shape[0], graph.m))
    for e, (u, v, _) in enumerate(induced.edges):
        fwd, bwd = graph.edge_index.get((u, v)), graph.edge_index.get((v, u))
        pos, neg = np.maximum(F[:, e], 0.0), np.maximum(-F[:, e], 0.0)
        if (fwd is None and pos.any()) or (bwd is None and neg.any()):
            raise ValidationError(f"no arc for the flow direction on {u}-{v}")
        if fwd is not None:
            out[:, fwd] = pos / 2
        if bwd is not None:
            out[:, bwd] = neg / 2
    return out


def is_symmetric(graph: CapacitatedGraph) -> bool:
    """Every arc has its reverse twin and all arc capacities are equal."""
    if not graph.directed:
        return False
    if any((v, u) not in graph.edge_index for u, v, _ in graph.edges):
        return False
    caps = graph.capacities
    return len(caps) == 0 or bool((caps == caps[0]).all())


@dataclass(frozen=True)
class SymmetricResult:
    """Targets with a certified value and a directed witness flow.

    ``lam`` is half the induced-graph value ``induced_lam`` of the targets;
    ``flows`` routes ``lam`` times the demands on the digraph.
    """

    targets: list[str]
    lam: float
    flows: np.ndarray
    induced_lam: float


def _symmetric(graph, supplies, pick) -> SymmetricResult:
    if not is_symmetric(graph):
        raise ValidationError("graph is not symmetric")
    induced = induced_undirected(graph)
    targets = pick(induced)
    res = solve_concurrent(induced, [target_demand(s, t) for s, t in zip(supplies, targets)])
    if res.unbounded:
        return SymmetricResult(targets, UNBOUNDED, np.zeros((len(supplies), graph.m)), UNBOUNDED)
    return SymmetricResult(targets, res.lam / 2, lift_halved(graph, induced, res.witness), res.lam)


def locate_symmetric_ditree(graph: CapacitatedGraph,
                            supplies: Sequence[Mapping[str, float]]) -> SymmetricResult:
    """Tree targets of the induced graph, within a factor 2 on symmetric di-trees."""
    if graph.directed and not induced_undirected(graph).is_tree():
        raise ValidationError("graph is not a di-tree")
    return _symmetric(graph, supplies, lambda g: locate_tree(g, supplies))


def locate_symmetric_digraph(graph: CapacitatedGraph,
                             supplies: Sequence[Mapping[str, float]]) -> SymmetricResult:
    """Master-source targets; within ``2 * max(eta - 1, 1)`` on symmetric digraphs."""
    return _symmetric(graph, supplies, lambda g: locate_master_source(supplies))
