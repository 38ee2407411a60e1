"""Maximum concurrent multi-commodity flow for fixed targets.

The LP is solved with HiGHS through :func:`scipy.optimize.linprog`.  On
forests the flow of every commodity is forced by the cuts, so the optimum
has a closed form and the LP is skipped (``method="auto"``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .model import (SATISFY_TOL, CapacitatedGraph, ValidationError, check_supply,
                    target_demand)

UNBOUNDED = math.inf


@dataclass(frozen=True)
class ConcurrentResult:
    lam: float
    witness: np.ndarray | None

    @property
    def unbounded(self) -> bool:
        return self.lam == UNBOUNDED


@dataclass(frozen=True)
class TotalResult:
    lambdas: list[float]
    objective: float
    witness: np.ndarray


def _cached(graph, key, build):
    # graphs are frozen dataclasses without __slots__, so their __dict__ can hold derived data
    store = graph.__dict__
    if key not in store:
        store[key] = build(graph)
    return store[key]


def demand_matrix(graph: CapacitatedGraph, demands: Sequence[Mapping[str, float]]) -> np.ndarray:
    D = np.zeros((len(demands), graph.n))
    for i, d in enumerate(demands):
        D[i] = graph.vector(d)
        scale = max(1.0, float(np.abs(D[i]).sum()))
        if abs(D[i].sum()) > 1e-9 * scale:
            raise ValidationError(f"demand {i} does not sum to zero")
    return D


# --- forests -----------------------------------------------------------------

def _forest_structure(graph: CapacitatedGraph):
    """Per vertex pair: orientation, head-side indicator row, arc indices."""
    pairs, arc_of = [], {}
    for j, (u, v, _) in enumerate(graph.edges):
        key = frozenset((u, v))
        if key not in arc_of:
            arc_of[key] = {}
            pairs.append((u, v))
        arc_of[key][(u, v)] = j

    parent, order = {}, []
    for comp in graph.components:
        root = comp[0]
        parent[root] = None
        stack = [root]
        while stack:
            x = stack.pop()
            order.append(x)
            for y in graph.adjacency[x]:
                if y not in parent:
                    parent[y] = x
                    stack.append(y)
    below = {x: {x} for x in graph.vertices}
    for x in reversed(order):
        if parent[x] is not None:
            below[parent[x]] |= below[x]
    comp_of = {x: ci for ci, comp in enumerate(graph.components) for x in comp}

    H = np.zeros((len(pairs), graph.n))
    fwd = np.full(len(pairs), -1)
    bwd = np.full(len(pairs), -1)
    for p, (u, v) in enumerate(pairs):
        child = v if parent.get(v) == u else u
        side = below[child]
        if child != v:
            side = set(graph.components[comp_of[u]]) - side
        H[p, [graph.index[x] for x in side]] = 1.0
        arcs = arc_of[frozenset((u, v))]
        fwd[p] = arcs.get((u, v), -1)
        bwd[p] = arcs.get((v, u), -1)
    C = np.zeros((len(graph.components), graph.n))
    for ci, comp in enumerate(graph.components):
        C[ci, [graph.index[x] for x in comp]] = 1.0
    return H, fwd, bwd, C


def _forest_solve(graph: CapacitatedGraph, D: np.ndarray, witness: bool):
    H, fwd, bwd, C = _cached(graph, "_lomuf_forest", _forest_structure)
    scale = max(1.0, float(np.abs(D).max(initial=0.0)))
    if np.abs(D @ C.T).max(initial=0.0) > 1e-9 * scale:
        # some commodity must cross between components: only the zero flow is feasible
        return 0.0, (np.zeros((len(D), graph.m)) if witness else None)
    G = D @ H.T  # k x pairs, amount moved along each pair's orientation
    caps = graph.capacities
    if graph.directed:
        F = np.zeros((len(D), graph.m))
        pos, neg = np.maximum(G, 0.0), np.maximum(-G, 0.0)
        tiny = 1e-12 * scale
        need_missing = (pos[:, fwd < 0] > tiny).any() or (neg[:, bwd < 0] > tiny).any()
        if need_missing:
            return 0.0, (np.zeros((len(D), graph.m)) if witness else None)
        F[:, fwd[fwd >= 0]] = pos[:, fwd >= 0]
        F[:, bwd[bwd >= 0]] = neg[:, bwd >= 0]
    else:
        F = np.zeros((len(D), graph.m))
        F[:, fwd] = G
    load = np.abs(F).sum(axis=0)
    busy = load > 1e-12 * scale
    lam = float(np.min(caps[busy] / load[busy])) if busy.any() else UNBOUNDED
    return lam, (F * lam if witness and lam != UNBOUNDED else None)


# --- linear program ------------------------------------------------------------

def _lp_structure(graph: CapacitatedGraph):
    B = sparse.csr_matrix(graph.incidence)
    eye = sparse.identity(graph.m, format="csr")
    if graph.directed:
        return B, eye
    return sparse.hstack([B, -B], format="csr"), sparse.hstack([eye, eye], format="csr")


def _lp_solve(graph: CapacitatedGraph, D: np.ndarray, weights: np.ndarray | None = None):
    """Maximise a common scale (``weights is None``) or a weighted sum of scales.

    Returns ``(scales, flows)`` where flows are signed per commodity per edge.
    """
    Bq, Cq = _cached(graph, "_lomuf_lp", _lp_structure)
    k, q = len(D), Bq.shape[1]
    n_scale = 1 if weights is None else k
    blocks = sparse.block_diag([Bq] * k, format="csr")
    if weights is None:
        scale_cols = sparse.csr_matrix(-D.reshape(-1, 1))
    else:
        scale_cols = sparse.block_diag([sparse.csr_matrix(-d.reshape(-1, 1)) for d in D],
                                       format="csr")
    A_eq = sparse.hstack([blocks, scale_cols], format="csr")
    A_ub = sparse.hstack([sparse.hstack([Cq] * k),
                          sparse.csr_matrix((graph.m, n_scale))], format="csr")
    c = np.zeros(k * q + n_scale)
    c[k * q:] = -1.0 if weights is None else -np.asarray(weights)
    res = linprog(c, A_ub=A_ub, b_ub=graph.capacities, A_eq=A_eq, b_eq=np.zeros(A_eq.shape[0]),
                  bounds=(0, None), method="highs")
    if res.status != 0:
        raise RuntimeError(f"LP solver failed: {res.message}")
    x = res.x[:k * q].reshape(k, q)
    flows = x if graph.directed else x[:, :graph.m] - x[:, graph.m:]
    return np.maximum(res.x[k * q:], 0.0), flows


# --- public API ------------------------------------------------------------------

def concurrent_value(graph: CapacitatedGraph, D: np.ndarray, method: str = "auto") -> float:
    """Optimal concurrent scale for a dense demand matrix, without a witness."""
    return _concurrent(graph, D, method, witness=False)[0]


def _concurrent(graph, D, method, witness):
    active = np.flatnonzero(np.abs(D).sum(axis=1) > 0)
    if len(active) == 0:
        return UNBOUNDED, None
    use_forest = method == "forest" or (method == "auto" and
                                        _cached(graph, "_lomuf_isforest", CapacitatedGraph.is_forest))
    if use_forest:
        lam, F = _forest_solve(graph, D[active], witness)
    elif method in ("auto", "lp"):
        scales, F = _lp_solve(graph, D[active])
        lam = float(scales[0])
    else:
        raise ValueError(f"unknown method {method!r}")
    if not witness:
        return lam, None
    full = np.zeros((len(D), graph.m))
    full[active] = F
    return lam, full


def solve_concurrent(graph: CapacitatedGraph, demands: Sequence[Mapping[str, float]],
                     method: str = "auto") -> ConcurrentResult:
    """Largest ``lam`` such that all ``lam * d_i`` route jointly within capacity.

    All-zero demand families return ``UNBOUNDED`` with no witness.  The
    witness rows are net per-commodity flows (opposing directions of one
    commodity on an undirected edge are already cancelled).
    """
    D = demand_matrix(graph, demands)
    lam, F = _concurrent(graph, D, method, witness=True)
    return ConcurrentResult(lam, F)


def check_feasible(graph: CapacitatedGraph, demands: Sequence[Mapping[str, float]],
                   tol: float = SATISFY_TOL) -> bool:
    if not demands:
        return True
    return concurrent_value(graph, demand_matrix(graph, demands)) >= 1.0 - tol


def solve_total(graph: CapacitatedGraph, supplies: Sequence[Mapping[str, float]],
                targets: Sequence[str]) -> TotalResult:
    """Maximise ``sum_i lam_i * ||s_i||_1`` with independent scales per commodity.

    A commodity whose supply is all zero gets ``lam_i = 0``.  One whose demand
    vanishes because its target is its only source is served on the spot and
    counted with ``lam_i = 1``.
    """
    if len(supplies) != len(targets):
        raise ValidationError(f"{len(supplies)} supplies but {len(targets)} targets")
    for s in supplies:
        check_supply(graph, s)
    D = demand_matrix(graph, [target_demand(s, t, graph) for s, t in zip(supplies, targets)])
    weights = np.array([-sum(s.values()) for s in supplies], dtype=float)
    lambdas = np.zeros(len(supplies))
    lambdas[(weights > 0) & (np.abs(D).sum(axis=1) == 0)] = 1.0
    witness = np.zeros((len(supplies), graph.m))
    active = np.flatnonzero(np.abs(D).sum(axis=1) > 0)
    if len(active):
        scales, F = _lp_solve(graph, D[active], weights[active])
        lambdas[active] = scales
        witness[active] = F
    return TotalResult([float(x) for x in lambdas], float(lambdas @ weights), witness)
