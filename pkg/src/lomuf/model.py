"""Capacitated graphs, supply/demand vectors, flows and their validity checks.

Flows are numpy arrays aligned with ``graph.edges``.  On an undirected graph
an entry is signed relative to the edge's reference orientation ``u -> v``
(fixed at construction); on a directed graph entries are non-negative arc
flows.  Supply and demand vectors are plain ``{vertex: value}`` mappings;
absent vertices count as zero.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

SATISFY_TOL = 1e-6
IDENTITY_TOL = 1e-9


class ValidationError(ValueError):
    """Raised for malformed graphs, vectors, flows or instances."""


class Edge(NamedTuple):
    u: str
    v: str
    cap: float


@dataclass(frozen=True)
class CapacitatedGraph:
    """Immutable capacitated graph.

    ``vertices`` are stored sorted; every tie-break in the package uses this
    order.  ``edges`` keep their construction order and orientation.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    directed: bool = False

    def __post_init__(self):
        verts = tuple(sorted(str(v) for v in self.vertices))
        if len(set(verts)) != len(verts):
            raise ValidationError("duplicate vertex id")
        edges = []
        for e in self.edges:
            u, v, cap = e
            edges.append(Edge(str(u), str(v), float(cap)))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(edges))

        known = set(verts)
        seen = set()
        for u, v, cap in self.edges:
            if u not in known or v not in known:
                raise ValidationError(f"edge {u}-{v} references an unknown vertex")
            if u == v:
                raise ValidationError(f"self-loop at {u}")
            if not cap >= 0 or not np.isfinite(cap):
                raise ValidationError(f"edge {u}-{v} has invalid capacity {cap}")
            key = (u, v) if self.directed else frozenset((u, v))
            if key in seen:
                kind = "arc" if self.directed else "edge"
                raise ValidationError(f"duplicate {kind} {u}-{v}")
            seen.add(key)

    @classmethod
    def build(cls, edges: Iterable[tuple], vertices: Iterable[str] = (), directed=False):
        """Graph from ``(u, v, cap)`` triples; endpoints are added as vertices."""
        edges = [tuple(e) for e in edges]
        verts = set(map(str, vertices))
        for u, v, _ in edges:
            verts.update((str(u), str(v)))
        return cls(tuple(verts), tuple(Edge(*e) for e in edges), directed)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def capacities(self) -> np.ndarray:
        caps = np.array([e.cap for e in self.edges], dtype=float)
        caps.flags.writeable = False
        return caps

    @cached_property
    def incidence(self) -> np.ndarray:
        """Matrix ``B`` with ``B @ f`` the net inflow at every vertex."""
        B = np.zeros((self.n, self.m))
        for j, (u, v, _) in enumerate(self.edges):
            B[self.index[u], j] -= 1.0
            B[self.index[v], j] += 1.0
        B.flags.writeable = False
        return B

    @cached_property
    def edge_index(self) -> dict[tuple[str, str], int]:
        """``(u, v) -> edge index``; undirected edges are found under both orders."""
        out = {}
        for j, (u, v, _) in enumerate(self.edges):
            out[(u, v)] = j
            if not self.directed:
                out[(v, u)] = j
        return out

    @cached_property
    def adjacency(self) -> dict[str, list[str]]:
        """Neighbours ignoring direction, sorted."""
        adj = {v: set() for v in self.vertices}
        for u, v, _ in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return {v: sorted(nb) for v, nb in adj.items()}

    @cached_property
    def components(self) -> list[list[str]]:
        """Connected components of the underlying undirected graph."""
        comp, seen = [], set()
        for s in self.vertices:
            if s in seen:
                continue
            seen.add(s)
            part, queue = [], deque([s])
            while queue:
                x = queue.popleft()
                part.append(x)
                for y in self.adjacency[x]:
                    if y not in seen:
                        seen.add(y)
                        queue.append(y)
            comp.append(sorted(part))
        return comp

    def is_forest(self) -> bool:
        """Underlying simple graph is acyclic (twin arcs count once)."""
        pairs = {frozenset((u, v)) for u, v, _ in self.edges}
        return len(pairs) == self.n - len(self.components)

    def is_tree(self) -> bool:
        return self.n > 0 and len(self.components) == 1 and self.is_forest()

    def hop_distances(self, source: str) -> dict[str, int]:
        """BFS hop counts from ``source`` ignoring direction."""
        dist = {source: 0}
        queue = deque([source])
        while queue:
            x = queue.popleft()
            for y in self.adjacency[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    def vector(self, mapping: Mapping[str, float]) -> np.ndarray:
        """Dense per-vertex vector from a sparse mapping."""
        out = np.zeros(self.n)
        for v, x in mapping.items():
            try:
                out[self.index[v]] = x
            except KeyError:
                raise ValidationError(f"unknown vertex {v!r}") from None
        return out

    def mapping(self, vec: np.ndarray) -> dict[str, float]:
        return {v: float(x) for v, x in zip(self.vertices, vec) if x != 0}

    def with_capacities(self, caps: Sequence[float]) -> "CapacitatedGraph":
        edges = tuple(Edge(u, v, c) for (u, v, _), c in zip(self.edges, caps))
        return CapacitatedGraph(self.vertices, edges, self.directed)

    def reoriented(self, flip: Iterable[int]) -> "CapacitatedGraph":
        """Copy with the reference orientation of the given undirected edges reversed."""
        if self.directed:
            raise ValidationError("arcs of a directed graph cannot be reoriented")
        flip = set(flip)
        edges = tuple(Edge(v, u, c) if j in flip else Edge(u, v, c)
                      for j, (u, v, c) in enumerate(self.edges))
        return CapacitatedGraph(self.vertices, edges, False)


@dataclass
class Instance:
    """A problem instance: graph, supply vectors and optional candidate targets."""

    graph: CapacitatedGraph
    supplies: list[dict[str, float]]
    names: list[str] = field(default_factory=list)
    candidates: tuple[str, ...] | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.supplies = [dict(s) for s in self.supplies]
        if not self.names:
            self.names = [f"d{i + 1}" for i in range(len(self.supplies))]
        if len(self.names) != len(self.supplies):
            raise ValidationError("one name per commodity required")
        if len(set(self.names)) != len(self.names):
            raise ValidationError("duplicate commodity name")
        for name, s in zip(self.names, self.supplies):
            check_supply(self.graph, s, name=name)
        if self.candidates is not None:
            self.candidates = tuple(sorted(set(self.candidates)))
            unknown = [c for c in self.candidates if c not in self.graph.index]
            if unknown or not self.candidates:
                raise ValidationError(f"bad candidate set {list(self.candidates)}")


def check_supply(graph: CapacitatedGraph, supply: Mapping[str, float], name: str = "supply",
                 allow_zero: bool = True) -> None:
    for v, x in supply.items():
        if v not in graph.index:
            raise ValidationError(f"{name}: unknown vertex {v!r}")
        if not x <= 0:
            raise ValidationError(f"{name}: supply at {v!r} must be non-positive, got {x}")
    if not allow_zero and not any(x < 0 for x in supply.values()):
        raise ValidationError(f"{name}: supply vector has no source")


def sources(supply: Mapping[str, float]) -> list[str]:
    return sorted(v for v, x in supply.items() if x < 0)


def target_demand(supply: Mapping[str, float], target: str,
                  graph: CapacitatedGraph | None = None) -> dict[str, float]:
    """Demand vector of ``supply`` with all of it delivered to ``target``.

    The target's own supply is overwritten.  The target entry is the negated
    partial sum of the others and is inserted last, so summing the values in
    iteration order gives exactly zero.
    """
    if graph is not None and target not in graph.index:
        raise ValidationError(f"unknown vertex {target!r}")
    out = {}
    total = 0.0
    for v in sorted(supply):
        if v == target or supply[v] == 0:
            continue
        out[v] = float(supply[v])
        total += out[v]
    out[target] = -total if total else 0.0
    return out


def net_inflow(graph: CapacitatedGraph, flow: np.ndarray) -> np.ndarray:
    return graph.incidence @ np.asarray(flow, dtype=float)


def cut_edges(graph: CapacitatedGraph, U: Iterable[str]) -> tuple[list[int], list[int]]:
    """Edge indices entering and leaving the vertex set ``U``."""
    U = set(U)
    if not U or len(U) >= graph.n or not U <= set(graph.vertices):
        raise ValidationError("U must be a nonempty proper vertex subset")
    incoming, outgoing = [], []
    for j, (u, v, _) in enumerate(graph.edges):
        if (u in U) == (v in U):
            continue
        (incoming if v in U else outgoing).append(j)
    return incoming, outgoing


def cut_balance(graph: CapacitatedGraph, flow: np.ndarray, U: Iterable[str],
                demand: Mapping[str, float] | None = None, tol: float = SATISFY_TOL) -> float:
    """Flow into ``U`` minus flow out of ``U`` across its cut.

    If ``demand`` is given the value is checked against the total demand of
    ``U`` and a mismatch raises :class:`ValidationError`.
    """
    U = set(U)
    incoming, outgoing = cut_edges(graph, U)
    flow = np.asarray(flow, dtype=float)
    value = float(flow[incoming].sum() - flow[outgoing].sum())
    if demand is not None:
        expected = sum(x for v, x in demand.items() if v in U)
        if abs(value - expected) > tol:
            raise ValidationError(f"cut balance {value} != demand {expected} on {sorted(U)}")
    return value


@dataclass
class Verdict:
    valid: bool
    vertex_violations: list[tuple[int, str, float]] = field(default_factory=list)
    capacity_violations: list[tuple[int, float, float]] = field(default_factory=list)
    sign_violations: list[tuple[int, int, float]] = field(default_factory=list)

    def __bool__(self):
        return self.valid


def as_multiflow(graph: CapacitatedGraph, flows) -> np.ndarray:
    F = np.asarray(flows, dtype=float)
    if F.size == 0:
        return np.zeros((len(flows) if hasattr(flows, "__len__") else 0, graph.m))
    if F.ndim != 2 or F.shape[1] != graph.m:
        raise ValidationError(f"multiflow must have shape (k, {graph.m}), got {F.shape}")
    return F


def validate_multiflow(graph: CapacitatedGraph, demands: Sequence[Mapping[str, float]],
                       flows, tol: float = SATISFY_TOL) -> Verdict:
    """Check conservation for every commodity and joint congestion on every edge."""
    F = as_multiflow(graph, flows)
    if len(demands) != F.shape[0]:
        raise ValidationError(f"{len(demands)} demands but {F.shape[0]} flows")
    verdict = Verdict(True)
    for i, d in enumerate(demands):
        resid = net_inflow(graph, F[i]) - graph.vector(d)
        for v, r in zip(graph.vertices, resid):
            if abs(r) > tol:
                verdict.vertex_violations.append((i, v, float(r)))
        if graph.directed:
            for j in np.flatnonzero(F[i] < -tol):
                verdict.sign_violations.append((i, int(j), float(F[i, j])))
    congestion = np.abs(F).sum(axis=0)
    for j in np.flatnonzero(congestion > graph.capacities + tol):
        verdict.capacity_violations.append((int(j), float(congestion[j]), graph.edges[j].cap))
    verdict.valid = not (verdict.vertex_violations or verdict.capacity_violations
                         or verdict.sign_violations)
    return verdict


def _arcs(graph: CapacitatedGraph, flow: np.ndarray):
    """Positive arcs ``(tail, head, edge index, sign)`` carrying the flow."""
    out = {}
    for j, (u, v, _) in enumerate(graph.edges):
        if flow[j] > 0:
            out.setdefault(u, []).append((v, j, 1.0))
        elif flow[j] < 0:
            out.setdefault(v, []).append((u, j, -1.0))
    return out


def _find_cycle(graph, flow, eps):
    """A directed cycle of same-sign flow, as ``[(edge, sign), ...]``, or None."""
    arcs = _arcs(graph, np.where(np.abs(flow) > eps, flow, 0.0))
    state = {}
    for start in graph.vertices:
        if start in state:
            continue
        state[start] = 1
        stack = [(start, iter(arcs.get(start, ())))]
        via = [None]  # arc used to enter stack[k]
        pos = {start: 0}
        while stack:
            x, it = stack[-1]
            step = next(it, None)
            if step is None:
                state[x] = 2
                stack.pop()
                via.pop()
                del pos[x]
                continue
            y, j, sign = step
            if state.get(y) == 1:
                return via[pos[y] + 1:] + [(j, sign)]
            if y not in state:
                state[y] = 1
                pos[y] = len(stack)
                stack.append((y, iter(arcs.get(y, ()))))
                via.append((j, sign))
    return None


def cancel_circulations(graph: CapacitatedGraph, flow: np.ndarray,
                        eps: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Split ``flow`` into an acyclic part and a same-sign circulation.

    Returns ``(acyclic, circulation)`` with ``acyclic + circulation == flow``
    and ``|acyclic| + |circulation| == |flow|`` edgewise.
    """
    work = np.array(flow, dtype=float)
    if eps is None:
        eps = 1e-12 * max(1.0, float(np.abs(work).max(initial=0.0)))
    circ = np.zeros_like(work)
    while True:
        cyc = _find_cycle(graph, work, eps)
        if cyc is None:
            return work, circ
        amount = min(abs(work[j]) for j, _ in cyc)
        for j, sign in cyc:
            work[j] -= sign * amount
            circ[j] += sign * amount
            if abs(work[j]) <= eps:
                circ[j] += work[j]
                work[j] = 0.0


def decompose_single_target(graph: CapacitatedGraph, flow: np.ndarray,
                            demand: Mapping[str, float],
                            tol: float = SATISFY_TOL) -> list[tuple[str, np.ndarray]]:
    """Split a single-target flow into one flow per source.

    Each part ships exactly that source's supply to the target, every part
    agrees in sign with ``flow`` on every edge, and the parts sum to
    ``flow``.  Circulations are cancelled first and handed to the first
    source's part, which keeps both summation identities exact.
    """
    flow = np.asarray(flow, dtype=float)
    d = graph.vector(demand)
    targets = [graph.vertices[i] for i in np.flatnonzero(d > 0)]
    if len(targets) != 1:
        raise ValidationError(f"demand must have exactly one target, found {len(targets)}")
    target = targets[0]
    if np.abs(net_inflow(graph, flow) - d).max(initial=0.0) > tol:
        raise ValidationError("flow does not satisfy the demand")

    work, circ = cancel_circulations(graph, flow)
    eps = 1e-12 * max(1.0, float(np.abs(flow).max(initial=0.0)))
    parts = []
    for s in [graph.vertices[i] for i in np.flatnonzero(d < 0)]:
        part = np.zeros_like(work)
        remaining = -d[graph.index[s]]
        while remaining > eps:
            arcs = _arcs(graph, np.where(np.abs(work) > eps, work, 0.0))
            walk, x = [], s
            while x != target and arcs.get(x):
                y, j, sign = max(arcs[x], key=lambda a: abs(work[a[1]]))
                walk.append((j, sign))
                x = y
            if x != target or not walk:
                break
            amount = min(remaining, min(abs(work[j]) for j, _ in walk))
            for j, sign in walk:
                work[j] -= sign * amount
                part[j] += sign * amount
            remaining -= amount
        parts.append((s, part))
    # circulations and rounding residue stay sign-compatible; park them on the first part
    parts[0] = (parts[0][0], parts[0][1] + (flow - sum(p for _, p in parts)))
    return parts
