"""Target choice on undirected networks.

``locate_tree`` is exact on trees, ``locate_master_source`` sends every
commodity to its largest source, and ``locate_restricted`` is a coordinate
ascent heuristic for the candidate-restricted variant.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .mcf import concurrent_value, demand_matrix
from .model import CapacitatedGraph, ValidationError, check_supply, sources, target_demand


class DegenerateSupplyWarning(UserWarning):
    """A supply vector with no source was given a placeholder target."""


@dataclass(frozen=True)
class LocatorStats:
    theta: int
    eta: float


def _rooted(graph: CapacitatedGraph, root: str):
    parent, children, order = {root: None}, {v: [] for v in graph.vertices}, [root]
    for x in order:
        for y in graph.adjacency[x]:
            if y not in parent:
                parent[y] = x
                children[x].append(y)
                order.append(y)
    return parent, children, order


def locate_tree(graph: CapacitatedGraph, supplies: Sequence[Mapping[str, float]],
                root: str | None = None) -> list[str]:
    """Optimal targets on an undirected tree.

    Start each commodity at the lowest common ancestor of its sources and
    descend into a child whose subtree holds strictly more than half of the
    total supply, until no child does.  The tree is rooted at ``root`` or at
    the smallest vertex.
    """
    if graph.directed or not graph.is_tree():
        raise ValidationError("graph is not a tree")
    root = graph.vertices[0] if root is None else root
    parent, children, order = _rooted(graph, root)
    depth = {root: 0}
    for x in order[1:]:
        depth[x] = depth[parent[x]] + 1

    targets = []
    for i, supply in enumerate(supplies):
        check_supply(graph, supply, name=f"supply {i}")
        srcs = sources(supply)
        if not srcs:
            warnings.warn(f"supply {i} has no source; target set to the root",
                          DegenerateSupplyWarning, stacklevel=2)
            targets.append(root)
            continue
        weight = {v: 0.0 for v in graph.vertices}
        for x in reversed(order):
            weight[x] += -supply.get(x, 0.0)
            if parent[x] is not None:
                weight[parent[x]] += weight[x]
        total = weight[root]

        at = srcs[0]
        for s in srcs[1:]:
            a, b = at, s
            while depth[a] > depth[b]:
                a = parent[a]
            while depth[b] > depth[a]:
                b = parent[b]
            while a != b:
                a, b = parent[a], parent[b]
            at = a

        while True:
            heavy = [u for u in children[at] if total - weight[u] < weight[u]]
            assert len(heavy) <= 1, "two children each hold a strict majority"
            if not heavy:
                break
            at = heavy[0]
        targets.append(at)
    return targets


def master_source(supply: Mapping[str, float]) -> str:
    srcs = sources(supply)
    if not srcs:
        raise ValidationError("supply vector has no source")
    # sources() is sorted, and max() keeps the first maximiser
    return max(srcs, key=lambda v: -supply[v])


def locate_master_source(supplies: Sequence[Mapping[str, float]]) -> list[str]:
    """Each commodity's largest source; ties go to the smallest vertex id."""
    return [master_source(s) for s in supplies]


def locator_stats(supplies: Sequence[Mapping[str, float]]) -> LocatorStats:
    """Maximum source count and concentration of a family of supply vectors."""
    if not supplies:
        raise ValidationError("no supply vectors")
    theta, eta = 0, 1.0
    for s in supplies:
        mags = [-x for x in s.values() if x < 0]
        theta = max(theta, len(mags))
        if mags:
            eta = max(eta, sum(mags) / max(mags))
    return LocatorStats(theta, eta)


def _nearest(graph: CapacitatedGraph, start: str, candidates: Sequence[str]) -> str:
    dist = graph.hop_distances(start)
    reachable = [c for c in candidates if c in dist]
    if not reachable:
        return candidates[0]
    return min(reachable, key=lambda c: (dist[c], c))


def locate_restricted(graph: CapacitatedGraph, supplies: Sequence[Mapping[str, float]],
                      candidates: Iterable[str], rounds: int = 2) -> list[str]:
    """Coordinate ascent over candidate targets (no optimality guarantee).

    Targets start at the candidate nearest to each master source.  Each
    sweep moves one commodity at a time to the candidate that maximises the
    concurrent flow with the others held fixed; a move needs a strict gain.
    """
    candidates = sorted(set(candidates))
    if not candidates:
        raise ValidationError("empty candidate set")
    unknown = [c for c in candidates if c not in graph.index]
    if unknown:
        raise ValidationError(f"unknown candidate vertices {unknown}")
    targets = [_nearest(graph, master_source(s), candidates) if sources(s) else candidates[0]
               for s in supplies]

    def value(tgts):
        return concurrent_value(graph, demand_matrix(
            graph, [target_demand(s, t) for s, t in zip(supplies, tgts)]))

    current = value(targets)
    for _ in range(rounds):
        moved = False
        for i in range(len(supplies)):
            for c in candidates:
                if c == targets[i]:
                    continue
                trial = targets[:i] + [c] + targets[i + 1:]
                lam = value(trial)
                if lam > current + 1e-12 * max(1.0, abs(current)):
                    targets, current, moved = trial, lam, True
        if not moved:
            break
    return targets
