"""Exhaustive ground-truth solvers and brute-force deciders for small instances.

The target searches refuse instances whose naive tuple count exceeds the
budget instead of sampling.  Below that size they search exactly but skip
work that cannot change the answer: a partial tuple is abandoned once the
commodities placed so far already fall below the incumbent (dropping
commodities never lowers the concurrent value), and commodities with
identical supplies get non-decreasing targets.  ``prune=False`` switches to
plain enumeration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .mcf import UNBOUNDED, concurrent_value, solve_total
from .model import SATISFY_TOL, CapacitatedGraph, ValidationError, check_supply, sources, target_demand

TIE_TOL = 1e-9


class BudgetExceeded(RuntimeError):
    """The instance is too large for exhaustive search under the given budget."""


@dataclass(frozen=True)
class OracleBudget:
    max_lp_calls: int = 100_000
    max_paths: int = 10_000

    def __post_init__(self):
        if self.max_lp_calls <= 0 or self.max_paths <= 0:
            raise ValueError("budget limits must be positive")


class OracleResult(NamedTuple):
    targets: list
    value: float


def _candidates(graph: CapacitatedGraph, candidates: Iterable[str] | None) -> list[str]:
    if candidates is None:
        return list(graph.vertices)
    cands = sorted(set(candidates))
    if not cands:
        raise ValidationError("empty candidate set")
    unknown = [c for c in cands if c not in graph.index]
    if unknown:
        raise ValidationError(f"unknown candidate vertices {unknown}")
    return cands


def _check_budget(count: float, limit: int, what: str):
    if count > limit:
        raise BudgetExceeded(f"{what}: {count:.0f} evaluations needed, budget is {limit}")


def _bar(best: float) -> float:
    """Smallest value still counted as a tie with ``best``."""
    if math.isinf(best):
        return best
    return best - TIE_TOL * max(1.0, abs(best))


def _twins(supplies) -> list[int | None]:
    """For each commodity, the previous commodity with an identical supply."""
    last, out = {}, []
    for i, s in enumerate(supplies):
        key = tuple(sorted((v, x) for v, x in s.items() if x != 0))
        out.append(last.get(key))
        last[key] = i
    return out


class _Search:
    """Depth-first target search over a fixed candidate list."""

    def __init__(self, graph, supplies, cands):
        self.graph, self.supplies, self.cands = graph, list(supplies), cands
        for s in self.supplies:
            check_supply(graph, s)
        self.rows = [[graph.vector(target_demand(s, c)) for c in cands] for s in self.supplies]
        self.single = np.array([[concurrent_value(graph, r[None, :]) for r in rows]
                                for rows in self.rows]).reshape(len(self.supplies), len(cands))

    def value(self, members, choice):
        D = np.array([self.rows[i][c] for i, c in zip(members, choice)])
        return concurrent_value(self.graph, D)

    def run(self, members, bar_of, on_leaf, ordered):
        """Visit tuples for ``members`` whose every prefix reaches ``bar_of()``.

        ``on_leaf(choice, lam)`` returns True to stop the search.
        """
        members = list(members)
        twins = _twins([self.supplies[i] for i in members])
        nc = len(self.cands)
        orders = [sorted(range(nc), key=lambda c: (-self.single[i, c], c)) if ordered
                  else list(range(nc)) for i in members]
        choice = []

        def visit(depth, lam):
            if depth == len(members):
                return on_leaf(tuple(choice), lam)
            i = members[depth]
            lo = choice[twins[depth]] if twins[depth] is not None else 0
            for c in orders[depth]:
                if c < lo or self.single[i, c] < bar_of():
                    continue
                choice.append(c)
                new = self.single[i, c] if depth == 0 else self.value(members[:depth + 1], choice)
                if new >= bar_of() and visit(depth + 1, new):
                    return True
                choice.pop()
            return False

        if not members:
            return on_leaf((), UNBOUNDED)
        return visit(0, UNBOUNDED)


def oracle_lomuf(graph: CapacitatedGraph, supplies: Sequence[Mapping[str, float]],
                 candidates: Iterable[str] | None = None, budget: OracleBudget | None = None,
                 prune: bool = True) -> OracleResult:
    """Best target tuple and its concurrent value; ties go to the lexicographically first tuple.

    Works on directed and undirected graphs.  An empty supply list gives
    ``([], UNBOUNDED)``.
    """
    budget = budget or OracleBudget()
    cands = _candidates(graph, candidates)
    k = len(supplies)
    _check_budget(len(cands) ** k, budget.max_lp_calls, "target tuples")
    if not prune:
        return _naive_lomuf(graph, supplies, cands)

    search = _Search(graph, supplies, cands)
    best = [-1.0]
    hits = []

    def on_leaf(choice, lam):
        if lam > best[0]:
            best[0] = lam
        hits.append((lam, choice))
        return False

    search.run(range(k), lambda: _bar(best[0]), on_leaf, ordered=True)
    top = _bar(best[0])
    choice = min(c for lam, c in hits if lam >= top)
    return OracleResult([cands[c] for c in choice], float(best[0]))


def _naive_lomuf(graph, supplies, cands):
    best, arg = -1.0, None
    for tup in itertools.product(cands, repeat=len(supplies)):
        D = np.array([graph.vector(target_demand(s, t)) for s, t in zip(supplies, tup)])
        lam = concurrent_value(graph, D.reshape(len(supplies), graph.n))
        if arg is None or lam > _strict_floor(best):
            best, arg = lam, tup
    return OracleResult(list(arg), float(best))


def oracle_reaches(graph: CapacitatedGraph, supplies: Sequence[Mapping[str, float]],
                   threshold: float, candidates: Iterable[str] | None = None,
                   budget: OracleBudget | None = None) -> list[str] | None:
    """Lexicographically first target tuple with value ``>= threshold``, or None."""
    budget = budget or OracleBudget()
    cands = _candidates(graph, candidates)
    _check_budget(len(cands) ** len(supplies), budget.max_lp_calls, "target tuples")
    search = _Search(graph, supplies, cands)
    found = []

    def on_leaf(choice, lam):
        found.append(choice)
        return True

    search.run(range(len(supplies)), lambda: threshold, on_leaf, ordered=False)
    return [cands[c] for c in found[0]] if found else None


def oracle_total(graph: CapacitatedGraph, supplies: Sequence[Mapping[str, float]],
                 candidates: Iterable[str] | None = None,
                 budget: OracleBudget | None = None) -> OracleResult:
    """Target tuple maximising the total served supply ``sum_i lam_i * |s_i|``."""
    budget = budget or OracleBudget()
    cands = _candidates(graph, candidates)
    k = len(supplies)
    _check_budget(len(cands) ** k, budget.max_lp_calls, "target tuples")
    if k == 0:
        return OracleResult([], 0.0)
    twins = _twins(supplies)
    best, arg = -1.0, None
    for choice in itertools.product(range(len(cands)), repeat=k):
        if any(t is not None and choice[i] < choice[t] for i, t in enumerate(twins)):
            continue
        obj = solve_total(graph, supplies, [cands[c] for c in choice]).objective
        if arg is None or obj > _strict_floor(best):
            best, arg = obj, choice
    return OracleResult([cands[c] for c in arg], best)


def oracle_maxf(graph: CapacitatedGraph, supplies: Sequence[Mapping[str, float]],
                budget: OracleBudget | None = None, tol: float = SATISFY_TOL) -> OracleResult:
    """Largest number of commodities that can be satisfied together (value >= 1).

    Returns targets for the lexicographically first largest subset; the
    other commodities are reported as ``None``.  Subsets are grown level by
    level from satisfiable ones only, since every subset of a satisfiable
    set is satisfiable.
    """
    budget = budget or OracleBudget()
    k, n = len(supplies), graph.n
    _check_budget((n + 1) ** k, budget.max_lp_calls, "subset placements")
    search = _Search(graph, supplies, list(graph.vertices))
    need = 1.0 - tol

    def place(members):
        found = []
        search.run(members, lambda: need,
                   lambda choice, lam: found.append(choice) or True, ordered=False)
        return found[0] if found else None

    level = {}
    for i in range(k):
        choice = place([i])
        if choice is not None:
            level[(i,)] = choice
    best = dict(level)
    while level:
        nxt = {}
        keys = sorted(level)
        known = set(keys)
        for a, b in itertools.combinations(keys, 2):
            if a[:-1] != b[:-1]:
                continue
            cand = a + (b[-1],)
            if any(cand[:j] + cand[j + 1:] not in known for j in range(len(cand))):
                continue
            choice = place(list(cand))
            if choice is not None:
                nxt[cand] = choice
        level = nxt
        if level:
            best = level
    targets = [None] * k
    if not best:
        return OracleResult(targets, 0)
    members = min(best)
    for i, c in zip(members, best[members]):
        targets[i] = graph.vertices[c]
    return OracleResult(targets, len(members))


def greedy_maxf(graph: CapacitatedGraph, supplies: Sequence[Mapping[str, float]],
                tol: float = SATISFY_TOL) -> tuple[int, str] | None:
    """First ``(commodity index, vertex)`` whose placement alone is satisfiable."""
    for i, s in enumerate(supplies):
        check_supply(graph, s)
        for v in graph.vertices:
            D = graph.vector(target_demand(s, v))[None, :]
            if concurrent_value(graph, D) >= 1.0 - tol:
                return i, v
    return None


# --- unsplittable flow -------------------------------------------------------------

def _simple_paths(graph: CapacitatedGraph, s: str, t: str, limit: int) -> list[list[tuple[int, float]]]:
    """All simple paths from ``s`` to ``t`` as ``(edge, sign)`` lists; arcs respect direction."""
    out_arcs = {v: [] for v in graph.vertices}
    for j, (u, v, _) in enumerate(graph.edges):
        out_arcs[u].append((v, j, 1.0))
        if not graph.directed:
            out_arcs[v].append((u, j, -1.0))
    paths, trail, seen = [], [], {s}

    def walk(x):
        if x == t:
            paths.append(list(trail))
            if len(paths) > limit:
                raise BudgetExceeded(f"more than {limit} paths from {s} to {t}")
            return
        for y, j, sign in out_arcs[x]:
            if y not in seen:
                seen.add(y)
                trail.append((j, sign))
                walk(y)
                trail.pop()
                seen.discard(y)

    walk(s)
    return paths


def _unsplittable(graph, supplies, targets, budget, floor):
    """Best path assignment value (or ``floor``) and the assignment that achieves it."""
    budget = budget or OracleBudget()
    if len(supplies) != len(targets):
        raise ValidationError(f"{len(supplies)} supplies but {len(targets)} targets")
    items = []
    for i, (s, t) in enumerate(zip(supplies, targets)):
        check_supply(graph, s)
        if t not in graph.index:
            raise ValidationError(f"unknown vertex {t!r}")
        for x in sources(s):
            if x == t:
                continue
            paths = _simple_paths(graph, x, t, budget.max_paths)
            if not paths:
                return 0.0, None
            items.append((i, -s[x], paths))
    if not items:
        return UNBOUNDED, []
    _check_budget(math.prod(len(it[2]) for it in items), budget.max_paths, "path assignments")
    items.sort(key=lambda it: len(it[2]))
    caps = graph.capacities
    load = np.zeros(graph.m)
    best, chosen, current = [floor], [None], []

    def ratio():
        busy = load > 0
        return float(np.min(caps[busy] / load[busy])) if busy.any() else UNBOUNDED

    def assign(depth):
        if depth == len(items):
            r = ratio()
            if r > best[0]:
                best[0], chosen[0] = r, list(current)
            return
        i, mag, paths = items[depth]
        for p in paths:
            idx = [j for j, _ in p]
            load[idx] += mag
            current.append((i, mag, p))
            if ratio() > best[0]:
                assign(depth + 1)
            current.pop()
            load[idx] -= mag

    assign(0)
    return best[0], chosen[0]


def unsplittable_lambda(graph: CapacitatedGraph, supplies: Sequence[Mapping[str, float]],
                        targets: Sequence[str], budget: OracleBudget | None = None,
                        floor: float = -1.0) -> float:
    """Best value when each source ships its whole supply along one simple path.

    A path from source ``x`` loads every edge on it with ``|s(x)|``; the
    value of an assignment is ``min cap/load``.  Assignments that cannot
    beat ``floor`` are skipped, so the result is exact only when it
    exceeds ``floor`` (otherwise ``floor`` comes back).
    """
    return _unsplittable(graph, supplies, targets, budget, floor)[0]


def unsplittable_routing(graph: CapacitatedGraph, supplies: Sequence[Mapping[str, float]],
                         targets: Sequence[str],
                         budget: OracleBudget | None = None) -> tuple[float, np.ndarray]:
    """Best unsplittable value and a witness multiflow routing ``lam`` times the demands."""
    lam, routing = _unsplittable(graph, supplies, targets, budget, -1.0)
    flows = np.zeros((len(supplies), graph.m))
    if routing and not math.isinf(lam):
        for i, mag, path in routing:
            for j, sign in path:
                flows[i, j] += sign * lam * mag
    return lam, flows


def oracle_unsplittable(graph: CapacitatedGraph, supplies: Sequence[Mapping[str, float]],
                        candidates: Iterable[str] | None = None,
                        budget: OracleBudget | None = None) -> OracleResult:
    """Best target tuple under unsplittable routing; lexicographically first on ties."""
    budget = budget or OracleBudget()
    cands = _candidates(graph, candidates)
    k = len(supplies)
    _check_budget(len(cands) ** k, budget.max_lp_calls, "target tuples")
    twins = _twins(supplies)
    best, arg = -1.0, None
    for choice in itertools.product(range(len(cands)), repeat=k):
        if any(t is not None and choice[i] < choice[t] for i, t in enumerate(twins)):
            continue
        tup = [cands[c] for c in choice]
        if arg is not None and math.isinf(best):
            break  # nothing beats unbounded, and product() runs in lexicographic order
        floor = -1.0 if arg is None else _strict_floor(best)
        lam = unsplittable_lambda(graph, supplies, tup, budget, floor=floor)
        if arg is None or lam > floor:
            best, arg = lam, tup
    if arg is None:
        return OracleResult([], UNBOUNDED)
    return OracleResult(arg, float(best))


def _strict_floor(best: float) -> float:
    return best + TIE_TOL * max(1.0, abs(best))


# --- source-problem deciders ----------------------------------------------------------

def brute_perfect_matching(X, Y, Z, W) -> bool:
    """Does ``W`` contain ``|X|`` triples covering ``X``, ``Y`` and ``Z`` exactly once?"""
    W = [tuple(w) for w in W]
    if len(W) > 20:
        raise ValueError("brute_perfect_matching supports at most 20 triples")
    X, Y, Z = set(X), set(Y), set(Z)
    if not len(X) == len(Y) == len(Z):
        raise ValidationError("X, Y and Z must have equal size")
    for x, y, z in W:
        if x not in X or y not in Y or z not in Z:
            raise ValidationError(f"triple {(x, y, z)} is not in X*Y*Z")
    k = len(X)
    for combo in itertools.combinations(W, k):
        if (len({w[0] for w in combo}) == k and len({w[1] for w in combo}) == k
                and len({w[2] for w in combo}) == k):
            return True
    return k == 0


def brute_equipartition(S: Sequence[int], m: int) -> bool:
    """Can the multiset ``S`` be split into ``m`` parts of equal sum?"""
    S = sorted((int(s) for s in S), reverse=True)
    if len(S) > 12:
        raise ValueError("brute_equipartition supports at most 12 numbers")
    if m <= 0 or any(s <= 0 for s in S):
        raise ValidationError("need m >= 1 and positive integers")
    total = sum(S)
    if total % m:
        return False
    goal = total // m
    bins = [0] * m

    def fill(i):
        if i == len(S):
            return all(b == goal for b in bins)
        tried = set()
        for b in range(m):
            if bins[b] in tried or bins[b] + S[i] > goal:
                continue
            tried.add(bins[b])
            bins[b] += S[i]
            if fill(i + 1):
                return True
            bins[b] -= S[i]
        return False

    return fill(0)


def brute_mis(vertices: Sequence, edges: Sequence[tuple]) -> int:
    """Size of a maximum independent set."""
    vertices = list(vertices)
    if len(vertices) > 20:
        raise ValueError("brute_mis supports at most 20 vertices")
    pos = {v: i for i, v in enumerate(vertices)}
    nbr = [0] * len(vertices)
    for u, v in edges:
        nbr[pos[u]] |= 1 << pos[v]
        nbr[pos[v]] |= 1 << pos[u]
    best = 0
    for mask in range(1 << len(vertices)):
        size = bin(mask).count("1")
        if size <= best:
            continue
        if all(not (nbr[i] & mask) for i in range(len(vertices)) if mask >> i & 1):
            best = size
    return best
