"""Instance generators: the hardness-reduction constructions and random instances.

Every reduction fixture records the answer of its source problem in
``meta`` (computed by the brute-force deciders), so a fixture can be checked
against the oracle without outside knowledge.
"""

from __future__ import annotations

from collections import Counter
from typing import Sequence

import numpy as np

from .model import CapacitatedGraph, Edge, Instance, ValidationError
from .oracles import brute_equipartition, brute_mis, brute_perfect_matching

FixtureInstance = Instance

PRNG = "numpy.PCG64"
GENERATOR_VERSION = 1


def _triples(X, Y, Z, W):
    X, Y, Z = [list(map(str, part)) for part in (X, Y, Z)]
    if not len(X) == len(Y) == len(Z):
        raise ValidationError("X, Y and Z must have the same size")
    names = X + Y + Z
    if len(set(names)) != len(names):
        raise ValidationError("X, Y and Z must be disjoint with distinct elements")
    W = [tuple(map(str, w)) for w in W]
    if len(set(W)) != len(W):
        raise ValidationError("W contains a repeated triple")
    for x, y, z in W:
        if x not in X or y not in Y or z not in Z:
            raise ValidationError(f"triple {(x, y, z)} is not in X*Y*Z")
    return X, Y, Z, W


def _w_names(W, taken):
    names = [f"w{i + 1}" for i in range(len(W))]
    if taken & set(names):
        raise ValidationError("element names clash with triple vertex names w1, w2, ...")
    return names


def gen_3dm_lomuf(X, Y, Z, W) -> FixtureInstance:
    """Undirected graph whose concurrent value reaches 1 iff ``W`` has a perfect matching.

    Each part P in (X, Y, Z) gets two hubs ``tP`` and ``tP'`` joined to all
    of P; element ``x`` is joined to triple vertex ``w`` when ``x`` is in
    ``w``.  Edges at the primed hubs get capacity (triples containing the
    element) - 1, all others 1.  ``k`` commodities ship one unit from each
    plain hub, ``l - k`` from each primed hub.
    """
    X, Y, Z, W = _triples(X, Y, Z, W)
    k, l = len(X), len(W)
    count = Counter(v for w in W for v in w)
    uncovered = [v for v in X + Y + Z if count[v] == 0]
    if uncovered:
        raise ValidationError(f"elements {uncovered} lie in no triple")
    hubs = {"X": ("tX", "tX'"), "Y": ("tY", "tY'"), "Z": ("tZ", "tZ'")}
    wn = _w_names(W, set(X + Y + Z))
    if set(X + Y + Z) & {h for pair in hubs.values() for h in pair}:
        raise ValidationError("element names clash with hub names")
    edges = []
    for part, elems in zip("XYZ", (X, Y, Z)):
        t, tp = hubs[part]
        for x in elems:
            edges.append(Edge(t, x, 1))
            edges.append(Edge(tp, x, count[x] - 1))
    for name, w in zip(wn, W):
        for x in w:
            edges.append(Edge(x, name, 1))
    plain = {"tX": -1.0, "tY": -1.0, "tZ": -1.0}
    primed = {"tX'": -1.0, "tY'": -1.0, "tZ'": -1.0}
    supplies = [dict(plain) for _ in range(k)] + [dict(primed) for _ in range(l - k)]
    graph = CapacitatedGraph.build(edges)
    meta = {"construction": "3dm-lomuf", "k": k, "l": l, "triples": wn,
            "matching": brute_perfect_matching(X, Y, Z, W)}
    return Instance(graph, supplies, meta=meta)


def gen_3dm_dilomuf(X, Y, Z, W) -> FixtureInstance:
    """Directed variant: unit arcs hub -> element -> triple, ``k`` copies of the hub supply.

    The best value is at least 1 with a perfect matching and at most 1/2
    without one.
    """
    X, Y, Z, W = _triples(X, Y, Z, W)
    k = len(X)
    wn = _w_names(W, set(X + Y + Z))
    arcs = []
    for t, elems in zip(("tX", "tY", "tZ"), (X, Y, Z)):
        arcs += [Edge(t, x, 1) for x in elems]
    for name, w in zip(wn, W):
        arcs += [Edge(x, name, 1) for x in w]
    graph = CapacitatedGraph.build(arcs, vertices=("tX", "tY", "tZ"), directed=True)
    supplies = [{"tX": -1.0, "tY": -1.0, "tZ": -1.0} for _ in range(k)]
    meta = {"construction": "3dm-dilomuf", "k": k, "l": len(W), "triples": wn,
            "matching": brute_perfect_matching(X, Y, Z, W)}
    return Instance(graph, supplies, meta=meta)


def _path_names(m):
    width = len(str(m))
    return [f"v{j:0{width}d}" for j in range(1, m + 1)]


def gen_3partition_dipath(S: Sequence[int], m: int) -> FixtureInstance:
    """Symmetric di-path ``v1 .. vm`` (twin arcs of capacity mB, B = sum(S)/m)
    with 5m - 2 bi-source supplies; the value reaches 1 iff S splits into m
    equal-sum parts."""
    S = [int(s) for s in S]
    if m < 1 or len(S) != 3 * m:
        raise ValidationError(f"need |S| = 3m, got |S| = {len(S)} and m = {m}")
    if any(s <= 0 for s in S):
        raise ValidationError("S must contain positive integers")
    B = sum(S) / m
    v = _path_names(m)
    arcs = []
    for j in range(m - 1):
        arcs += [Edge(v[j], v[j + 1], m * B), Edge(v[j + 1], v[j], m * B)]
    graph = CapacitatedGraph.build(arcs, vertices=v, directed=True)
    supplies, names = [], []
    for i, s in enumerate(S):
        supplies.append({v[0]: -float(s), v[-1]: -float(s)})
        names.append(f"s{i + 1}")
    for j in range(1, m):
        supplies.append({v[j - 1]: -(m * B + 1), v[j]: -(m - j) * B})
        names.append(f"p{j}")
    for j in range(1, m):
        supplies.append({v[j - 1]: -j * B, v[j]: -(m * B + 1)})
        names.append(f"q{j}")
    meta = {"construction": "3part-path", "S": S, "m": m, "B": B,
            "partition": brute_equipartition(S, m)}
    return Instance(graph, supplies, names=names, meta=meta)


def gen_3dm_restricted_tree(X, Y, Z, W) -> FixtureInstance:
    """Star with root ``r`` and one leaf per triple, capacities 6, targets restricted to leaves.

    Needs every element in at most three triples and ``|W| >= |X|``.  With a
    perfect matching the restricted value reaches 1, without one it is at
    most 6/7.
    """
    X, Y, Z, W = _triples(X, Y, Z, W)
    k, l = len(X), len(W)
    if l < k:
        raise ValidationError("need at least as many triples as elements per part")
    wn = _w_names(W, set(X + Y + Z))
    edges = [Edge(w, "r", 6) for w in wn]
    supplies, names = [], []
    for u in X + Y + Z:
        leaves = [name for name, w in zip(wn, W) if u in w]
        if len(leaves) > 3:
            raise ValidationError(f"element {u} lies in more than three triples")
        s = {w: -1.0 for w in leaves}
        if len(leaves) < 3:
            s["r"] = float(len(leaves) - 3)
        supplies.append(s)
        names.append(f"d_{u}")
    for i in range(l - k):
        supplies.append({"r": -3.0})
        names.append(f"e{i + 1}")
    graph = CapacitatedGraph.build(edges, vertices=("r",))
    meta = {"construction": "3dm-rtree", "k": k, "l": l,
            "matching": brute_perfect_matching(X, Y, Z, W)}
    return Instance(graph, supplies, names=names, candidates=tuple(wn), meta=meta)


def gen_3partition_star(S: Sequence[int], m: int) -> FixtureInstance:
    """Star with centre ``r`` and ``m`` leaves of capacity B; each number is a
    supply at the centre and targets are restricted to the leaves."""
    S = [int(s) for s in S]
    if m < 1 or len(S) != 3 * m:
        raise ValidationError(f"need |S| = 3m, got |S| = {len(S)} and m = {m}")
    if any(s <= 0 for s in S):
        raise ValidationError("S must contain positive integers")
    B = sum(S) / m
    leaves = [f"u{j:0{len(str(m))}d}" for j in range(1, m + 1)]
    graph = CapacitatedGraph.build([Edge(u, "r", B) for u in leaves], vertices=("r",))
    supplies = [{"r": -float(s)} for s in S]
    meta = {"construction": "3part-star", "S": S, "m": m, "B": B,
            "partition": brute_equipartition(S, m)}
    return Instance(graph, supplies, candidates=tuple(leaves), meta=meta)


def gen_mis_maxf(vertices: Sequence, edges: Sequence[tuple]) -> FixtureInstance:
    """Graph whose number of jointly satisfiable commodities equals the independence number.

    Every edge ``e = {a, b}`` becomes a vertex joined to ``a`` and ``b`` and to
    a private pendant ``w_e``; the commodity of vertex ``a`` ships one unit
    from ``a`` and one from each pendant of an edge at ``a``.  Capacities 1.
    """
    vertices = [str(v) for v in vertices]
    if len(set(vertices)) != len(vertices):
        raise ValidationError("duplicate vertex")
    pairs = []
    for a, b in edges:
        a, b = str(a), str(b)
        if a not in vertices or b not in vertices or a == b:
            raise ValidationError(f"bad edge {a}-{b}")
        a, b = sorted((a, b))
        if (a, b) in pairs:
            raise ValidationError(f"duplicate edge {a}-{b}")
        pairs.append((a, b))
    new = []
    out = []
    for a, b in pairs:
        e, w = f"e:{a}-{b}", f"w:{a}-{b}"
        new += [e, w]
        out += [Edge(a, e, 1), Edge(b, e, 1), Edge(e, w, 1)]
    if set(new) & set(vertices):
        raise ValidationError("vertex names clash with edge vertex names")
    graph = CapacitatedGraph.build(out, vertices=vertices)
    supplies = []
    for v in vertices:
        s = {v: -1.0}
        for a, b in pairs:
            if v in (a, b):
                s[f"w:{a}-{b}"] = -1.0
        supplies.append(s)
    meta = {"construction": "mis", "n": len(vertices), "edges": [list(p) for p in pairs],
            "mis": brute_mis(vertices, pairs) if len(vertices) <= 20 else None}
    return Instance(graph, supplies, names=[f"d_{v}" for v in vertices], meta=meta)


# --- random instances ----------------------------------------------------------------

def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def _labels(n):
    width = max(2, len(str(n - 1)))
    return [f"v{i:0{width}d}" for i in range(n)]


def _random_tree_pairs(rng, n):
    """Random recursive tree on shuffled labels ``0..n-1``."""
    perm = rng.permutation(n)
    return [(int(perm[int(rng.integers(0, i))]), int(perm[i])) for i in range(1, n)]


def _random_supplies(rng, names, k, max_sources, magnitude_range):
    lo, hi = magnitude_range
    out = []
    for _ in range(k):
        count = int(rng.integers(1, min(max_sources, len(names)) + 1))
        picks = rng.choice(len(names), size=count, replace=False)
        out.append({names[int(p)]: -float(rng.integers(lo, hi + 1)) for p in sorted(picks)})
    return out


def _meta(kind, seed, **params):
    return {"construction": kind, "seed": seed, "prng": PRNG,
            "generator_version": GENERATOR_VERSION, **params}


def gen_random_tree(n: int, k: int, max_sources: int = 4, cap_range=(1, 10), seed: int = 0,
                    magnitude_range=(1, 5)) -> FixtureInstance:
    """Random undirected tree with integer capacities and integer supplies."""
    if n < 1 or k < 0 or max_sources < 1:
        raise ValidationError("need n >= 1, k >= 0 and max_sources >= 1")
    rng = _rng(seed)
    names = _labels(n)
    pairs = _random_tree_pairs(rng, n)
    caps = rng.integers(cap_range[0], cap_range[1] + 1, size=len(pairs))
    graph = CapacitatedGraph.build([(names[a], names[b], float(c)) for (a, b), c in zip(pairs, caps)],
                                   vertices=names)
    supplies = _random_supplies(rng, names, k, max_sources, magnitude_range)
    return Instance(graph, supplies, meta=_meta("random-tree", seed, n=n, k=k,
                                                max_sources=max_sources))


def _connected_pairs(rng, n, p):
    pairs = {tuple(sorted(e)) for e in _random_tree_pairs(rng, n)}
    for a in range(n):
        for b in range(a + 1, n):
            if (a, b) not in pairs and rng.random() < p:
                pairs.add((a, b))
    return sorted(pairs)


def gen_random_graph(n: int, p: float, k: int, max_sources: int = 4, cap_range=(1, 10),
                     seed: int = 0, magnitude_range=(1, 5)) -> FixtureInstance:
    """Random connected graph: a random spanning tree plus each other pair with probability p."""
    if n < 1 or k < 0 or max_sources < 1 or not 0 <= p <= 1:
        raise ValidationError("need n >= 1, k >= 0, max_sources >= 1 and 0 <= p <= 1")
    rng = _rng(seed)
    names = _labels(n)
    pairs = _connected_pairs(rng, n, p)
    caps = rng.integers(cap_range[0], cap_range[1] + 1, size=len(pairs))
    graph = CapacitatedGraph.build([(names[a], names[b], float(c)) for (a, b), c in zip(pairs, caps)],
                                   vertices=names)
    supplies = _random_supplies(rng, names, k, max_sources, magnitude_range)
    return Instance(graph, supplies, meta=_meta("random-graph", seed, n=n, p=p, k=k,
                                                max_sources=max_sources))


def gen_random_symmetric_digraph(n: int, k: int, p: float = 0.3, tree: bool = False,
                                 max_sources: int = 4, cap_range=(1, 10), seed: int = 0,
                                 magnitude_range=(1, 5)) -> FixtureInstance:
    """Random connected symmetric digraph: twin arcs on every pair, one common capacity."""
    if n < 1 or k < 0 or max_sources < 1 or not 0 <= p <= 1:
        raise ValidationError("need n >= 1, k >= 0, max_sources >= 1 and 0 <= p <= 1")
    rng = _rng(seed)
    names = _labels(n)
    pairs = sorted(tuple(sorted(e)) for e in _random_tree_pairs(rng, n)) if tree \
        else _connected_pairs(rng, n, p)
    cap = float(rng.integers(cap_range[0], cap_range[1] + 1))
    arcs = []
    for a, b in pairs:
        arcs += [(names[a], names[b], cap), (names[b], names[a], cap)]
    graph = CapacitatedGraph.build(arcs, vertices=names, directed=True)
    supplies = _random_supplies(rng, names, k, max_sources, magnitude_range)
    kind = "random-symmetric-ditree" if tree else "random-symmetric-digraph"
    return Instance(graph, supplies, meta=_meta(kind, seed, n=n, p=p, k=k,
                                                max_sources=max_sources))
