import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lomuf import (CapacitatedGraph, ValidationError, cancel_circulations, cut_balance, cut_edges,
                   decompose_single_target, gen_random_graph, gen_random_tree, solve_concurrent, target_demand,
                   validate_multiflow)


@pytest.fixture
def p3():
    return CapacitatedGraph.build([("a", "b", 1), ("b", "c", 1)])


def test_graph_rejects_bad_structure():
    with pytest.raises(ValidationError, match="self-loop"):
        CapacitatedGraph.build([("a", "a", 1)])
    with pytest.raises(ValidationError, match="duplicate edge"):
        CapacitatedGraph.build([("a", "b", 1), ("b", "a", 2)])
    with pytest.raises(ValidationError, match="duplicate arc"):
        CapacitatedGraph.build([("a", "b", 1), ("a", "b", 2)], directed=True)
    with pytest.raises(ValidationError, match="capacity"):
        CapacitatedGraph.build([("a", "b", -1)])
    with pytest.raises(ValidationError, match="unknown vertex"):
        CapacitatedGraph(("a",), (("a", "b", 1),))


def test_graph_accepts_zero_capacity_and_twin_arcs():
    g = CapacitatedGraph.build([("a", "b", 0)])
    assert g.capacities.tolist() == [0.0]
    d = CapacitatedGraph.build([("a", "b", 1), ("b", "a", 1)], directed=True)
    assert d.m == 2 and d.is_tree()


def test_vertices_are_sorted_and_forest_detection():
    g = CapacitatedGraph.build([("c", "a", 1), ("a", "b", 1)], vertices=["z"])
    assert g.vertices == ("a", "b", "c", "z")
    assert g.is_forest() and not g.is_tree()
    cyc = CapacitatedGraph.build([("a", "b", 1), ("b", "c", 1), ("c", "a", 1)])
    assert not cyc.is_forest()


def test_target_demand_examples():
    assert target_demand({"a": -1}, "c") == {"a": -1.0, "c": 1.0}
    assert target_demand({"a": -1}, "a") == {"a": 0.0}
    assert target_demand({"a": -2, "b": -1}, "b") == {"a": -2.0, "b": 2.0}


def test_target_demand_unknown_vertex(p3):
    with pytest.raises(ValidationError):
        target_demand({"a": -1}, "q", p3)


@given(st.dictionaries(st.sampled_from("abcdefgh"),
                       st.floats(-1e6, 0, allow_nan=False).filter(lambda x: x != 0), max_size=8),
       st.sampled_from("abcdefgh"))
def test_target_demand_sums_to_exactly_zero(supply, target):
    d = target_demand(supply, target)
    total = 0.0
    for x in d.values():
        total += x
    assert total == 0.0
    assert sum(1 for x in d.values() if x > 0) <= 1


def test_cut_edges_examples(p3):
    assert cut_edges(p3, {"a"}) == ([], [0])
    assert cut_edges(p3, {"b"}) == ([0], [1])
    twins = CapacitatedGraph.build([("u", "v", 1), ("v", "u", 1)], directed=True)
    assert cut_edges(twins, {"u"}) == ([1], [0])


def test_cut_edges_rejects_trivial_sets(p3):
    for U in (set(), {"a", "b", "c"}):
        with pytest.raises(ValidationError):
            cut_edges(p3, U)


def test_cut_balance_examples(p3):
    f = np.array([1.0, 1.0])
    d = {"a": -1, "c": 1}
    assert cut_balance(p3, f, {"a"}, d) == -1
    assert cut_balance(p3, f, {"a", "b"}, d) == -1
    assert cut_balance(p3, np.zeros(2), {"b"}, {}) == 0


def test_cut_balance_checker_mode_raises(p3):
    with pytest.raises(ValidationError, match="cut balance"):
        cut_balance(p3, np.array([0.5, 1.0]), {"a"}, {"a": -1, "c": 1})


def test_validate_multiflow_examples(p3):
    d = {"a": -1, "c": 1}
    assert validate_multiflow(p3, [d], [[1, 1]])
    verdict = validate_multiflow(p3, [d, d], [[1, 1], [1, 1]])
    assert not verdict and len(verdict.capacity_violations) == 2
    verdict = validate_multiflow(p3, [d], [[1, 0.5]])
    assert not verdict and {v for _, v, _ in verdict.vertex_violations} == {"b", "c"}
    with pytest.raises(ValidationError):
        validate_multiflow(p3, [d, d], [[1, 1]])


def test_validate_multiflow_flags_negative_arc_flow():
    g = CapacitatedGraph.build([("a", "b", 1), ("b", "a", 1)], directed=True)
    verdict = validate_multiflow(g, [{"a": 1, "b": -1}], [[-1, 0]])
    assert verdict.sign_violations


def test_decompose_star():
    g = CapacitatedGraph.build([("u1", "r", 2), ("u2", "r", 2)])
    parts = decompose_single_target(g, np.array([1.0, 1.0]), {"u1": -1, "u2": -1, "r": 2})
    assert [s for s, _ in parts] == ["u1", "u2"]
    assert parts[0][1].tolist() == [1.0, 0.0] and parts[1][1].tolist() == [0.0, 1.0]


def test_decompose_single_source_returns_flow_itself(p3):
    f = np.array([1.0, 1.0])
    (src, part), = decompose_single_target(p3, f, {"a": -1, "c": 1})
    assert src == "a" and part.tolist() == f.tolist()


def test_decompose_keeps_identities_with_a_circulation():
    g = CapacitatedGraph.build([("a", "b", 5), ("b", "c", 5), ("c", "a", 5), ("c", "t", 5),
                                ("b", "t", 5)])
    f = np.array([2.0, 2.0, 1.0, 1.0, 1.0])  # a->b->c->a carries a unit cycle
    d = {"a": -1, "b": -1, "t": 2}
    parts = decompose_single_target(g, f, d)
    assert np.allclose(sum(p for _, p in parts), f, atol=1e-12)
    assert np.allclose(sum(np.abs(p) for _, p in parts), np.abs(f), atol=1e-12)
    for s, p in parts:
        assert validate_multiflow(g, [{s: d[s], "t": -d[s]}], [p], tol=1e-9)


def test_decompose_errors(p3):
    with pytest.raises(ValidationError, match="exactly one target"):
        decompose_single_target(p3, np.zeros(2), {"a": -2, "b": 1, "c": 1})
    with pytest.raises(ValidationError, match="does not satisfy"):
        decompose_single_target(p3, np.zeros(2), {"a": -1, "c": 1})


def test_cancel_circulations_splits_flow():
    g = CapacitatedGraph.build([("a", "b", 1), ("b", "c", 1), ("c", "a", 1), ("a", "d", 1)])
    f = np.array([2.0, 2.0, 2.0, 1.0])
    acyclic, circ = cancel_circulations(g, f)
    assert acyclic.tolist() == [0.0, 0.0, 0.0, 1.0]
    assert np.array_equal(acyclic + circ, f)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_decomposition_identities_on_solver_flows(seed):
    inst = (gen_random_tree(7, 1, max_sources=3, seed=seed) if seed % 2
            else gen_random_graph(7, 0.6, 1, max_sources=3, seed=seed))
    g, s = inst.graph, inst.supplies[0]
    target = sorted(g.vertices)[-1]
    d = target_demand(s, target)
    if not any(x > 0 for x in d.values()):
        return
    res = solve_concurrent(g, [d])
    scaled = {v: res.lam * x for v, x in d.items()}
    f = res.witness[0]
    parts = decompose_single_target(g, f, scaled)
    assert np.abs(sum(p for _, p in parts) - f).max() <= 1e-9
    assert np.abs(sum(np.abs(p) for _, p in parts) - np.abs(f)).max() <= 1e-9
    for src, p in parts:
        assert validate_multiflow(g, [{src: scaled[src], target: -scaled[src]}], [p])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_cut_balance_on_solver_flows(seed):
    inst = gen_random_tree(8, 2, seed=seed)
    g = inst.graph
    rng = np.random.default_rng(seed)
    demands = [target_demand(s, g.vertices[0]) for s in inst.supplies]
    res = solve_concurrent(g, demands)
    if res.unbounded:
        return
    for i, d in enumerate(demands):
        scaled = {v: res.lam * x for v, x in d.items()}
        for _ in range(20):
            U = set(rng.choice(g.vertices, size=int(rng.integers(1, g.n)), replace=False))
            cut_balance(g, res.witness[i], U, scaled)
