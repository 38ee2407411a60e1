import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lomuf import (CapacitatedGraph, DegenerateSupplyWarning, LocatorStats, ValidationError,
                   gen_3partition_star, gen_random_graph, gen_random_tree, locate_master_source,
                   locate_restricted, locate_tree, locator_stats, oracle_lomuf, solve_concurrent,
                   target_demand)


def lam(graph, supplies, targets):
    return solve_concurrent(graph, [target_demand(s, t) for s, t in zip(supplies, targets)]).lam


@pytest.fixture
def p3():
    return CapacitatedGraph.build([("a", "b", 1), ("b", "c", 1)])


@pytest.fixture
def star():
    return CapacitatedGraph.build([("r", "u1", 1), ("r", "u2", 1), ("r", "u3", 1)])


def test_tree_examples(p3, star):
    assert locate_tree(p3, [{"a": -1, "c": -3}]) == ["c"]
    assert locate_tree(star, [{"u1": -2, "u2": -1, "u3": -1}]) == ["r"]
    assert locate_tree(star, [{"u2": -1}]) == ["u2"]


def test_tree_example_values_match_oracle(p3, star):
    assert lam(p3, [{"a": -1, "c": -3}], ["c"]) == pytest.approx(1.0)
    S = [{"u1": -2, "u2": -1, "u3": -1}]
    assert lam(star, S, ["r"]) == pytest.approx(0.5)
    assert lam(star, S, ["u1"]) == pytest.approx(0.5)
    assert oracle_lomuf(star, S).value == pytest.approx(0.5)


def test_tree_rejects_non_trees():
    cycle = CapacitatedGraph.build([("a", "b", 1), ("b", "c", 1), ("c", "a", 1)])
    with pytest.raises(ValidationError, match="graph is not a tree"):
        locate_tree(cycle, [{"a": -1}])
    forest = CapacitatedGraph.build([("a", "b", 1)], vertices=["c"])
    with pytest.raises(ValidationError, match="graph is not a tree"):
        locate_tree(forest, [{"a": -1}])


def test_tree_zero_supply_goes_to_root_with_warning(p3):
    with pytest.warns(DegenerateSupplyWarning):
        assert locate_tree(p3, [{}]) == ["a"]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_tree_is_optimal_and_root_independent(seed):
    inst = gen_random_tree(1 + seed % 12, 1 + seed % 3, seed=seed)
    g, S = inst.graph, inst.supplies
    got = lam(g, S, locate_tree(g, S))
    assert got >= oracle_lomuf(g, S).value - 1e-6
    other_root = g.vertices[seed % g.n]
    again = lam(g, S, locate_tree(g, S, root=other_root))
    assert again == got or again == pytest.approx(got, abs=1e-6)


def test_master_examples():
    assert locate_master_source([{"a": -3, "b": -1}]) == ["a"]
    assert locate_master_source([{"b": -1, "a": -1}]) == ["a"]
    assert locate_master_source([{"v": -5}]) == ["v"]
    with pytest.raises(ValidationError):
        locate_master_source([{}])


def test_stats_examples():
    assert locator_stats([{"a": -3, "b": -1}]) == LocatorStats(2, pytest.approx(4 / 3))
    assert locator_stats([{"a": -1}, {"b": -1, "c": -1, "d": -1}]) == LocatorStats(3, 3.0)
    assert locator_stats([{"a": -2}, {"b": -7}]) == LocatorStats(1, 1.0)
    assert locator_stats([{}]).eta == 1.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_stats_bounds(seed):
    inst = gen_random_graph(6, 0.5, 3, seed=seed)
    st_ = locator_stats(inst.supplies)
    assert 1 <= st_.eta <= st_.theta


def test_restricted_examples():
    inst = gen_random_graph(6, 0.5, 2, seed=11)
    g, S = inst.graph, inst.supplies
    got = locate_restricted(g, S, g.vertices)
    assert lam(g, S, got) >= lam(g, S, locate_master_source(S)) - 1e-9
    assert locate_restricted(g, S, [g.vertices[2]]) == [g.vertices[2]] * len(S)
    with pytest.raises(ValidationError):
        locate_restricted(g, S, [])


def test_restricted_star_fixture_reaches_one():
    inst = gen_3partition_star([1] * 6, 2)
    targets = locate_restricted(inst.graph, inst.supplies, inst.candidates)
    assert set(targets) <= set(inst.candidates)
    assert lam(inst.graph, inst.supplies, targets) == pytest.approx(1.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000))
def test_restricted_never_worse_than_its_start(seed):
    inst = gen_random_graph(5, 0.5, 2, seed=seed)
    g, S = inst.graph, inst.supplies
    rng = np.random.default_rng(seed)
    cands = sorted(set(rng.choice(g.vertices, size=3, replace=True)))
    start = locate_restricted(g, S, cands, rounds=0)
    end = locate_restricted(g, S, cands, rounds=2)
    assert set(end) <= set(cands)
    assert lam(g, S, end) >= lam(g, S, start) - 1e-12
