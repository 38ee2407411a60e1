import csv
import io
import json
import math

import numpy as np
import pytest

from lomuf import (OracleBudget, Solution, ValidationError, bench_report, gen_3dm_restricted_tree,
                   gen_random_graph, gen_random_symmetric_digraph, gen_random_tree,
                   parse_instance, parse_solution, serialize_instance,
                   serialize_solution, validate_solution)
from lomuf.bench import rows_to_csv
from lomuf.cli import main

MINIMAL = {"graph": {"directed": False, "vertices": ["a", "b"],
                     "edges": [{"u": "a", "v": "b", "cap": 1}]},
           "commodities": [{"name": "d1", "supply": {"a": -1}}]}


def doc(**changes):
    out = json.loads(json.dumps(MINIMAL))
    out.update(changes)
    return json.dumps(out)


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# --- parsing and serialization ------------------------------------------------------

def test_parse_minimal():
    inst = parse_instance(json.dumps(MINIMAL))
    assert inst.graph.vertices == ("a", "b") and inst.names == ["d1"]
    assert inst.supplies == [{"a": -1.0}] and inst.candidates is None


def test_parse_errors():
    bad = json.loads(json.dumps(MINIMAL))
    bad["commodities"][0]["supply"]["b"] = 2
    with pytest.raises(ValidationError, match="commodity 'd1'.*positive"):
        parse_instance(json.dumps(bad))
    bad = json.loads(json.dumps(MINIMAL))
    bad["graph"]["edges"].append({"u": "b", "v": "a", "cap": 1})
    with pytest.raises(ValidationError, match="graph: duplicate edge"):
        parse_instance(json.dumps(bad))
    with pytest.raises(ValidationError, match="unknown keys"):
        parse_instance(doc(extra=1))
    with pytest.raises(ValidationError, match="line 2"):
        parse_instance('{"graph":\n  ]')
    bad = json.loads(json.dumps(MINIMAL))
    bad["graph"]["edges"][0]["cap"] = "big"
    with pytest.raises(ValidationError, match=r"graph.edges\[0\].cap"):
        parse_instance(json.dumps(bad))


@pytest.mark.parametrize("inst", [gen_random_graph(6, 0.5, 3, seed=1),
                                  gen_random_symmetric_digraph(5, 2, seed=2),
                                  gen_3dm_restricted_tree(["x"], ["y"], ["z"], [("x", "y", "z")])])
def test_instance_round_trip(inst):
    again = parse_instance(serialize_instance(inst))
    assert again.graph == inst.graph and again.supplies == inst.supplies
    assert again.names == inst.names and again.candidates == inst.candidates
    assert again.meta == inst.meta


def test_solution_round_trip():
    inst = gen_random_graph(5, 0.5, 2, seed=3)
    flows = np.zeros((2, inst.graph.m))
    flows[0, 0], flows[1, -1] = 0.25, -1.5
    for lam in (0.5, math.inf):
        sol = Solution(["v00", "v01"], lam, lam, flows, "test", names=list(inst.names))
        assert parse_solution(serialize_solution(sol, inst), inst) == sol
    sol = Solution(["v00", None], 1.0, 3.0, flows, "test", lambdas=[1.0, 0.0], names=list(inst.names))
    assert parse_solution(serialize_solution(sol, inst), inst) == sol
    assert json.loads(serialize_solution(sol, inst))["targets"] == {"d1": "v00", "d2": None}


def test_solution_parse_errors():
    inst = parse_instance(json.dumps(MINIMAL))
    base = {"targets": {"d1": "b"}, "lambda": 1, "objective": 1, "flows": [],
            "solver": "x", "tolerance": 1e-6}
    for change in ({"targets": {"zz": "b"}}, {"targets": {"d1": "q"}},
                   {"flows": [{"commodity": "d1", "edge": {"u": "b", "v": "a"}, "value": 1}]},
                   {"lambda": "lots"}, {"extra": 0}):
        with pytest.raises(ValidationError):
            parse_solution(json.dumps({**base, **change}), inst)


# --- command line ----------------------------------------------------------------------

@pytest.fixture
def files(tmp_path):
    def write(name, inst):
        path = tmp_path / name
        path.write_text(serialize_instance(inst))
        return str(path)
    return write


def check_output(text, path):
    inst = parse_instance(open(path).read())
    sol = parse_solution(text, inst)
    assert validate_solution(inst, sol)
    return sol


@pytest.mark.parametrize("argv,inst", [
    (["solve", "--algo", "tree"], gen_random_tree(7, 2, seed=4)),
    (["solve", "--algo", "master"], gen_random_graph(7, 0.4, 2, seed=4)),
    (["solve", "--algo", "restricted"], gen_3dm_restricted_tree(["x"], ["y"], ["z"], [("x", "y", "z")])),
    (["solve", "--algo", "sym-ditree"], gen_random_symmetric_digraph(6, 2, tree=True, seed=4)),
    (["solve", "--algo", "sym-digraph"], gen_random_symmetric_digraph(6, 2, seed=4)),
    (["mcf", "--targets", "v00,v01"], gen_random_graph(5, 0.4, 2, seed=5)),
    (["oracle", "--variant", "lomuf"], gen_random_graph(5, 0.4, 2, seed=6)),
    (["oracle", "--variant", "total"], gen_random_graph(5, 0.4, 2, seed=6)),
    (["oracle", "--variant", "maxf"], gen_random_graph(5, 0.4, 3, seed=6)),
    (["oracle", "--variant", "unsplittable"], gen_random_tree(5, 2, seed=6)),
])
def test_every_solver_writes_a_valid_solution(capsys, files, argv, inst):
    path = files("in.json", inst)
    code, out, err = run(capsys, *argv, "-i", path)
    assert code == 0, err
    check_output(out, path)


def test_exit_codes(capsys, files):
    cyc = files("cyc.json", gen_random_graph(6, 1.0, 1, seed=0))
    code, _, err = run(capsys, "solve", "--algo", "tree", "-i", cyc)
    assert code == 2 and "graph is not a tree" in err
    big = files("big.json", gen_random_graph(10, 0.3, 6, seed=0))
    code, _, err = run(capsys, "oracle", "--variant", "lomuf", "--budget", "10", "-i", big)
    assert code == 3 and "refused" in err
    code, _, _ = run(capsys, "solve", "--algo", "nope", "-i", cyc)
    assert code == 2
    code, _, _ = run(capsys, "bench", "--no-such-flag")
    assert code == 2
    code, _, err = run(capsys, "solve", "--algo", "tree", "-i", "/does/not/exist")
    assert code == 2 and "cannot read" in err


def test_generate_then_oracle_pipe(capsys, monkeypatch):
    code, inst_text, _ = run(capsys, "generate", "--fixture", "3part-path", "--set", "1,1,1,1,1,1",
                             "--m", "2")
    assert code == 0
    code, out, _ = run(capsys, "oracle", "--variant", "lomuf", stdin=inst_text, monkeypatch=monkeypatch)
    assert code == 0
    sol = parse_solution(out, parse_instance(inst_text))
    assert sol.lam >= 1 - 1e-6


def test_generate_fixtures(capsys):
    for argv in (["--fixture", "3dm", "--X", "x", "--Y", "y", "--Z", "z", "--W", "x:y:z"],
                 ["--fixture", "mis", "--vertices", "a,b,c", "--edges", "a-b,b-c"],
                 ["--fixture", "random-tree", "--n", "5", "--seed", "3"]):
        code, out, err = run(capsys, "generate", *argv)
        assert code == 0, err
        parse_instance(out)
    code, _, err = run(capsys, "generate", "--fixture", "3dm", "--X", "x")
    assert code == 2 and "--Y" in err


def test_reduce_and_global_flags(capsys, files):
    path = files("g.json", gen_random_graph(4, 0.5, 1, seed=2))
    code, out, _ = run(capsys, "reduce", "--gadget", "diamond", "-i", path)
    expanded = parse_instance(out)
    assert code == 0 and expanded.graph.directed and expanded.meta["reduction"] == "diamond"
    code, out, _ = run(capsys, "--format", "csv", "solve", "--algo", "master", "-i", path)
    assert code == 0 and out.startswith("commodity,target,lambda")
    code, out, _ = run(capsys, "solve", "--tolerance", "1e-3", "--algo", "master", "-i", path)
    assert json.loads(out)["tolerance"] == 1e-3


# --- bench ---------------------------------------------------------------------------

def numeric_rows(rows):
    return [r for r in rows if r["ratio"] != "skipped"]


def test_bench_is_deterministic(capsys):
    assert bench_report(5, 7) == bench_report(5, 7)
    code, out, _ = run(capsys, "bench", "--trials", "3", "--seed", "7")
    assert code == 0
    header, *rows = list(csv.reader(io.StringIO(out)))
    assert header == ["id", "n", "k", "theta", "eta", "lambda_oracle", "lambda_tree",
                      "lambda_master", "ratio"] and len(rows) == 3
    assert out == rows_to_csv(bench_report(3, 7))


def test_bench_ratio_bounds():
    for r in numeric_rows(bench_report(15, 1, family="tree")):
        assert r["ratio"] <= 1 + 1e-6
    for r in numeric_rows(bench_report(15, 2, family="bisource")):
        assert r["ratio"] <= 1 + 1e-6
    for r in numeric_rows(bench_report(15, 3, family="graph")):
        assert r["ratio"] <= max(r["theta"] - 1, 1) + 1e-6


def test_bench_keeps_refused_trials():
    rows = bench_report(4, 0, n_max=7, k_max=3, budget=OracleBudget(max_lp_calls=1))
    assert len(rows) == 4 and all(r["ratio"] == "skipped" for r in rows)
    with pytest.raises(ValueError):
        bench_report(1, 0, family="nope")
