"""Benchmark harness: oracle optimum against the tree and master-source locators."""

from __future__ import annotations

import csv
import io
import math

import numpy as np

from .fixtures import gen_random_graph, gen_random_tree
from .locators import locate_master_source, locate_tree, locator_stats
from .mcf import concurrent_value, demand_matrix
from .model import target_demand
from .oracles import BudgetExceeded, OracleBudget, oracle_lomuf

COLUMNS = ["id", "n", "k", "theta", "eta", "lambda_oracle", "lambda_tree", "lambda_master", "ratio"]
FAMILIES = ("tree", "graph", "bisource")


def ratio(opt: float, got: float) -> float:
    """``opt / got`` with 0/0 and inf/inf read as 1 and x/0 as infinity."""
    if opt == got:
        return 1.0
    if got == 0 or math.isinf(opt):
        return math.inf
    return opt / got


def _value(graph, supplies, targets):
    return concurrent_value(graph, demand_matrix(graph, [target_demand(s, t)
                                                         for s, t in zip(supplies, targets)]))


def bench_report(trials: int, seed: int, family: str = "graph", n_max: int = 7, k_max: int = 2,
                 p: float = 0.4, budget: OracleBudget | None = None) -> list[dict]:
    """One row per random trial.

    ``ratio`` compares the oracle with the family's algorithm: the tree
    algorithm on trees, the master source otherwise.  Trials the oracle
    refuses are kept with ``"skipped"`` in the value columns.
    """
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}")
    budget = budget or OracleBudget()
    rng = np.random.Generator(np.random.PCG64(seed))
    rows = []
    for t in range(trials):
        n = int(rng.integers(2, n_max + 1))
        k = int(rng.integers(1, k_max + 1))
        sub = int(rng.integers(0, 2**31))
        if family == "tree":
            inst = gen_random_tree(n, k, seed=sub)
        else:
            inst = gen_random_graph(n, p, k, max_sources=2 if family == "bisource" else 4, seed=sub)
        g, S = inst.graph, inst.supplies
        stats = locator_stats(S)
        row = {"id": f"{family}-{seed}-{t}", "n": n, "k": k, "theta": stats.theta,
               "eta": round(stats.eta, 12)}
        try:
            opt = oracle_lomuf(g, S, budget=budget).value
        except BudgetExceeded:
            row.update(lambda_oracle="skipped", lambda_tree="skipped",
                       lambda_master="skipped", ratio="skipped")
            rows.append(row)
            continue
        master = _value(g, S, locate_master_source(S))
        tree = _value(g, S, locate_tree(g, S)) if g.is_tree() else None
        row.update(lambda_oracle=opt, lambda_tree="" if tree is None else tree,
                   lambda_master=master, ratio=ratio(opt, tree if family == "tree" else master))
        rows.append(row)
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(row[k]) for k in COLUMNS})
    return buf.getvalue()


def _fmt(x):
    if isinstance(x, float):
        return "inf" if math.isinf(x) else repr(x)
    return x
