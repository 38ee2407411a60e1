"""Place targets on a random tree and compare with exhaustive search.

    python3 demos/tree_locator.py [seed]
"""

import sys

from lomuf import gen_random_tree, locate_master_source, locate_tree, oracle_lomuf, solve_concurrent, target_demand


def value(graph, supplies, targets):
    return solve_concurrent(graph, [target_demand(s, t) for s, t in zip(supplies, targets)]).lam


seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
inst = gen_random_tree(9, 3, seed=seed)
g, S = inst.graph, inst.supplies

print("edges:")
for u, v, cap in g.edges:
    print(f"  {u} - {v}  cap {cap:g}")
for name, s in zip(inst.names, S):
    print(f"{name}: " + ", ".join(f"{v}:{x:g}" for v, x in s.items()))

tree = locate_tree(g, S)
master = locate_master_source(S)
best = oracle_lomuf(g, S)
print(f"tree locator   {tree}  lambda = {value(g, S, tree):.6g}")
print(f"master source  {master}  lambda = {value(g, S, master):.6g}")
print(f"oracle         {best.targets}  lambda = {best.value:.6g}")
