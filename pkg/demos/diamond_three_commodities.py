"""Where the diamond gadget stops being value preserving.

Three identical commodities on the path x - u - v - y, with a thin middle
edge.  On the original graph every commodity has to push half a unit
across u - v, so the best value is 2/3.  After the expansion, two
commodities can cross the middle gadget in opposite directions while the
third one parks its target inside the gadget, and the value reaches 1.
Pulling that flow back overloads u - v, and the pullback says so.
"""

from lomuf import (CapacitatedGraph, ValidationError, diamond_expand, diamond_pullback,
                   oracle_lomuf, solve_concurrent, target_demand)

g = CapacitatedGraph.build([("x", "u", 10), ("u", "v", 1), ("v", "y", 10)])
S = [{"x": -0.5, "y": -0.5}] * 3
print("best value on the path:", round(oracle_lomuf(g, S).value, 6))

H, dmap = diamond_expand(g)
s_mid = dmap.gadgets[1][0]
targets = ["x", "y", s_mid]
res = solve_concurrent(H, [target_demand(s, t) for s, t in zip(S, targets)])
print(f"targets {targets} on the expansion:", round(res.lam, 6))

try:
    diamond_pullback(dmap, targets, res.witness, S, scale=res.lam)
except ValidationError as exc:
    print("pullback refused:", exc)
