"""Build the hardness fixtures for a tiny 3DM instance and solve them exactly."""

from lomuf import (gen_3dm_dilomuf, gen_3dm_lomuf, gen_3dm_restricted_tree, gen_mis_maxf,
                   oracle_lomuf, oracle_maxf)

X, Y, Z = ["x1", "x2"], ["y1", "y2"], ["z1", "z2"]
cases = {
    "with matching": [("x1", "y1", "z1"), ("x2", "y2", "z2"), ("x1", "y2", "z1")],
    "without": [("x1", "y1", "z1"), ("x2", "y1", "z2"), ("x1", "y2", "z2"), ("x2", "y2", "z1")],
}
for label, W in cases.items():
    und = gen_3dm_lomuf(X, Y, Z, W)
    di = gen_3dm_dilomuf(X, Y, Z, W)
    rt = gen_3dm_restricted_tree(X, Y, Z, W)
    print(f"{label}: matching={und.meta['matching']}")
    print("  undirected      ", round(oracle_lomuf(und.graph, und.supplies).value, 6))
    print("  directed        ", round(oracle_lomuf(di.graph, di.supplies).value, 6))
    print("  restricted tree ", round(oracle_lomuf(rt.graph, rt.supplies, rt.candidates).value, 6))

mis = gen_mis_maxf("abcd", [("a", "b"), ("b", "c"), ("c", "d")])
print("path a-b-c-d: independence number", mis.meta["mis"],
      "| satisfiable commodities", oracle_maxf(mis.graph, mis.supplies).value)
