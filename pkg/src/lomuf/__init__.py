"""Target location for multi-commodity flow on capacitated networks."""

import sys

from .bench import bench_report
from .directed import (DiamondMap, SymmetricResult, diamond_expand, diamond_pullback, diamond_push,
                       induced_undirected, is_symmetric, lift_halved, locate_symmetric_digraph,
                       locate_symmetric_ditree, merge_twins)
from .fixtures import (FixtureInstance, gen_3dm_dilomuf, gen_3dm_lomuf, gen_3dm_restricted_tree,
                       gen_3partition_dipath, gen_3partition_star, gen_mis_maxf, gen_random_graph,
                       gen_random_symmetric_digraph, gen_random_tree)
from .io import (Solution, parse_instance, parse_solution, serialize_instance,
                 serialize_solution, validate_solution)
from .locators import (DegenerateSupplyWarning, LocatorStats, locate_master_source,
                       locate_restricted, locate_tree, locator_stats)
from .mcf import (UNBOUNDED, ConcurrentResult, TotalResult, check_feasible, solve_concurrent,
                  solve_total)
from .model import (CapacitatedGraph, Edge, Instance, ValidationError, Verdict, cancel_circulations,
                    cut_balance, cut_edges, decompose_single_target, target_demand,
                    validate_multiflow)
from .oracles import (BudgetExceeded, OracleBudget, OracleResult, brute_equipartition, brute_mis,
                      brute_perfect_matching, greedy_maxf, oracle_lomuf, oracle_maxf,
                      oracle_reaches, oracle_total, oracle_unsplittable, unsplittable_lambda,
                      unsplittable_routing)

__all__ = sorted(name for name, obj in globals().items()
                 if not name.startswith("_") and not isinstance(obj, type(sys)))
