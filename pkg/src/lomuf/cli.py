"""Command line interface.  Exit codes: 0 success, 2 validation error, 3 budget refusal."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import fixtures
from .bench import FAMILIES, bench_report, rows_to_csv
from .directed import diamond_expand, induced_undirected, locate_symmetric_digraph, locate_symmetric_ditree
from .locators import locate_master_source, locate_restricted, locate_tree
from .mcf import UNBOUNDED, solve_concurrent, solve_total
from .model import Instance, ValidationError, target_demand
from .oracles import (BudgetExceeded, OracleBudget, oracle_lomuf, oracle_maxf, oracle_total,
                      oracle_unsplittable, unsplittable_routing)
from .io import Solution, parse_instance, serialize_instance, serialize_solution, solution_to_dict

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(f"{self.prog}: error: {message}") from None


def _read(path):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _solution_csv(sol: Solution, inst: Instance) -> str:
    doc = solution_to_dict(sol, inst)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["commodity", "target", "lambda", "objective", "solver"])
    for name, t in doc["targets"].items():
        w.writerow([name, "" if t is None else t, doc["lambda"], doc["objective"], doc["solver"]])
    return buf.getvalue()


def _emit_solution(args, sol, inst):
    sol.names = list(inst.names)
    sol.tolerance = args.tolerance
    text = _solution_csv(sol, inst) if args.format == "csv" else serialize_solution(sol, inst)
    _write(args.output, text)


def _concurrent_solution(inst, targets, solver):
    res = solve_concurrent(inst.graph, [target_demand(s, t, inst.graph)
                                        for s, t in zip(inst.supplies, targets)])
    flows = res.witness if res.witness is not None else np.zeros((len(targets), inst.graph.m))
    return Solution(list(targets), res.lam, res.lam, flows, solver)


def _need_instance_json(args):
    if args.format != "json":
        raise ValidationError("this command only writes JSON instances")


# --- subcommands ---------------------------------------------------------------------

def cmd_solve(args):
    inst = parse_instance(_read(args.input))
    g, S = inst.graph, inst.supplies
    if args.algo in ("sym-ditree", "sym-digraph"):
        if not g.directed:
            raise ValidationError("graph is not directed")
        locate = locate_symmetric_ditree if args.algo == "sym-ditree" else locate_symmetric_digraph
        res = locate(g, S)
        sol = Solution(res.targets, res.lam, res.lam, res.flows, args.algo)
        return _emit_solution(args, sol, inst)
    if g.directed:
        raise ValidationError(f"--algo {args.algo} needs an undirected graph")
    if args.algo == "tree":
        targets = locate_tree(g, S)
    elif args.algo == "master":
        targets = locate_master_source(S)
    else:
        if inst.candidates is None:
            raise ValidationError("instance has no candidate set")
        targets = locate_restricted(g, S, inst.candidates, rounds=args.rounds)
    _emit_solution(args, _concurrent_solution(inst, targets, args.algo), inst)


def cmd_mcf(args):
    inst = parse_instance(_read(args.input))
    targets = [t for t in args.targets.split(",") if t] if args.targets else []
    if len(targets) != len(inst.supplies):
        raise ValidationError(f"{len(inst.supplies)} commodities but {len(targets)} targets")
    _emit_solution(args, _concurrent_solution(inst, targets, "mcf"), inst)


def cmd_oracle(args):
    inst = parse_instance(_read(args.input))
    g, S = inst.graph, inst.supplies
    budget = OracleBudget(args.budget, args.max_paths)
    if args.variant == "lomuf":
        res = oracle_lomuf(g, S, inst.candidates, budget)
        sol = _concurrent_solution(inst, res.targets, "oracle-lomuf")
    elif args.variant == "total":
        res = oracle_total(g, S, inst.candidates, budget)
        tot = solve_total(g, S, res.targets)
        lam = min(tot.lambdas) if tot.lambdas else UNBOUNDED
        sol = Solution(res.targets, lam, tot.objective, tot.witness, "oracle-total",
                       lambdas=tot.lambdas)
    elif args.variant == "maxf":
        res = oracle_maxf(g, S, budget, tol=args.tolerance)
        placed = [i for i, t in enumerate(res.targets) if t is not None]
        flows = np.zeros((len(S), g.m))
        lam = UNBOUNDED
        if placed:
            sub = solve_concurrent(g, [target_demand(S[i], res.targets[i]) for i in placed])
            lam = sub.lam
            if sub.witness is not None:
                flows[placed] = sub.witness
        sol = Solution(res.targets, lam, float(res.value), flows, "oracle-maxf")
    else:
        if g.directed:
            raise ValidationError("the unsplittable oracle needs an undirected graph")
        res = oracle_unsplittable(g, S, inst.candidates, budget)
        lam, flows = unsplittable_routing(g, S, res.targets, budget)
        sol = Solution(res.targets, lam, lam, flows, "oracle-unsplittable")
    _emit_solution(args, sol, inst)


def cmd_reduce(args):
    _need_instance_json(args)
    inst = parse_instance(_read(args.input))
    if args.gadget == "diamond":
        graph, _ = diamond_expand(inst.graph)
    else:
        graph = induced_undirected(inst.graph)
    meta = dict(inst.meta, reduction=args.gadget)
    out = Instance(graph, inst.supplies, names=inst.names, candidates=inst.candidates, meta=meta)
    _write(args.output, serialize_instance(out))


def _csv_list(text, name):
    if not text:
        raise ValidationError(f"--{name} is required for this fixture")
    return [x.strip() for x in text.split(",") if x.strip()]


def _triples(text):
    if not text:
        raise ValidationError("--W is required for this fixture")
    out = []
    for part in text.split(";"):
        t = [x.strip() for x in part.split(":")]
        if len(t) != 3:
            raise ValidationError(f"bad triple {part!r}; use x:y:z")
        out.append(tuple(t))
    return out


def _edges(text):
    out = []
    for part in (text or "").split(","):
        if part.strip():
            a, sep, b = part.strip().partition("-")
            if not sep:
                raise ValidationError(f"bad edge {part!r}; use a-b")
            out.append((a, b))
    return out


def cmd_generate(args):
    _need_instance_json(args)
    f = args.fixture
    if f in ("3dm", "3dm-di", "3dm-rtree"):
        gen = {"3dm": fixtures.gen_3dm_lomuf, "3dm-di": fixtures.gen_3dm_dilomuf,
               "3dm-rtree": fixtures.gen_3dm_restricted_tree}[f]
        inst = gen(_csv_list(args.X, "X"), _csv_list(args.Y, "Y"), _csv_list(args.Z, "Z"),
                   _triples(args.W))
    elif f in ("3part-path", "3part-star"):
        try:
            S = [int(x) for x in _csv_list(args.set, "set")]
        except ValueError:
            raise ValidationError("--set must list integers") from None
        gen = fixtures.gen_3partition_dipath if f == "3part-path" else fixtures.gen_3partition_star
        inst = gen(S, args.m)
    elif f == "mis":
        inst = fixtures.gen_mis_maxf(_csv_list(args.vertices, "vertices"), _edges(args.edges))
    elif f == "random-tree":
        inst = fixtures.gen_random_tree(args.n, args.k, args.max_sources,
                                        (args.cap_min, args.cap_max), args.seed)
    else:
        inst = fixtures.gen_random_graph(args.n, args.p, args.k, args.max_sources,
                                         (args.cap_min, args.cap_max), args.seed)
    _write(args.output, serialize_instance(inst))


def cmd_bench(args):
    rows = bench_report(args.trials, args.seed, family=args.family, n_max=args.n_max,
                        k_max=args.k_max, budget=OracleBudget(args.budget))
    if args.format == "csv":
        text = rows_to_csv(rows)
    else:
        text = json.dumps([{k: ("inf" if isinstance(v, float) and math.isinf(v) else v)
                            for k, v in r.items()} for r in rows], indent=2) + "\n"
    _write(args.csv, text)


# --- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=argparse.SUPPRESS,
                        help="satisfaction tolerance (default 1e-6)")
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS,
                        help="output format (default json; csv for bench)")

    p = _Parser(prog="lomuf", description="Target location for multi-commodity flow.",
                parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def io_args(sp, output=True):
        sp.add_argument("-i", "--input", default="-", help="instance file ('-' for stdin)")
        if output:
            sp.add_argument("-o", "--output", default="-", help="output file ('-' for stdout)")

    sp = sub.add_parser("solve", parents=[common], help="run a locator and solve the flow LP")
    sp.add_argument("--algo", required=True,
                    choices=("tree", "master", "sym-ditree", "sym-digraph", "restricted"))
    sp.add_argument("--rounds", type=int, default=2, help="sweeps for --algo restricted")
    io_args(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("mcf", parents=[common], help="concurrent flow for fixed targets")
    sp.add_argument("--targets", required=True, help="comma separated, one per commodity")
    io_args(sp)
    sp.set_defaults(func=cmd_mcf)

    sp = sub.add_parser("oracle", parents=[common], help="exhaustive search")
    sp.add_argument("--variant", required=True, choices=("lomuf", "total", "maxf", "unsplittable"))
    sp.add_argument("--budget", type=int, default=OracleBudget.max_lp_calls,
                    help="maximum number of target tuples to evaluate")
    sp.add_argument("--max-paths", type=int, default=OracleBudget.max_paths)
    io_args(sp)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("reduce", parents=[common], help="graph transformations")
    sp.add_argument("--gadget", required=True, choices=("diamond", "induced"))
    io_args(sp)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("generate", parents=[common], help="write a fixture instance")
    sp.add_argument("--fixture", required=True,
                    choices=("3dm", "3dm-di", "3part-path", "3dm-rtree", "3part-star", "mis",
                             "random-tree", "random-graph"))
    sp.add_argument("--X"), sp.add_argument("--Y"), sp.add_argument("--Z")
    sp.add_argument("--W", help="triples as x:y:z;x:y:z")
    sp.add_argument("--set", help="numbers for the 3-partition fixtures, comma separated")
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--vertices", help="vertices of the MIS source graph")
    sp.add_argument("--edges", help="edges of the MIS source graph as a-b,b-c")
    sp.add_argument("--n", type=int, default=6)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--p", type=float, default=0.4)
    sp.add_argument("--max-sources", type=int, default=4)
    sp.add_argument("--cap-min", type=int, default=1)
    sp.add_argument("--cap-max", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("bench", parents=[common], help="oracle against locators on random instances")
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--family", choices=FAMILIES, default="graph")
    sp.add_argument("--n-max", type=int, default=7)
    sp.add_argument("--k-max", type=int, default=2)
    sp.add_argument("--budget", type=int, default=OracleBudget.max_lp_calls)
    sp.add_argument("--csv", default="-", help="output file ('-' for stdout)")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return EXIT_INVALID
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    args.tolerance = getattr(args, "tolerance", 1e-6)
    args.format = getattr(args, "format", "csv" if args.command == "bench" else "json")
    try:
        args.func(args)
    except BudgetExceeded as exc:
        print(f"lomuf: refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValidationError, ValueError) as exc:
        print(f"lomuf: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
