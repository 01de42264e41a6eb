"""Command line entry point: ``sparsecut <command> ...``."""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from .experiment import SOLVERS, reports_to_csv, run_pipeline, sweep_q
from .graph import GENERATOR_KINDS, generate_instance, load_instance, save_instance
from .qubo import compile_qubo, read_triplets
from .remote import VALUE_FORMATS, RemoteError, serve, submit
from .resistance import PROB_RULES, dump_csv, effective_resistances
from .solvers import DEFAULT_BUDGET_ITERS, solve_exact, solve_tabu
from .sparsifier import Q_RULES, SparsifyConfig, config_q, sparsify


def _parse_gen(text: str):
    try:
        kind, n, density = text.split(",")
        return kind, int(n), float(density)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected KIND,N,DENSITY, got {text!r}") from None


def _write(text: str, path) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _sparsify_config(args) -> SparsifyConfig:
    return SparsifyConfig(q=args.q, epsilon=args.epsilon, seed=args.seed, q_rule=args.q_rule)


def cmd_generate(args):
    g = generate_instance(args.kind, args.n, args.density, args.weight_range, args.seed)
    save_instance(g, args.out, comment=f"{args.kind} n={args.n} density={args.density} seed={args.seed}")
    print(f"{g.node_count},{g.edge_count}")


def cmd_resistances(args):
    g = load_instance(args.instance)
    _write(dump_csv(g, effective_resistances(g, args.prob_rule)), args.out)


def cmd_sparsify(args):
    g = load_instance(args.instance)
    cfg = _sparsify_config(args)
    sparse = sparsify(g, effective_resistances(g, args.prob_rule), cfg)
    if args.out:
        save_instance(sparse, args.out, comment=f"sparsified q={config_q(cfg, g)} seed={args.seed}")
    red = 1.0 - sparse.edge_count / g.edge_count
    print("m,sparse_edges,reduction")
    print(f"{g.edge_count},{sparse.edge_count},{red!r}")


def cmd_solve(args):
    if args.triplets:
        q = read_triplets(args.instance)
    else:
        q = compile_qubo(load_instance(args.instance))
    if args.solver == "exact":
        res = solve_exact(q)
        name, obj, elapsed, bits = res.solver_name, res.objective, res.elapsed, res.bitstring()
    elif args.solver == "tabu":
        res = solve_tabu(q, args.budget_iters, args.budget_secs, args.seed)
        name, obj, elapsed, bits = res.solver_name, res.objective, res.elapsed, res.bitstring()
    else:
        if not args.server:
            raise SystemExit("--solver remote needs --server HOST:PORT")
        t0 = time.perf_counter()
        rep = submit(args.server, q, args.budget_iters or DEFAULT_BUDGET_ITERS,
                     value_format=args.value_format)
        name, obj, elapsed, bits = "remote", rep.server_objective, time.perf_counter() - t0, rep.bitstring()
        print(f"request_bytes: {rep.request_bytes}")
        print(f"response_bytes: {rep.response_bytes}")
    print(f"solver: {name}")
    print(f"objective: {obj!r}")
    print(f"elapsed: {elapsed:.6f}")
    print(f"assignment: {bits}")


def cmd_serve(args):
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    serve(args.address, args.solver, args.seed, default_budget=args.budget_iters)


def cmd_experiment(args):
    if args.instance:
        g = load_instance(args.instance)
        dataset = Path(args.instance).name
    else:
        kind, n, density = args.gen
        g = generate_instance(kind, n, density, args.weight_range, args.gen_seed)
        dataset = f"{kind}_n{n}_d{density}_s{args.gen_seed}"
    common = dict(solver=args.solver, trials=args.trials, budget_iters=args.budget_iters,
                  server=args.server, dataset=dataset, prob_rule=args.prob_rule,
                  value_format=args.value_format)
    if args.q_values:
        q_values = [int(v) for v in args.q_values.split(",")]
        reports = sweep_q(g, q_values, seed=args.seed, **common)
    else:
        reports = [run_pipeline(g, _sparsify_config(args), **common)]
    _write(reports_to_csv(reports), args.csv)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sparsecut", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def sparsify_opts(sp):
        sp.add_argument("--q-rule", choices=Q_RULES, default="five_n")
        sp.add_argument("--q", type=int, default=None, help="draw count for --q-rule explicit")
        sp.add_argument("--epsilon", type=float, default=0.1)
        sp.add_argument("--prob-rule", choices=PROB_RULES, default="resistance")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("generate", help="write a random instance file")
    sp.add_argument("kind", choices=GENERATOR_KINDS)
    sp.add_argument("n", type=int)
    sp.add_argument("density", type=float)
    sp.add_argument("--weight-range", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("resistances", help="dump per-edge effective resistances as CSV")
    sp.add_argument("instance")
    sp.add_argument("--prob-rule", choices=PROB_RULES, default="resistance")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_resistances)

    sp = sub.add_parser("sparsify", help="sparsify an instance file")
    sp.add_argument("instance")
    sparsify_opts(sp)
    sp.add_argument("--out", default=None, help="write the sparsified instance here")
    sp.set_defaults(func=cmd_sparsify)

    sp = sub.add_parser("solve", help="solve the maxcut QUBO of an instance")
    sp.add_argument("instance")
    sp.add_argument("--triplets", action="store_true", help="input is a raw triplet file")
    sp.add_argument("--solver", choices=SOLVERS, default="tabu")
    sp.add_argument("--budget-iters", type=int, default=None)
    sp.add_argument("--budget-secs", type=float, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--server", default=None)
    sp.add_argument("--value-format", choices=VALUE_FORMATS, default="fixed")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("serve", help="run the mock QUBO solver service")
    sp.add_argument("--address", default="127.0.0.1:7878")
    sp.add_argument("--solver", choices=("exact", "tabu"), default="tabu")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget-iters", type=int, default=DEFAULT_BUDGET_ITERS,
                    help="used when a request asks for 0 iterations")
    sp.set_defaults(func=cmd_serve)

    sp = sub.add_parser("experiment", help="run the sparsify-then-solve pipeline")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--instance")
    src.add_argument("--gen", type=_parse_gen, metavar="KIND,N,DENSITY")
    sp.add_argument("--weight-range", type=int, default=100)
    sp.add_argument("--gen-seed", type=int, default=0)
    sparsify_opts(sp)
    sp.add_argument("--q-values", default=None, help="comma-separated ascending q sweep")
    sp.add_argument("--trials", type=int, default=10)
    sp.add_argument("--solver", choices=SOLVERS, default="tabu")
    sp.add_argument("--budget-iters", type=int, default=DEFAULT_BUDGET_ITERS)
    sp.add_argument("--server", default=None)
    sp.add_argument("--value-format", choices=VALUE_FORMATS, default="fixed")
    sp.add_argument("--csv", default=None, help="output path (default stdout)")
    sp.set_defaults(func=cmd_experiment)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, ArithmeticError, RemoteError, OSError) as exc:
        print(f"sparsecut {args.command}: error: {exc}", file=sys.stderr)
        raise SystemExit(2) from None


if __name__ == "__main__":
    main()
