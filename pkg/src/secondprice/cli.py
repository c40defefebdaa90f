"""Command-line interface.

Subcommands: ``gen`` (instance generators), ``solve`` (offline
algorithms), ``simulate`` (Monte Carlo over online algorithms),
``bridge`` (first-price conversions), ``verify`` (bound-checking suites),
``bench`` (crude timings).  ``verify`` exits nonzero iff any check fails.
"""

from __future__ import annotations

import argparse
import inspect
import json
import sys
import time

from . import verify as verify_mod
from .bridge import (
    RandomConstructionSampler,
    first_price_value,
    normalize_prefix_budget,
    second_price_proxy_bids,
)
from .generators import (
    gen_partition_2paa,
    gen_3sat_2pm,
    gen_chain_instance,
    gen_random_2pm,
    gen_vc_2pm,
    left_k_copy,
    parse_dimacs,
    parse_edge_list,
)
from .graphs import graph_from_instance, instance_from_graph
from .harness import SimulationTask, run_trials
from .model import (
    AuctionError,
    allocation_from_dict,
    ledger_to_dict,
    load_instance,
    save_allocation,
    save_instance,
)
from .offline import (
    brute_force_1paa_opt,
    brute_force_2paa_opt,
    brute_force_2pm_opt,
    reverse_match,
    top_c_allocate,
)
from .rng import Rng
from .stats import Welford


def _emit(doc: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(doc, sort_keys=True, indent=2))
    else:
        for key in sorted(doc):
            print(f"{key:>12}: {doc[key]}")


def _require(value, flag: str, family: str):
    if value is None:
        raise ValueError(f"{flag} is required for '{family}'")
    return value


def _cmd_gen(args: argparse.Namespace) -> int:
    if args.family == "partition":
        weights = [int(w) for w in _require(args.weights, "--weights", "partition").split(",")]
        inst = gen_partition_2paa(weights, args.c)
    elif args.family == "sat3":
        with open(_require(args.cnf, "--cnf", "sat3"), "r", encoding="utf-8") as fh:
            inst = gen_3sat_2pm(parse_dimacs(fh.read()))
    elif args.family == "vc":
        with open(_require(args.graph, "--graph", "vc"), "r", encoding="utf-8") as fh:
            inst, labels = gen_vc_2pm(parse_edge_list(fh.read()))
        if args.labels_out:
            with open(args.labels_out, "w", encoding="utf-8") as fh:
                json.dump(
                    {
                        "vertex_bidder": labels.vertex_bidder,
                        "edge_keyword": {
                            f"{a},{b}": kw
                            for (a, b), kw in labels.edge_keyword.items()
                        },
                    },
                    fh,
                    indent=2,
                    sort_keys=True,
                )
    elif args.family == "chain":
        if args.bits is not None:
            bits = [int(b) for b in args.bits]
        else:
            rng = Rng(args.seed)
            bits = [rng.coin() for _ in range(args.m - 1)]
        inst = gen_chain_instance(args.m, bits).instance
    elif args.family == "random":
        inst = gen_random_2pm(
            args.keywords, args.bidders, args.p, args.seed, planted=args.planted
        )
    elif args.family == "kcopy":
        source = load_instance(_require(args.infile, "--in", "kcopy"))
        copied, _ = left_k_copy(graph_from_instance(source), args.k)
        inst = instance_from_graph(copied)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(args.family)
    save_instance(inst, args.out)
    print(f"wrote {args.out}: {len(inst.keywords)} keywords, {len(inst.bidders)} bidders")
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    inst = load_instance(args.infile)
    if args.alg == "reverse-match":
        allocation, ledger = reverse_match(inst)
    elif args.alg == "top-c":
        allocation, ledger = top_c_allocate(inst, args.c)
    elif args.alg == "bf-2pm":
        allocation, ledger = brute_force_2pm_opt(inst)
    elif args.alg == "bf-2paa":
        allocation, ledger = brute_force_2paa_opt(inst)
    else:  # bf-1paa
        assignment, value = brute_force_1paa_opt(inst)
        total, payments = first_price_value(inst, assignment)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump(
                    {"assignment": assignment, "value": value},
                    fh,
                    indent=2,
                    sort_keys=True,
                )
        print(json.dumps({"prices": payments, "total": total}, sort_keys=True))
        return 0
    if args.out:
        save_allocation(allocation, args.out)
    print(json.dumps(ledger_to_dict(ledger), sort_keys=True))
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    inst = load_instance(args.infile)
    task = SimulationTask(inst, args.alg, random_tie_break=args.random_tie_break)
    stats = run_trials(task, args.trials, args.seed, workers=args.threads)
    doc = stats.to_dict()
    if args.stats:
        with open(args.stats, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    _emit(doc, args.format)
    return 0


def _cmd_bridge(args: argparse.Namespace) -> int:
    inst = load_instance(args.infile)
    if args.action == "proxy":
        save_instance(second_price_proxy_bids(inst), _require(args.out, "--out", "proxy"))
        print(f"wrote {args.out}")
        return 0
    # randcons
    prime = second_price_proxy_bids(inst)
    with open(_require(args.fp, "--fp", "randcons"), "r", encoding="utf-8") as fh:
        decisions = allocation_from_dict(json.load(fh))
    assignment = {
        u: d.first for u, d in zip(inst.keywords, decisions) if not d.is_skip
    }
    fp = normalize_prefix_budget(prime, assignment)
    reference = first_price_value(prime, fp.assignment)[0]
    sampler = RandomConstructionSampler(inst, fp)
    acc = Welford()
    for i in range(args.trials):
        acc.push(float(sampler.sample(args.seed + i)[1].total))
    doc = acc.stats().to_dict()
    doc["first_price_value"] = reference
    doc["eighth"] = reference / 8
    _emit(doc, args.format)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    params = {}
    for override in args.param or ():
        key, _, raw = override.partition("=")
        try:
            value: object = int(raw)
        except ValueError:
            try:
                value = float(raw)
            except ValueError:
                value = raw
        params[key.replace("-", "_")] = value
    run_all = args.suite == "all"
    if not run_all and args.suite not in verify_mod.SUITES:
        print(
            f"unknown suite {args.suite!r}; known: all, {', '.join(verify_mod.SUITES)}",
            file=sys.stderr,
        )
        return 2
    names = list(verify_mod.SUITES) if run_all else [args.suite]
    all_passed = True
    for name in names:
        suite_params = params
        if run_all:
            accepted = inspect.signature(verify_mod.SUITES[name]).parameters
            suite_params = {k: v for k, v in params.items() if k in accepted}
        report = verify_mod.run_suite(name, seed=args.seed, **suite_params)
        all_passed &= report.passed
        if args.format == "json":
            sys.stdout.write(report.to_json())
        else:
            sys.stdout.write(report.to_text())
    return 0 if all_passed else 1


def _cmd_bench(args: argparse.Namespace) -> int:
    rows = []
    inst = gen_random_2pm(100, 100, 0.05, args.seed, planted=True)
    for label, fn in (
        ("reverse-match 100x100", lambda: reverse_match(inst)),
        ("greedy-sim trial", lambda: SimulationTask(inst, "ranking-sim")(args.seed)),
    ):
        start = time.perf_counter()
        fn()
        rows.append((label, time.perf_counter() - start))
    small = gen_random_2pm(6, 6, 0.5, args.seed)
    start = time.perf_counter()
    brute_force_2pm_opt(small)
    rows.append(("bitmask oracle 6x6", time.perf_counter() - start))
    for label, elapsed in rows:
        print(f"{label:>24}: {elapsed * 1000:.2f} ms")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=verify_mod.DEFAULT_SEED)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--format", choices=("json", "text"), default="text")

    parser = argparse.ArgumentParser(
        prog="secondprice",
        description="Second-price keyword allocation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="generate instance files")
    gen.add_argument(
        "family", choices=("partition", "sat3", "vc", "chain", "random", "kcopy")
    )
    gen.add_argument("--weights", help="comma-separated weights (partition)")
    gen.add_argument("--c", type=int, default=1, help="ratio parameter (partition)")
    gen.add_argument("--cnf", help="DIMACS CNF path (sat3)")
    gen.add_argument("--graph", help="edge-list path (vc)")
    gen.add_argument("--labels-out", help="write construction labels (vc)")
    gen.add_argument("--m", type=int, default=10, help="keyword count (chain)")
    gen.add_argument("--bits", help="explicit choice bits, e.g. 0110 (chain)")
    gen.add_argument("--keywords", type=int, default=8)
    gen.add_argument("--bidders", type=int, default=8)
    gen.add_argument("--p", type=float, default=0.4, help="edge probability (random)")
    gen.add_argument("--planted", action="store_true", help="plant a perfect matching")
    gen.add_argument("--in", dest="infile", help="source instance (kcopy)")
    gen.add_argument("--k", type=int, default=2, help="copy count (kcopy)")
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    solve = sub.add_parser("solve", parents=[common], help="run an offline algorithm")
    solve.add_argument(
        "--alg",
        required=True,
        choices=("reverse-match", "top-c", "bf-2pm", "bf-2paa", "bf-1paa"),
    )
    solve.add_argument("--c", type=int, default=1)
    solve.add_argument("--in", dest="infile", required=True)
    solve.add_argument("--out")
    solve.set_defaults(func=_cmd_solve)

    sim = sub.add_parser(
        "simulate", parents=[common], help="Monte Carlo over an online algorithm"
    )
    sim.add_argument(
        "--alg", required=True, choices=("greedy", "ranking", "ranking-sim", "trivial")
    )
    sim.add_argument("--trials", type=int, required=True)
    sim.add_argument("--in", dest="infile", required=True)
    sim.add_argument("--stats", help="write TrialStats JSON here")
    sim.add_argument("--random-tie-break", action="store_true")
    sim.set_defaults(func=_cmd_simulate)

    bridge = sub.add_parser(
        "bridge", parents=[common], help="first-price conversions"
    )
    bridge.add_argument("action", choices=("proxy", "randcons"))
    bridge.add_argument("--in", dest="infile", required=True)
    bridge.add_argument("--out", help="output instance (proxy)")
    bridge.add_argument("--fp", help="first-price allocation file (randcons)")
    bridge.add_argument("--trials", type=int, default=10_000)
    bridge.set_defaults(func=_cmd_bridge)

    ver = sub.add_parser("verify", parents=[common], help="run verification suites")
    ver.add_argument("--suite", default="all")
    ver.add_argument(
        "--param",
        action="append",
        metavar="KEY=VALUE",
        help="suite parameter override (repeatable)",
    )
    ver.set_defaults(func=_cmd_verify)

    bench = sub.add_parser("bench", parents=[common], help="crude timing runs")
    bench.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, AuctionError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
