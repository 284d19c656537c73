"""Command-line entry point for the benchmark harness."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import bench
from .problems import KINDS, generate_instance


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--problem", choices=KINDS, help="test problem kind")
    parser.add_argument("--n", type=int, help="continuous dimension")
    parser.add_argument("--m", type=int, help="binary dimension")
    parser.add_argument("--alpha", type=float, action="append", help="interaction strength (repeatable)")
    parser.add_argument(
        "--algo", choices=bench.ALGORITHMS, action="append", help="algorithm variant (repeatable)"
    )
    parser.add_argument("--trials", type=int, help="trials per (alpha, algorithm) cell")
    parser.add_argument("--budget", type=int, help="evaluation budget per run")
    parser.add_argument("--target", type=float, help="objective value counted as success")
    parser.add_argument("--t-freeze", dest="t_freeze", help="warm-start policy, adaptive:A or fixed:T")
    parser.add_argument("--seed", type=int, help="base seed of the suite")
    parser.add_argument("--traj", action="store_const", const=True, help="record best-so-far trajectories")
    parser.add_argument("--workers", type=int, help="parallel worker processes across trials")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--config", help="JSON config file; flags override its values")


def _overrides(args: argparse.Namespace) -> dict:
    return {
        "problem": args.problem,
        "n": args.n,
        "m": args.m,
        "alpha": args.alpha,
        "algo": args.algo,
        "trials": args.trials,
        "budget": args.budget,
        "target": args.target,
        "t_freeze": bench.WarmStartConfig.parse(args.t_freeze) if args.t_freeze else None,
        "seed": args.seed,
        "traj": args.traj,
        "workers": args.workers,
        "out": args.out,
    }


def _print_table(rows: list[dict]) -> None:
    for row in rows:
        median = row["median_evals"]
        print(
            f"{row['problem']:>7} alpha={row['alpha']:<6g} {row['algorithm']:<8}"
            f" trials={row['trials']:<4d} success_rate={row['success_rate']:.2f}"
            + (f" median_evals={median:.0f}" if median is not None else "")
        )


def cmd_run(args: argparse.Namespace) -> int:
    config = bench.parse_config(args.config, _overrides(args))
    total = len(config.alphas) * config.trials

    def progress(done: int, _total: int) -> None:
        print(f"\r{done}/{total} trials done", end="", file=sys.stderr, flush=True)

    records = bench.run_suite(config, progress=progress)
    print(file=sys.stderr)
    table = bench.aggregate(records)
    bench.write_results(records, table, config.out)
    bench.write_config_echo(config, config.out)
    _print_table(table)
    print(f"wrote {len(records)} records to {config.out}/runs.csv")
    return 0


def cmd_one(args: argparse.Namespace) -> int:
    overrides = _overrides(args)
    if overrides["trials"] is None:
        overrides["trials"] = 1
    config = bench.parse_config(args.config, overrides)
    if len(config.alphas) != 1 or len(config.algorithms) != 1:
        raise SystemExit("'one' expects exactly one --alpha and one --algo")
    alpha, algorithm = config.alphas[0], config.algorithms[0]
    instance_seed = bench.stable_seed(config.seed, config.problem, repr(float(alpha)), 0)
    instance = generate_instance(config.problem, config.n, config.m, alpha, instance_seed)
    record = bench.run_single(algorithm, instance, config, bench.stable_seed(instance_seed, algorithm))
    payload = dataclasses.asdict(record)
    trajectory = payload.pop("trajectory")
    if trajectory is not None:
        payload["trajectory_points"] = len(trajectory[0])
    print(json.dumps(payload, indent=2))
    return 0


def cmd_aggregate(args: argparse.Namespace) -> int:
    records = bench.read_runs_csv(f"{args.in_dir}/runs.csv")
    table = bench.aggregate(records)
    bench.write_table(table, args.out or f"{args.in_dir}/table.csv")
    _print_table(table)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="icatcma", description="Mixed binary-continuous optimization benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run a full suite and write CSV artifacts")
    _add_common_flags(run_parser)
    run_parser.set_defaults(func=cmd_run)

    one_parser = sub.add_parser("one", help="run a single trial and print its record")
    _add_common_flags(one_parser)
    one_parser.set_defaults(func=cmd_one)

    agg_parser = sub.add_parser("aggregate", help="recompute table.csv from an existing runs.csv")
    agg_parser.add_argument("--in", dest="in_dir", required=True, help="directory containing runs.csv")
    agg_parser.add_argument("--out", help="table output path (default: <in>/table.csv)")
    agg_parser.set_defaults(func=cmd_aggregate)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
