"""Command-line entry point: ``cogarith {learn,solve,experiment}``."""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .activation import heatmap_csv
from .errors import CogArithError
from .experiments import (
    ExperimentConfig,
    SweepSpec,
    build_library,
    learn,
    run_ablation,
    run_problem_size,
    run_strategy,
    write_manifest,
    _write,
)
from .facts import ablate, default_ablation_mask, load_csv, save_csv
from .parser import Operator, parse_problem
from .solver import CostParams, StrategyPolicy, format_trace, solve, trace_csv


def _global_flags(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    g = p.add_argument_group("simulation parameters")
    g.add_argument("--seed", type=int, default=d(0))
    g.add_argument("--trials", type=int, default=d(10_000))
    g.add_argument("--learning-factor", type=float, default=d(0.5))
    g.add_argument("--rt-min-ms", type=float, default=d(700.0))
    g.add_argument("--rt-max-ms", type=float, default=d(1400.0))
    g.add_argument("--count-ms", type=float, default=d(CostParams.count_step_ms))
    g.add_argument("--carry-ms", type=float, default=d(CostParams.carry_ms))
    g.add_argument("--threshold", type=int, default=d(StrategyPolicy.fast_addition_threshold),
                   help="Fast Addition distance limit")
    g.add_argument("--out", type=Path, default=d(Path("out")), help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cogarith",
        description="Simulate mental arithmetic and its response times.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="write activation and RT matrices and the fact library")
    _global_flags(p, suppress=True)

    p = sub.add_parser("solve", help="solve one problem, e.g. \"497 + 38\"")
    _global_flags(p, suppress=True)
    p.add_argument("expr")
    p.add_argument("--trace", action="store_true", help="print the step table")
    p.add_argument("--csv", action="store_true", help="print the trace as CSV")
    p.add_argument("--ablate-default", action="store_true",
                   help="forget additions with both operands in 5..9")
    p.add_argument("--no-strategies", action="store_true")
    p.add_argument("--facts", type=Path, help="load the fact library from CSV")

    p = sub.add_parser("experiment", help="reproduce one experiment")
    _global_flags(p, suppress=True)
    p.add_argument("name", choices=["problem-size", "ablation", "strategy"])
    p.add_argument("--n-start", type=int, default=SweepSpec.n_start)
    p.add_argument("--n-end", type=int, default=SweepSpec.n_end)
    p.add_argument("--addend", type=int, default=SweepSpec.addend)
    return parser


def config_from_args(args) -> ExperimentConfig:
    costs = CostParams(count_step_ms=args.count_ms, carry_ms=args.carry_ms)
    strategies = not getattr(args, "no_strategies", False)
    policy = StrategyPolicy(fast_addition=strategies, divide_by_5=strategies,
                            fast_addition_threshold=args.threshold)
    return ExperimentConfig(args.seed, args.trials, args.learning_factor,
                            args.rt_min_ms, args.rt_max_ms, costs, policy, args.out)


def _learn(config):
    learned = learn(config)
    out = Path(config.output_dir)
    written = []
    for op, lo in learned.items():
        written.append(_write(out / f"activation_{op.slug}.csv", heatmap_csv(lo.activation.cells)))
        written.append(_write(out / f"rt_normalized_{op.slug}.csv", heatmap_csv(lo.normalized.cells)))
        written.append(_write(out / f"rt_ms_{op.slug}.csv", heatmap_csv(lo.ms.cells)))
    written.append(save_csv(build_library(config, learned), out / "facts.csv"))
    write_manifest(config, "learn", written)
    for p in written:
        print(p)


def _solve(args, config):
    problem = parse_problem(args.expr)
    library = load_csv(args.facts) if args.facts else build_library(config)
    if args.ablate_default:
        library = ablate(library, default_ablation_mask())
    trace = solve(problem, library, config.policy, config.costs)
    if problem.op is Operator.DIV and trace.remainder:
        print(f"{problem} = {trace.value} remainder {trace.remainder}")
    else:
        print(f"{problem} = {trace.value}")
    print(f"response time: {trace.total_rt_ms:.3f} ms ({trace.plan} plan)")
    if args.csv:
        sys.stdout.write(trace_csv(trace))
    elif args.trace:
        print(format_trace(trace))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        if args.command == "learn":
            _learn(config)
        elif args.command == "solve":
            _solve(args, config)
        elif args.name == "problem-size":
            print(run_problem_size(config))
        elif args.name == "ablation":
            for p in run_ablation(config):
                print(p)
        else:
            sweep = SweepSpec(args.n_start, args.n_end, args.addend)
            print(run_strategy(config, sweep))
    except CogArithError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
