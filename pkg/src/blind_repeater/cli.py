"""Command-line entry point (``blind-repeater``)."""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict

from .chain import ChainConfig, build_schedule
from .css import load_code
from .harness import emit_report, enumerate_bounded, load_config, monte_carlo, resource_count


def _validate_code(args) -> int:
    code = load_code(args.codefile)
    print(f"ok: n={code.n} t={code.t} H1={code.H1.n_rows}x{code.n} H2={code.H2.n_rows}x{code.n} G2 rows={code.G2.n_rows}")
    return 0


def _schedule(args) -> int:
    sched = build_schedule(args.gamma)
    sched.validate()
    sys.stdout.write(sched.to_text())
    return 0


def _simulate(args) -> int:
    run = load_config(args.config)
    stats = monte_carlo(run.chain, run.noise_grid, run.trials, run.decoders, seed=run.seed)
    text = emit_report(stats, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def _enumerate(args) -> int:
    run = load_config(args.config)
    table = enumerate_bounded(run.chain, args.max_weight, outcome_seed=args.outcome_seed)
    two = [r for r in table.rows if r.total_bit.weight() == 2 and sum(v.weight() for v in r.bit_errors) == 2]
    print(f"patterns={len(table.rows)} gamma={table.gamma} n={table.n} max_weight={table.max_weight}")
    print(f"posterior exact_success={table.rate('posterior')!r}")
    print(f"conventional exact_success={table.rate('conventional')!r}")
    if two:
        print(f"total bit weight 2 subset: patterns={len(two)} "
              f"posterior={table.rate('posterior', two)!r} conventional={table.rate('conventional', two)!r}")
    if args.out is not None:
        emit_report(table, args.format, args.out)
    return 0


def _resources(args) -> int:
    report = resource_count(2**args.gamma, args.n, args.gamma)
    for key, value in asdict(report).items():
        print(f"{key}={value}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blind-repeater", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-code", help="check a CSS code file")
    p.add_argument("codefile")
    p.set_defaults(func=_validate_code)

    p = sub.add_parser("schedule", help="print the command table for a chain")
    p.add_argument("--gamma", type=int, required=True)
    p.set_defaults(func=_schedule)

    p = sub.add_parser("simulate", help="Monte Carlo sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_simulate)

    p = sub.add_parser("enumerate", help="exhaustive bounded-weight injection sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--max-weight", type=int, required=True)
    p.add_argument("--outcome-seed", type=int, default=None, help="draw random swap outcomes per pattern")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_enumerate)

    p = sub.add_parser("resources", help="EPR pair counts, single vs concatenated encoding")
    p.add_argument("--gamma", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_resources)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"blind-repeater {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
