"""Command-line front end.

Exit codes: 0 success (validate: feasible), 1 I/O or usage error,
2 infeasible solution (validate only).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .bench import (BENCH_HEADER, SUITES, flexible_instance,
                    pinned_shift_instance, run_suite, solve_with_init, write_rows)
from .evaluator import check_solution, objective_unserved, total_working_hours
from .generate import GenParams, generate
from .model import (ParseError, load_instance, load_solution, save_instance,
                    save_solution)
from .oracle import solve_exact
from .search import SearchConfig


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="parashift",
                                  description="Paratransit trip planning with "
                                              "joint crew shift scheduling.")
    sub = top.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a synthetic instance")
    g.add_argument("--out", required=True)
    g.add_argument("--params", help="JSON file of generator parameters; "
                                    "flags below override its entries")
    g.add_argument("--requests", type=int)
    g.add_argument("--vehicles", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--shift-mode", choices=["candidates", "flexible"])
    g.add_argument("--round-trip-fraction", type=float)
    g.add_argument("--chain-min", type=int)
    g.add_argument("--chain-max", type=int)

    s = sub.add_parser("solve", help="improve an instance's plan by tabu search")
    s.add_argument("--instance", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--time-limit", type=float, default=60.0)
    s.add_argument("--objective", choices=["original", "accelerated"],
                   default="accelerated")
    s.add_argument("--coupling", choices=["soft", "hard"], default="soft")
    s.add_argument("--shifts", choices=["candidates", "flexible"])
    s.add_argument("--tenure", type=int, default=100)
    s.add_argument("--max-no-improve", type=int, default=500)
    s.add_argument("--pin-shifts", metavar="SOLUTION",
                   help="replay a prior solution's shift starts as fixed "
                        "depot windows (active vehicles only)")
    s.add_argument("--out")
    s.add_argument("--trace")

    v = sub.add_parser("validate", help="check a solution against an instance")
    v.add_argument("--instance", required=True)
    v.add_argument("--solution", required=True)

    o = sub.add_parser("oracle", help="exact optimum for tiny instances")
    o.add_argument("--instance", required=True)
    o.add_argument("--out")

    b = sub.add_parser("bench", help="run an experiment suite")
    b.add_argument("--suite", required=True, choices=list(SUITES))
    b.add_argument("--instances", type=int, default=10)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--time-limit", type=float, default=60.0)
    b.add_argument("--out", required=True)
    b.add_argument("--figure", help="also render a grouped-bar PNG here")

    r = sub.add_parser("report", help="render figures from solver CSV output")
    r.add_argument("--trace", help="trace CSV from solve --trace")
    r.add_argument("--bench", help="bench CSV from bench --out")
    r.add_argument("--out-dir", default=".")

    return top


def _cmd_generate(args) -> int:
    fields = {}
    if args.params:
        with open(args.params) as fh:
            fields.update(json.load(fh))
    for flag, name in (("requests", "n_requests"), ("vehicles", "n_vehicles"),
                       ("seed", "seed"), ("shift_mode", "shift_mode"),
                       ("round_trip_fraction", "round_trip_fraction")):
        val = getattr(args, flag)
        if val is not None:
            fields[name] = val
    if args.chain_min is not None or args.chain_max is not None:
        lo, hi = fields.get("chain_length_range", GenParams.chain_length_range)
        if args.chain_min is not None:
            lo = args.chain_min
        if args.chain_max is not None:
            hi = args.chain_max
        fields["chain_length_range"] = (lo, hi)
    if "chain_length_range" in fields:
        fields["chain_length_range"] = tuple(fields["chain_length_range"])
    inst = generate(GenParams(**fields))
    save_instance(inst, args.out)
    print(f"wrote {args.out}: {inst.n} requests, {inst.m} vehicles, "
          f"{len(inst.groups)} groups")
    return 0


def _cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    if args.pin_shifts:
        prior = load_solution(inst, args.pin_shifts)
        inst = pinned_shift_instance(inst, prior)
    if args.shifts == "flexible" and inst.shift_starts is not None:
        inst = flexible_instance(inst)
    elif args.shifts == "candidates" and inst.shift_starts is None:
        print("instance has no shift start candidates; cannot run in "
              "candidates mode", file=sys.stderr)
        return 1
    cfg = SearchConfig(time_limit=args.time_limit, seed=args.seed,
                       objective_mode=args.objective, group_coupling=args.coupling,
                       tabu_tenure=args.tenure, max_no_improve=args.max_no_improve)
    sol, trace, _wall = solve_with_init(inst, cfg)
    penalty = objective_unserved(inst, sol)
    print(f"served {inst.n - penalty}/{inst.n} penalty {penalty} "
          f"working_minutes {total_working_hours(inst, sol)}")
    if args.out:
        save_solution(sol, args.out)
    if args.trace:
        trace.write_csv(args.trace)
    return 0


def _cmd_validate(args) -> int:
    inst = load_instance(args.instance)
    try:
        sol = load_solution(inst, args.solution)
        report = check_solution(inst, sol)
    except ValueError as exc:
        # file read but its content is not a usable solution for this instance
        print(f"infeasible: {exc}")
        return 2
    if report.feasible:
        print("feasible")
        return 0
    for v in report.violations:
        where = f" node {v.node}" if v.node else ""
        print(f"{v.tag}: vehicle {v.vehicle}{where}: {v.message}")
    return 2


def _cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    penalty, best, count = solve_exact(inst)
    served = inst.n - penalty
    print(f"optimal penalty {penalty} served {served}/{inst.n} "
          f"optimal_serving_sets {count}")
    if args.out:
        save_solution(best, args.out)
    return 0


def _cmd_bench(args) -> int:
    rows = run_suite(args.suite, args.instances, args.seed, args.time_limit)
    write_rows(rows, args.out)
    print(f"wrote {args.out}: {len(rows)} rows ({BENCH_HEADER})")
    if args.figure:
        from .plots import plot_bench
        plot_bench(args.out, args.figure, title=args.suite)
        print(f"wrote {args.figure}")
    return 0


def _cmd_report(args) -> int:
    if not args.trace and not args.bench:
        print("nothing to report: pass --trace and/or --bench", file=sys.stderr)
        return 1
    from .plots import plot_bench, plot_trace
    os.makedirs(args.out_dir, exist_ok=True)
    if args.trace:
        out = os.path.join(args.out_dir,
                           os.path.splitext(os.path.basename(args.trace))[0] + ".png")
        plot_trace(args.trace, out)
        print(f"wrote {out}")
    if args.bench:
        out = os.path.join(args.out_dir,
                           os.path.splitext(os.path.basename(args.bench))[0] + ".png")
        plot_bench(args.bench, out)
        print(f"wrote {out}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "solve": _cmd_solve,
    "validate": _cmd_validate,
    "oracle": _cmd_oracle,
    "bench": _cmd_bench,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (OSError, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
