"""Experiment harness: suite runners behind the `bench` subcommand.

Each suite emits one CSV row per (instance, mode). All solver-derived columns
are deterministic per seed; wall_s is measured real time and is the one
column exempt from that guarantee.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from .construct import construct
from .evaluator import objective_unserved, total_working_hours
from .generate import GenParams, generate
from .model import Instance, Solution
from .oracle import solve_exact
from .search import ACCELERATED, HARD, ORIGINAL, SOFT, SearchConfig, solve

BENCH_HEADER = "instance,mode,seed,served,requests,penalty,working_minutes,wall_s"
JOBS_ENV = "PARASHIFT_BENCH_JOBS"

SUITES = ("acceleration", "flexibility", "coupling", "oracle-agreement")


def bench_jobs() -> int:
    raw = os.environ.get(JOBS_ENV)
    if raw:
        jobs = int(raw)
        if jobs < 1:
            raise ValueError(f"{JOBS_ENV} must be >= 1")
        return jobs
    return os.cpu_count() or 1


def _row(label: str, mode: str, seed: int, inst: Instance, sol: Solution,
         wall: float) -> dict:
    penalty = objective_unserved(inst, sol)
    return {
        "instance": label,
        "mode": mode,
        "seed": seed,
        "served": inst.n - penalty,
        "requests": inst.n,
        "penalty": penalty,
        "working_minutes": total_working_hours(inst, sol),
        "wall_s": f"{wall:.3f}",
    }


def solve_with_init(inst: Instance, cfg: SearchConfig, init: Solution | None = None):
    """construct (unless given) + tabu solve; returns (solution, trace, wall)."""
    t0 = time.perf_counter()
    if init is None:
        init = construct(inst, cfg.seed)
    sol, trace = solve(inst, init, cfg)
    return sol, trace, time.perf_counter() - t0


def flexible_instance(inst: Instance) -> Instance:
    return replace(inst, shift_starts=None)


def pinned_shift_instance(inst: Instance, sol: Solution) -> Instance:
    """Rebuild the instance with only the vehicles active in sol, each start
    depot's window pinned to that vehicle's chosen shift start. Solving the
    result replays the prior shift plan with routes free to change."""
    active = [r for r in sol.routes if len(r.sequence) > 2]
    if not active:
        raise ValueError("solution has no active vehicles to pin")
    n = inst.n
    mp = len(active)
    keep = list(range(0, 2 * n + 1))
    for r in active:
        keep.append(inst.start_depot(r.vehicle))
    for r in active:
        keep.append(inst.end_depot(r.vehicle))
    window_open = [inst.window_open[v] for v in keep]
    window_close = [inst.window_close[v] for v in keep]
    service = [inst.service[v] for v in keep]
    demand = [inst.demand[v] for v in keep]
    travel = [[inst.travel[a][b] for b in keep] for a in keep]
    for ki, r in enumerate(active):
        sd = 2 * n + 1 + ki
        window_open[sd] = r.shift_start
        window_close[sd] = r.shift_start
    return Instance(n=n, m=mp, capacity=inst.capacity,
                    max_shift_span=inst.max_shift_span, shift_starts=None,
                    big_m=inst.big_m, window_open=window_open,
                    window_close=window_close, service=service, demand=demand,
                    travel=travel, groups=[list(g) for g in inst.groups])


# -- suites -------------------------------------------------------------------

def _acceleration_task(args):
    i, seed, time_limit = args
    label = f"acc-{i:02d}"
    inst = generate(GenParams(seed=seed))
    rows = []
    for mode, name in ((ACCELERATED, "accelerated"), (ORIGINAL, "original")):
        cfg = SearchConfig(time_limit=time_limit, seed=seed, objective_mode=mode)
        sol, _tr, wall = solve_with_init(inst, cfg)
        rows.append(_row(label, name, seed, inst, sol, wall))
    return rows


def _flexibility_task(args):
    i, seed, time_limit = args
    label = f"flex-{i:02d}"
    inst = generate(GenParams(seed=seed))
    cfg = SearchConfig(time_limit=time_limit, seed=seed)
    base_sol, _tr, wall = solve_with_init(inst, cfg)
    rows = [_row(label, "candidates", seed, inst, base_sol, wall)]
    # warm start: the fixed-shift plan is feasible under flexible shifts, so
    # the flexible run can only match or improve it
    flex = flexible_instance(inst)
    sol, _tr, wall = solve_with_init(flex, cfg, init=base_sol)
    rows.append(_row(label, "flexible", seed, flex, sol, wall))
    return rows


def _coupling_task(args):
    i, seed, time_limit = args
    label = f"coup-{i:02d}"
    inst = generate(GenParams(seed=seed, chain_length_range=(3, 4),
                              round_trip_fraction=0.7))
    rows = []
    for coupling, name in ((SOFT, "soft"), (HARD, "hard")):
        cfg = SearchConfig(time_limit=time_limit, seed=seed, group_coupling=coupling)
        sol, _tr, wall = solve_with_init(inst, cfg)
        rows.append(_row(label, name, seed, inst, sol, wall))
    return rows


def _oracle_task(args):
    i, seed, time_limit = args
    label = f"tiny-{i:03d}"
    rng_n = 2 + i % 3          # n in 2..4
    rng_m = 1 + i % 2
    inst = generate(GenParams(n_requests=rng_n, n_vehicles=rng_m, seed=seed,
                              area_half_width=15.0))
    t0 = time.perf_counter()
    penalty, best, _count = solve_exact(inst)
    wall = time.perf_counter() - t0
    rows = [_row(label, "oracle", seed, inst, best, wall)]
    cfg = SearchConfig(time_limit=time_limit, seed=seed)
    sol, _tr, wall = solve_with_init(inst, cfg)
    rows.append(_row(label, "tabu", seed, inst, sol, wall))
    return rows


_TASKS = {
    "acceleration": _acceleration_task,
    "flexibility": _flexibility_task,
    "coupling": _coupling_task,
    "oracle-agreement": _oracle_task,
}


def run_suite(suite: str, instances: int, seed: int, time_limit: float,
              jobs: int | None = None) -> list[dict]:
    if suite not in _TASKS:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    task = _TASKS[suite]
    args = [(i, seed + i, time_limit) for i in range(instances)]
    if jobs is None:
        jobs = bench_jobs()
    if jobs == 1 or len(args) <= 1:
        batches = [task(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            batches = list(pool.map(task, args))
    return [row for batch in batches for row in batch]


def write_rows(rows: list[dict], path: str):
    with open(path, "w") as fh:
        fh.write(BENCH_HEADER + "\n")
        cols = BENCH_HEADER.split(",")
        for row in rows:
            fh.write(",".join(str(row[c]) for c in cols) + "\n")
