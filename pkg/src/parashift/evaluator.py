"""Route scheduling, solution validation, objectives and working-hours metric.

Scheduling semantics for a fixed visit order: the vehicle leaves its start
depot at the chosen shift start, service at the next node begins at
max(window_open, arrival); waiting is allowed, late arrival is not. The shift
start is the latest one that keeps every downstream deadline reachable
(computed by a backward slack pass), which also minimizes the shift span.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, field

from .model import Instance, Route, Solution, served_requests

# validator constraint tags
TIME_PROGRESS = "time_progress"
TIME_WINDOW = "time_window"
START_CANDIDATE = "start_candidate"
SHIFT_SPAN = "shift_span"
PAIR_VEHICLE = "pair_vehicle"
PAIR_ORDER = "pair_order"
LOAD_PROGRESS = "load_progress"
CAPACITY = "capacity"
LOAD_START = "load_start"
UNIQUENESS = "uniqueness"

ALL_TAGS = (TIME_PROGRESS, TIME_WINDOW, START_CANDIDATE, SHIFT_SPAN, PAIR_VEHICLE,
            PAIR_ORDER, LOAD_PROGRESS, CAPACITY, LOAD_START, UNIQUENESS)


@dataclass(frozen=True)
class RouteSchedule:
    shift_start: int
    node_times: list[int]
    node_loads: list[int]
    span: int


@dataclass(frozen=True)
class RouteInfeasibility:
    reason: str  # one of time_window, start_candidate, shift_span, capacity
    node: int | None = None


def latest_feasible_start(inst: Instance, sequence: list[int]) -> int:
    """Largest departure time from sequence[0] that can still meet every
    window close downstream (ignoring window opens, which only add waiting).
    Already clamped to the start node's own window close."""
    close = inst.window_close
    service = inst.service
    travel = inst.travel
    j = sequence[-1]
    lim = close[j]
    for idx in range(len(sequence) - 2, -1, -1):
        i = sequence[idx]
        lim -= service[i] + travel[i][j]
        bi = close[i]
        if bi < lim:
            lim = bi
        j = i
    return lim


def choose_shift_start(inst: Instance, sequence: list[int]) -> int | None:
    """Latest admissible shift start for the sequence, or None."""
    hi = latest_feasible_start(inst, sequence)
    lo = inst.window_open[sequence[0]]
    if inst.shift_starts is None:
        return hi if hi >= lo else None
    cands = inst.shift_starts
    pos = bisect_right(cands, hi)
    if pos == 0:
        return None
    t = cands[pos - 1]
    return t if t >= lo else None


def forward_times(inst: Instance, sequence: list[int], start: int):
    """Forward pass from a given shift start. Returns (times, None) on
    success or (None, first_violating_node)."""
    opens = inst.window_open
    close = inst.window_close
    service = inst.service
    travel = inst.travel
    times = [start]
    cur = start
    i = sequence[0]
    for j in sequence[1:]:
        cur += service[i] + travel[i][j]
        aj = opens[j]
        if cur < aj:
            cur = aj
        elif cur > close[j]:
            return None, j
        times.append(cur)
        i = j
    return times, None


def arrival_loads(inst: Instance, sequence: list[int]):
    """Loads on arrival at each node (load at the start depot is 0).
    Returns (loads, None) or (None, first_node_out_of_bounds)."""
    demand = inst.demand
    cap = inst.capacity
    load = 0
    loads = [0]
    for idx in range(len(sequence) - 1):
        load += demand[sequence[idx]]
        if load < 0 or load > cap:
            return None, sequence[idx + 1]
        loads.append(load)
    return loads, None


def schedule_route(inst: Instance, sequence: list[int]) -> RouteSchedule | RouteInfeasibility:
    """Canonical schedule for one route, or a typed infeasibility.

    The sequence must run from a start depot to the matching end depot with
    only request nodes in between.
    """
    k = sequence[0] - 2 * inst.n
    if not (1 <= k <= inst.m and sequence[-1] == inst.end_depot(k)):
        raise ValueError("sequence must run from a start depot to its matching end depot")
    loads, bad = arrival_loads(inst, sequence)
    if loads is None:
        return RouteInfeasibility(CAPACITY, bad)
    start = choose_shift_start(inst, sequence)
    if start is None:
        return RouteInfeasibility(START_CANDIDATE, sequence[0])
    times, bad = forward_times(inst, sequence, start)
    if times is None:
        return RouteInfeasibility(TIME_WINDOW, bad)
    span = times[-1] - times[0]
    if span > inst.max_shift_span:
        return RouteInfeasibility(SHIFT_SPAN, sequence[-1])
    return RouteSchedule(shift_start=start, node_times=times, node_loads=loads, span=span)


@dataclass
class Violation:
    tag: str
    vehicle: int | None
    node: int | None
    message: str


@dataclass
class ValidationReport:
    feasible: bool
    violations: list[Violation] = field(default_factory=list)

    def tags(self) -> set[str]:
        return {v.tag for v in self.violations}

    def to_json(self) -> str:
        return json.dumps({
            "feasible": self.feasible,
            "violations": [
                {"tag": v.tag, "vehicle": v.vehicle, "node": v.node, "message": v.message}
                for v in self.violations
            ],
        }, indent=2)


def check_solution(inst: Instance, sol: Solution) -> ValidationReport:
    """Check stored times/loads against every model constraint.

    Times are accepted whenever they satisfy the progression inequalities and
    windows exactly; they need not equal the canonical schedule. Loads are
    derived from demands unless a route carries explicit ones.
    """
    n = inst.n
    violations: list[Violation] = []

    def bad(tag, vehicle, node, message):
        violations.append(Violation(tag, vehicle, node, message))

    # structure is a precondition, not a violation
    for r in sol.routes:
        if r.sequence[0] != inst.start_depot(r.vehicle) or r.sequence[-1] != inst.end_depot(r.vehicle):
            raise ValueError(f"route of vehicle {r.vehicle} does not run depot-to-depot")
        if any(not 1 <= v <= 2 * n for v in r.sequence[1:-1]):
            raise ValueError(f"route of vehicle {r.vehicle} visits a non-request node")
        if len(r.times) != len(r.sequence):
            raise ValueError(f"route of vehicle {r.vehicle} has {len(r.times)} times "
                             f"for {len(r.sequence)} nodes")
    if len({r.vehicle for r in sol.routes}) != len(sol.routes):
        raise ValueError("two routes share a vehicle")

    # uniqueness over nodes and requests
    seen_nodes: set[int] = set()
    for r in sol.routes:
        for node in r.sequence[1:-1]:
            if node in seen_nodes:
                bad(UNIQUENESS, r.vehicle, node, f"node {node} visited more than once")
            seen_nodes.add(node)
    served = {v for v in seen_nodes if v <= n}
    for r in sorted(served & sol.unserved):
        bad(UNIQUENESS, None, r, f"request {r} both served and listed unserved")
    for r in sorted(set(range(1, n + 1)) - served - sol.unserved):
        bad(UNIQUENESS, None, r, f"request {r} neither served nor listed unserved")

    # pairing
    where: dict[int, tuple[int, int]] = {}
    for r in sol.routes:
        for pos, node in enumerate(r.sequence[1:-1], start=1):
            where[node] = (r.vehicle, pos)
    for i in range(1, n + 1):
        drop = n + i
        pi, di = where.get(i), where.get(drop)
        if pi is None and di is None:
            continue
        if pi is None or di is None:
            present = i if pi is not None else drop
            bad(PAIR_VEHICLE, (pi or di)[0], present,
                f"request {i}: pickup and drop-off are not both on a route")
        elif pi[0] != di[0]:
            bad(PAIR_VEHICLE, pi[0], i,
                f"request {i}: pickup on vehicle {pi[0]}, drop-off on vehicle {di[0]}")
        elif pi[1] >= di[1]:
            bad(PAIR_ORDER, pi[0], i,
                f"request {i}: drop-off precedes pickup in the sequence")

    # per-route time and load constraints
    for r in sol.routes:
        seq, times = r.sequence, r.times
        for idx in range(len(seq) - 1):
            i, j = seq[idx], seq[idx + 1]
            if times[idx] + inst.service[i] + inst.travel[i][j] > times[idx + 1]:
                bad(TIME_PROGRESS, r.vehicle, j,
                    f"time at node {j} precedes service+travel from node {i}")
        for idx, node in enumerate(seq):
            if not inst.window_open[node] <= times[idx] <= inst.window_close[node]:
                bad(TIME_WINDOW, r.vehicle, node,
                    f"time {times[idx]} outside window [{inst.window_open[node]},"
                    f"{inst.window_close[node]}] of node {node}")
        if inst.shift_starts is not None and times[0] not in inst.shift_starts:
            bad(START_CANDIDATE, r.vehicle, seq[0],
                f"shift start {times[0]} is not a candidate start")
        span = times[-1] - times[0]
        if span > inst.max_shift_span:
            bad(SHIFT_SPAN, r.vehicle, seq[-1],
                f"span {span} exceeds maximum {inst.max_shift_span}")
        if r.loads is not None:
            loads = r.loads
            if loads[0] != 0:
                bad(LOAD_START, r.vehicle, seq[0], f"load at start depot is {loads[0]}, not 0")
            for idx in range(len(seq) - 1):
                if loads[idx] + inst.demand[seq[idx]] != loads[idx + 1]:
                    bad(LOAD_PROGRESS, r.vehicle, seq[idx + 1],
                        f"load at node {seq[idx + 1]} does not advance by demand")
            for idx, node in enumerate(seq):
                if not 0 <= loads[idx] <= inst.capacity:
                    bad(CAPACITY, r.vehicle, node,
                        f"load {loads[idx]} outside [0,{inst.capacity}] at node {node}")
        else:
            load = 0
            for idx in range(len(seq) - 1):
                load += inst.demand[seq[idx]]
                if not 0 <= load <= inst.capacity:
                    bad(CAPACITY, r.vehicle, seq[idx + 1],
                        f"load {load} outside [0,{inst.capacity}] arriving at node {seq[idx + 1]}")

    return ValidationReport(feasible=not violations, violations=violations)


def objective_unserved(inst: Instance, sol: Solution) -> int:
    """All-or-nothing group penalty: |R_u| for every group with any unserved member."""
    penalized = set()
    total = 0
    for r in sol.unserved:
        g = inst.group_of[r]
        if g not in penalized:
            penalized.add(g)
            total += len(inst.groups[g])
    return total


def route_time_term(inst: Instance, sequence: list[int]) -> int:
    """Service+travel along a route; a bare depot-to-depot route costs 0."""
    if len(sequence) <= 2:
        return 0
    service = inst.service
    travel = inst.travel
    total = 0
    i = sequence[0]
    for j in sequence[1:]:
        total += service[i] + travel[i][j]
        i = j
    return total


def objective_accelerated(inst: Instance, sol: Solution) -> int:
    """Total service+travel time plus big_m times the unserved penalty."""
    term = sum(route_time_term(inst, r.sequence) for r in sol.routes)
    return term + inst.big_m * objective_unserved(inst, sol)


def total_working_hours(inst: Instance, sol: Solution) -> int:
    """Sum of shift spans (arrival at end depot minus shift start) over routes
    that serve at least one node; idle vehicles contribute nothing. Minutes."""
    return sum(r.times[-1] - r.times[0] for r in sol.routes if len(r.sequence) > 2)


def strip_partial_groups(inst: Instance, sol: Solution) -> Solution:
    """Remove served members of partially served groups and reschedule the
    routes they sat on. Leaves the penalty unchanged (those groups were
    already charged) and never invents new violations."""
    served = served_requests(inst, sol)
    to_remove: set[int] = set()
    for r in sorted(sol.unserved):
        for member in inst.groups[inst.group_of[r]]:
            if member in served:
                to_remove.add(member)
    if not to_remove:
        return sol.copy()
    drop_nodes = to_remove | {inst.n + r for r in to_remove}
    routes = []
    for r in sol.routes:
        if not drop_nodes.intersection(r.sequence):
            routes.append(Route(r.vehicle, list(r.sequence), list(r.times)))
            continue
        seq = [v for v in r.sequence if v not in drop_nodes]
        if len(seq) <= 2:
            continue  # vehicle no longer used
        sched = schedule_route(inst, seq)
        if isinstance(sched, RouteInfeasibility):
            raise ValueError(
                f"route of vehicle {r.vehicle} became infeasible after removing "
                f"partially served groups ({sched.reason} at node {sched.node})")
        routes.append(Route(r.vehicle, seq, sched.node_times))
    return Solution(routes=routes, unserved=sol.unserved | to_remove)
