"""Exhaustive optimal solver for tiny instances; the ground truth for tests.

Serving a group partially never helps the penalty and only adds travel, so it
suffices to enumerate subsets of whole groups, all assignments of their
requests to vehicles, and all precedence-respecting visit orders per vehicle.
"""

from __future__ import annotations

from itertools import product

from .model import Instance, Route, Solution
from .evaluator import RouteInfeasibility, route_time_term, schedule_route

MAX_REQUESTS = 5
MAX_VEHICLES = 2


def _vehicle_orders(inst: Instance, k: int, requests: tuple[int, ...]):
    """All precedence-respecting depot-to-depot sequences over the given
    requests for vehicle k, pruned by capacity and an earliest-arrival bound."""
    start, end = inst.start_depot(k), inst.end_depot(k)
    if not requests:
        yield [start, end]
        return
    n = inst.n
    opens, close = inst.window_open, inst.window_close
    service, travel = inst.service, inst.travel
    cap = inst.capacity
    demand = inst.demand
    out: list[int] = [start]
    results: list[list[int]] = []

    def extend(onboard: tuple[int, ...], remaining: tuple[int, ...], load: int, earliest: int):
        if not onboard and not remaining:
            i = out[-1]
            arr = earliest + service[i] + travel[i][end]
            if arr < opens[end]:
                arr = opens[end]
            if arr <= close[end]:
                results.append(out + [end])
            return
        i = out[-1]
        depart = earliest + service[i]
        for r in remaining:
            if load + demand[r] <= cap:
                arr = depart + travel[i][r]
                if arr < opens[r]:
                    arr = opens[r]
                if arr <= close[r]:
                    out.append(r)
                    extend(tuple(sorted(onboard + (r,))),
                           tuple(x for x in remaining if x != r),
                           load + demand[r], arr)
                    out.pop()
        for r in onboard:
            drop = n + r
            arr = depart + travel[i][drop]
            if arr < opens[drop]:
                arr = opens[drop]
            if arr <= close[drop]:
                out.append(drop)
                extend(tuple(x for x in onboard if x != r), remaining,
                       load + demand[drop], arr)
                out.pop()

    extend((), tuple(sorted(requests)), 0, opens[start])
    yield from results


def _orders_with_terms(inst: Instance, k: int, requests: tuple[int, ...], memo: dict):
    """Feasible (time term, sequence) options for one vehicle, best first."""
    key = (k, requests)
    if key not in memo:
        options = []
        for seq in _vehicle_orders(inst, k, requests):
            if len(seq) == 2:
                options.append((0, seq))
            elif not isinstance(schedule_route(inst, seq), RouteInfeasibility):
                options.append((route_time_term(inst, seq), seq))
        options.sort(key=lambda x: (x[0], x[1]))
        memo[key] = options
    return memo[key]


def _best_routes_for(inst: Instance, requests: list[int], memo: dict):
    """Minimal time term over all assignments and orders serving exactly
    `requests`; returns (term, [sequence per vehicle]) or None."""
    m = inst.m
    best = None
    for assignment in product(range(1, m + 1), repeat=len(requests)):
        per_vehicle: dict[int, list[int]] = {k: [] for k in range(1, m + 1)}
        for r, k in zip(requests, assignment):
            per_vehicle[k].append(r)
        term = 0
        seqs = []
        for k in range(1, m + 1):
            options = _orders_with_terms(inst, k, tuple(sorted(per_vehicle[k])), memo)
            if not options:
                seqs = None
                break
            term += options[0][0]
            seqs.append(options[0][1])
        if seqs is not None and (best is None or term < best[0]):
            best = (term, seqs)
    return best


def solve_exact(inst: Instance):
    """Returns (optimal penalty, one optimal Solution minimizing the
    service+travel term among penalty-optimal ones, count of penalty-optimal
    serving sets). Guarded to n <= 5 and m <= 2."""
    if inst.n > MAX_REQUESTS or inst.m > MAX_VEHICLES:
        raise ValueError(f"oracle accepts n <= {MAX_REQUESTS} and m <= {MAX_VEHICLES}; "
                         f"got n={inst.n}, m={inst.m}")
    groups = inst.groups
    total = sum(len(g) for g in groups)
    subsets = []
    for mask in range(1 << len(groups)):
        chosen = [g for gi, g in enumerate(groups) if mask >> gi & 1]
        penalty = total - sum(len(g) for g in chosen)
        requests = sorted(r for g in chosen for r in g)
        subsets.append((penalty, mask, requests))
    subsets.sort(key=lambda s: (s[0], s[1]))

    memo: dict = {}
    best_penalty = None
    best_term = None
    best_routes = None
    count = 0
    for penalty, _mask, requests in subsets:
        if best_penalty is not None and penalty > best_penalty:
            break
        found = _best_routes_for(inst, requests, memo)
        if found is None:
            continue
        term, seqs = found
        count += 1
        if best_penalty is None or term < best_term:
            best_penalty, best_term, best_routes = penalty, term, seqs

    routes = []
    served: set[int] = set()
    for seq in best_routes:
        if len(seq) == 2:
            continue
        sched = schedule_route(inst, seq)
        routes.append(Route(vehicle=seq[0] - 2 * inst.n, sequence=seq,
                            times=sched.node_times))
        served.update(v for v in seq[1:-1] if v <= inst.n)
    sol = Solution(routes=routes, unserved=set(range(1, inst.n + 1)) - served)
    return best_penalty, sol, count
