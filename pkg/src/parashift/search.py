"""Tabu search over pickup/drop-off routes with shift scheduling.

The tabu attribute is the objective value of visited solutions: a move is
tabu while its resulting value sits in the last `tabu_tenure` recorded
values, unless it beats the incumbent (aspiration). Each iteration one
neighborhood operator is chosen by smooth weighted round-robin and the best
non-tabu move it yields is applied. Moves that leave the penalty unchanged
are only emitted when they do not worsen the time term, so the search walks
the serving-set landscape through removals/insertions while monotonically
polishing routes in between. After max_no_improve iterations without a new
lowest penalty (serving-set progress; route polish alone does not count), a
perturbation removes ~5% of the served requests and the search continues.

Determinism: the search never reads a wall clock. Work is counted in nodes
scheduled during candidate evaluation and converted to a virtual elapsed time
by a fixed calibration rate, so identical (instance, init, config) always
produce identical trajectories, traces and results. The rate is tuned so the
virtual budget does not run slower than real time on a mid-range core.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import ceil

from .model import Instance, Route, Solution, served_requests
from .evaluator import strip_partial_groups
from .routeops import (Work, best_pair_slot, evaluate_route, remove_pair_seq)

ORIGINAL = "original"
ACCELERATED = "accelerated"
SOFT = "soft"
HARD = "hard"

OPERATORS = ("relocate_pair", "swap_pairs", "insert_unserved_pair",
             "remove_pair", "or_opt_intra")

# default operator mix. Removal is the diversification channel: firing it as
# often as insertion would re-evict whatever the insertion turn just placed
# and pin the served count at the construction frontier, so by default it
# runs at half the cadence of the constructive and polish operators.
DEFAULT_WEIGHTS = {"relocate_pair": 1.0, "swap_pairs": 1.0,
                   "insert_unserved_pair": 1.0, "remove_pair": 0.5,
                   "or_opt_intra": 1.0}

# virtual clock: scheduling throughput assumed for converting counted work
# into seconds; see module docstring. Set below the slowest unit-consumption
# rate observed across instance sizes and objective modes on a mid-range
# core, so a run's real time stays at or under its virtual budget.
UNITS_PER_SECOND = 2_000_000

# breadth of the sampled swap scan (partners per focal request)
_SWAP_SAMPLE = 24

# flat work charge per iteration (selection + bookkeeping); also guarantees
# the virtual clock advances even when an operator yields no moves
_STEP_OVERHEAD = 24


@dataclass
class SearchConfig:
    time_limit: float = 60.0
    seed: int = 0
    objective_mode: str = ACCELERATED
    group_coupling: str = SOFT
    tabu_tenure: int = 100
    neighborhood_weights: dict[str, float] | None = None
    max_no_improve: int = 500

    def validate(self):
        if self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.tabu_tenure < 0:
            raise ValueError("tabu_tenure must be >= 0")
        if self.objective_mode not in (ORIGINAL, ACCELERATED):
            raise ValueError(f"unknown objective_mode {self.objective_mode!r}")
        if self.group_coupling not in (SOFT, HARD):
            raise ValueError(f"unknown group_coupling {self.group_coupling!r}")
        if self.neighborhood_weights is not None:
            for name, w in self.neighborhood_weights.items():
                if name not in OPERATORS:
                    raise ValueError(f"unknown operator {name!r}")
                if w < 0:
                    raise ValueError("operator weights must be nonnegative")
            if not any(self.neighborhood_weights.get(op, 0) > 0 for op in OPERATORS):
                raise ValueError("at least one operator weight must be positive")


@dataclass
class ProgressTrace:
    """Incumbent time series: (elapsed_s, served, working_minutes, objective)."""
    samples: list[tuple[float, int, int, int]] = field(default_factory=list)

    CSV_HEADER = "elapsed_s,served,working_minutes,objective"

    def csv_rows(self):
        yield self.CSV_HEADER
        for e, served, working, obj in self.samples:
            yield f"{e:.3f},{served},{working},{obj}"

    def write_csv(self, path):
        with open(path, "w") as fh:
            for row in self.csv_rows():
                fh.write(row + "\n")


class TabuSearch:
    """One search run. Use run() for the raw incumbent; solve() strips it."""

    def __init__(self, inst: Instance, init: Solution, cfg: SearchConfig):
        cfg.validate()
        self.inst = inst
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.work = Work()
        self.accelerated = cfg.objective_mode == ACCELERATED
        self.hard = cfg.group_coupling == HARD
        if self.hard:
            init = strip_partial_groups(inst, init)
        self._ingest(init)
        self.tabu_list: list[int] = []
        self.tabu_count: dict[int, int] = {}
        self.iteration = 0
        self.no_improve = 0
        self._best_penalty = self.penalty
        self._credits = {op: 0.0 for op in OPERATORS}
        if cfg.neighborhood_weights is None:
            self._weights = dict(DEFAULT_WEIGHTS)
        else:
            self._weights = {op: cfg.neighborhood_weights.get(op, 0.0)
                             for op in OPERATORS}
        self._total_weight = sum(self._weights.values())
        self.trace = ProgressTrace()
        self._record_tabu(self.objective())
        self._snapshot_incumbent()
        self._record_trace()
        self._next_beat = int(self.elapsed()) + 1

    # -- state ---------------------------------------------------------------

    def _ingest(self, sol: Solution):
        inst = self.inst
        m = inst.m
        seqs = [[inst.start_depot(k), inst.end_depot(k)] for k in range(1, m + 1)]
        for r in sol.routes:
            seqs[r.vehicle - 1] = list(r.sequence)
        self._load_seqs(seqs)

    def _load_seqs(self, seqs: list[list[int]]):
        inst = self.inst
        m, n = inst.m, inst.n
        self.seqs = seqs
        self._slot_cache: list[dict[int, tuple | None]] = [{} for _ in range(m)]
        self.terms = [0] * m
        self.spans = [0] * m
        for ki in range(m):
            ev = evaluate_route(inst, self.seqs[ki], self.work)
            if ev is None:
                raise ValueError(f"initial solution route of vehicle {ki + 1} is infeasible")
            self.terms[ki] = ev[2]
            self.spans[ki] = ev[3] if len(self.seqs[ki]) > 2 else 0
        self.time_term = sum(self.terms)
        self.route_of: dict[int, int] = {}
        for ki, seq in enumerate(self.seqs):
            for v in seq[1:-1]:
                if v <= n:
                    self.route_of[v] = ki
        self.unserved = set(range(1, n + 1)) - set(self.route_of)
        self.group_unserved = [0] * len(inst.groups)
        for r in self.unserved:
            self.group_unserved[inst.group_of[r]] += 1
        self.penalty = sum(len(g) for gi, g in enumerate(inst.groups)
                           if self.group_unserved[gi] > 0)

    def objective(self) -> int:
        if self.accelerated:
            return self.time_term + self.inst.big_m * self.penalty
        return self.penalty

    def _obj_from(self, time_term: int, penalty: int) -> int:
        if self.accelerated:
            return time_term + self.inst.big_m * penalty
        return penalty

    def _penalty_delta(self, added, removed) -> int:
        """Penalty change if `added` requests become served and `removed`
        requests become unserved."""
        inst = self.inst
        shifts: dict[int, int] = {}
        for r in added:
            g = inst.group_of[r]
            shifts[g] = shifts.get(g, 0) - 1
        for r in removed:
            g = inst.group_of[r]
            shifts[g] = shifts.get(g, 0) + 1
        delta = 0
        for g, dv in shifts.items():
            old = self.group_unserved[g]
            new = old + dv
            size = len(inst.groups[g])
            delta += size * ((1 if new > 0 else 0) - (1 if old > 0 else 0))
        return delta

    def elapsed(self) -> float:
        return self.work.units / UNITS_PER_SECOND

    def _working_minutes(self) -> int:
        return sum(self.spans[ki] for ki in range(self.inst.m)
                   if len(self.seqs[ki]) > 2)

    def _snapshot_incumbent(self):
        self.incumbent_obj = self.objective()
        self._inc_seqs = [list(s) for s in self.seqs]
        self._inc_unserved = set(self.unserved)
        self._inc_penalty = self.penalty
        self._inc_working = self._working_minutes()

    def _record_trace(self):
        self.trace.samples.append((self.elapsed(), self.inst.n - self._inc_penalty,
                                   self._inc_working, self.incumbent_obj))

    # -- tabu bookkeeping ------------------------------------------------------

    def _record_tabu(self, value: int):
        tenure = self.cfg.tabu_tenure
        if tenure == 0:
            return
        self.tabu_list.append(value)
        self.tabu_count[value] = self.tabu_count.get(value, 0) + 1
        if len(self.tabu_list) > tenure:
            old = self.tabu_list.pop(0)
            left = self.tabu_count[old] - 1
            if left:
                self.tabu_count[old] = left
            else:
                del self.tabu_count[old]

    def _is_tabu(self, value: int) -> bool:
        return value in self.tabu_count

    # -- move generation -------------------------------------------------------
    # A move is (new_obj, updates, added, removed) where updates is a list of
    # (route_index, new_seq, new_times, new_term, new_span).

    def _gen_moves(self, opname: str):
        return getattr(self, "_op_" + opname)()

    def _move_obj(self, dterm: int, added=(), removed=()):
        dpen = self._penalty_delta(added, removed) if (added or removed) else 0
        return self._obj_from(self.time_term + dterm, self.penalty + dpen)

    def _op_relocate_pair(self):
        served = sorted(self.route_of)
        if not served:
            return []
        r = self.rng.choice(served)
        ki = self.route_of[r]
        inst = self.inst
        reduced = remove_pair_seq(inst, self.seqs[ki], r)
        ev_red = evaluate_route(inst, reduced, self.work)
        if ev_red is None:
            return []
        red_term = ev_red[2]
        red_span = ev_red[3] if len(reduced) > 2 else 0
        moves = []
        for kt in range(inst.m):
            base = reduced if kt == ki else self.seqs[kt]
            found = best_pair_slot(inst, base, r, self.work)
            if found is None:
                continue
            _d, _i, _j, new_seq, _start, times, term, span = found
            if kt == ki:
                dterm = term - self.terms[ki]
                updates = [(ki, new_seq, times, term, span)]
            else:
                dterm = (red_term - self.terms[ki]) + (term - self.terms[kt])
                updates = [(ki, reduced, ev_red[1], red_term, red_span),
                           (kt, new_seq, times, term, span)]
            if dterm > 0:
                continue  # penalty-neutral moves may not worsen the time term
            moves.append((self._move_obj(dterm), updates, (), ()))
        return moves

    def _op_swap_pairs(self):
        served = sorted(self.route_of)
        if len(served) < 2:
            return []
        r1 = self.rng.choice(served)
        k1 = self.route_of[r1]
        others = [r for r in served if self.route_of[r] != k1]
        if not others:
            return []
        if len(others) > _SWAP_SAMPLE:
            others = self.rng.sample(others, _SWAP_SAMPLE)
        inst = self.inst
        n = inst.n
        p1, d1 = r1, n + r1
        seq1 = self.seqs[k1]
        moves = []
        for r2 in others:
            k2 = self.route_of[r2]
            p2, d2 = r2, n + r2
            seq2 = self.seqs[k2]
            new1 = [p2 if v == p1 else d2 if v == d1 else v for v in seq1]
            ev1 = evaluate_route(inst, new1, self.work)
            if ev1 is None:
                continue
            new2 = [p1 if v == p2 else d1 if v == d2 else v for v in seq2]
            ev2 = evaluate_route(inst, new2, self.work)
            if ev2 is None:
                continue
            dterm = (ev1[2] - self.terms[k1]) + (ev2[2] - self.terms[k2])
            if dterm > 0:
                continue
            updates = [(k1, new1, ev1[1], ev1[2], ev1[3]),
                       (k2, new2, ev2[1], ev2[2], ev2[3])]
            moves.append((self._move_obj(dterm), updates, (), ()))
        return moves

    def _route_slot(self, ki: int, req: int):
        """Memoized insertion scan of req against the live route ki. Entries
        survive until the route changes, so the recurring rescans of an
        unchanged route cost one lookup unit instead of a slot sweep."""
        cache = self._slot_cache[ki]
        if req in cache:
            self.work.units += 1
            return cache[req]
        found = best_pair_slot(self.inst, self.seqs[ki], req, self.work,
                               first_feasible=not self.accelerated)
        cache[req] = found
        return found

    def _best_slot_any_route(self, req: int):
        """Cheapest feasible slot for req across the live routes. Under the
        original objective every feasible slot is equally good (the objective
        carries no time term to rank them), so the first one in scan order is
        taken; only the accelerated objective buys slot guidance."""
        if not self.accelerated:
            for ki in range(self.inst.m):
                found = self._route_slot(ki, req)
                if found is not None:
                    return (ki, found)
            return None
        best = None
        best_key = None
        for ki in range(self.inst.m):
            found = self._route_slot(ki, req)
            if found is None:
                continue
            key = (found[0], ki, found[1], found[2])
            if best_key is None or key < best_key:
                best_key = key
                best = (ki, found)
        return best

    def _singletons(self, pool):
        """Requests whose group the pair operators may touch under hard
        coupling. Activating or deactivating one member of a larger group
        would break all-or-nothing atomicity, and a single-pair move cannot
        carry a whole multi-request group, so those moves are filtered out;
        multi-request groups keep whatever the construction achieved."""
        groups = self.inst.groups
        group_of = self.inst.group_of
        return [r for r in pool if len(groups[group_of[r]]) == 1]

    def _op_insert_unserved_pair(self):
        inst = self.inst
        pool = sorted(self.unserved)
        if self.hard:
            pool = self._singletons(pool)
        if not pool:
            return []
        moves = []

        def emit(r) -> bool:
            found = self._best_slot_any_route(r)
            if found is None:
                return False
            ki, (_d, _i, _j, new_seq, _s, times, term, span) = found
            dterm = term - self.terms[ki]
            moves.append((self._move_obj(dterm, added=(r,)),
                          [(ki, new_seq, times, term, span)], (r,), ()))
            return True

        if self.hard:
            for r in pool:
                emit(r)
            return moves
        # every activation that lowers the penalty (singletons, last missing
        # group members) stays on the table each call: removal always yields
        # moves, so insertion must see every recovery option or the serving
        # set drifts downward
        fillers: dict[int, list[int]] = {}
        for r in pool:
            g = inst.group_of[r]
            if self.group_unserved[g] == 1:
                emit(r)
            else:
                fillers.setdefault(g, []).append(r)
        # partial fills target one group per call, nearest to completion
        # first: scattered fills get pruned back out before a group ever
        # finishes, concentrated ones finish within a few insert calls
        for g in sorted(fillers, key=lambda gi: (self.group_unserved[gi], gi)):
            if [r for r in fillers[g] if emit(r)]:
                break
        return moves

    def _focal_partial(self):
        """The partially served multi-request group nearest completion, or
        None. Deactivating its members merely undoes an assembly in
        progress, so remove_pair leaves exactly this one group alone; a
        stuck assembly still gets dislodged by perturbation."""
        best = None
        for g, members in enumerate(self.inst.groups):
            left = self.group_unserved[g]
            if len(members) >= 2 and 0 < left < len(members):
                key = (left, g)
                if best is None or key < best:
                    best = key
        return None if best is None else best[1]

    def _op_remove_pair(self):
        inst = self.inst
        pool = sorted(self.route_of)
        if self.hard:
            pool = self._singletons(pool)
        else:
            shield = self._focal_partial()
            if shield is not None:
                pool = [r for r in pool if inst.group_of[r] != shield]
        moves = []
        for r in pool:
            ki = self.route_of[r]
            reduced = remove_pair_seq(inst, self.seqs[ki], r)
            ev = evaluate_route(inst, reduced, self.work)
            if ev is None:
                continue
            term = ev[2]
            span = ev[3] if len(reduced) > 2 else 0
            dterm = term - self.terms[ki]
            moves.append((self._move_obj(dterm, removed=(r,)),
                          [(ki, reduced, ev[1], term, span)], (), (r,)))
        return moves

    def _op_or_opt_intra(self):
        inst = self.inst
        candidates = [ki for ki in range(inst.m) if len(self.seqs[ki]) >= 4]
        if not candidates:
            return []
        ki = self.rng.choice(candidates)
        seq = self.seqs[ki]
        n = inst.n
        last = len(seq) - 1
        travel = inst.travel
        at = {v: idx for idx, v in enumerate(seq)}
        moves = []
        scanned = last
        for a in range(1, last):
            for g in (1, 2, 3):
                if a + g > last:
                    break
                seg = seq[a:a + g]
                rem = seq[:a] + seq[a + g:]
                u, z = seq[a - 1], seq[a + g]
                s0, s1 = seg[0], seg[-1]
                freed = travel[u][s0] + travel[s1][z] - travel[u][z]
                for pos in range(1, len(rem)):
                    if pos == a:
                        continue
                    scanned += 1
                    # the time term is a pure chain sum, so the reinsertion
                    # delta is exact arithmetic; only survivors get scheduled
                    q, r = rem[pos - 1], rem[pos]
                    dterm = travel[q][s0] + travel[s1][r] - travel[q][r] - freed
                    if dterm > 0:
                        continue
                    # precedence: a partner outside the moved block must stay
                    # on its side; block-internal order is unchanged
                    bad = False
                    for v in seg:
                        w = v + n if v <= n else v - n
                        iw = at.get(w)
                        if iw is None or a <= iw < a + g:
                            continue
                        t = iw if iw < a else iw - g
                        if (t < pos) == (v <= n):
                            bad = True
                            break
                    if bad:
                        continue
                    cand = rem[:pos] + seg + rem[pos:]
                    ev = evaluate_route(inst, cand, self.work)
                    if ev is None:
                        continue
                    moves.append((self._move_obj(dterm),
                                  [(ki, cand, ev[1], ev[2], ev[3])], (), ()))
        self.work.units += scanned
        return moves

    # -- stepping ---------------------------------------------------------------

    def _next_operator(self) -> str:
        credits = self._credits
        for op in OPERATORS:
            credits[op] += self._weights[op]
        pick = max(OPERATORS, key=lambda op: credits[op])
        credits[pick] -= self._total_weight
        return pick

    def step(self):
        """One tabu iteration: generate moves for one operator, apply the best
        non-tabu one (aspiration: beating the incumbent is never tabu).

        Tenure 0 disables tabu memory entirely and degenerates to pure
        descent: only moves strictly below the current objective apply.
        """
        self.iteration += 1
        self.work.units += _STEP_OVERHEAD
        moves = self._gen_moves(self._next_operator())
        floor = self.objective() if self.cfg.tabu_tenure == 0 else None
        chosen = None
        for mv in moves:
            obj = mv[0]
            if floor is not None and obj >= floor:
                continue
            if obj >= self.incumbent_obj and self._is_tabu(obj):
                continue
            if chosen is None or obj < chosen[0]:
                chosen = mv
        if chosen is not None:
            self._apply(chosen)
        else:
            self.no_improve += 1

    def _apply(self, move):
        obj, updates, added, removed = move
        for ki, seq, times, term, span in updates:
            self.seqs[ki] = seq
            self._slot_cache[ki].clear()
            self.time_term += term - self.terms[ki]
            self.terms[ki] = term
            self.spans[ki] = span if len(seq) > 2 else 0
        if added or removed:
            self.penalty += self._penalty_delta(added, removed)
            for r in added:
                self.group_unserved[self.inst.group_of[r]] -= 1
                self.unserved.discard(r)
            for r in removed:
                self.group_unserved[self.inst.group_of[r]] += 1
                self.unserved.add(r)
                self.route_of.pop(r, None)
            if added:
                for ki, seq, _t, _term, _span in updates:
                    for v in seq[1:-1]:
                        if v <= self.inst.n:
                            self.route_of[v] = ki
        elif updates:
            for ki, seq, _t, _term, _span in updates:
                for v in seq[1:-1]:
                    if v <= self.inst.n:
                        self.route_of[v] = ki
        self._record_tabu(obj)
        if obj < self.incumbent_obj:
            self._snapshot_incumbent()
            self._record_trace()
        # stagnation is measured on the serving set, not the full objective:
        # minute-level polish must not hold diversification off forever
        if self.penalty < self._best_penalty:
            self._best_penalty = self.penalty
            self.no_improve = 0
        else:
            self.no_improve += 1

    def _perturb(self):
        """Diversify: drop ceil(5%) of the cheaply recoverable served requests
        and continue from the degraded solution. Complete multi-request groups
        are left alone: under hard coupling their members could never come
        back at all, and under soft coupling clipping one hands the remnant to
        the removal operator (deactivating a partial member improves the
        objective), so the group would be deleted rather than diversified."""
        inst = self.inst
        if self.hard:
            pool = self._singletons(sorted(self.route_of))
        else:
            pool = [r for r in sorted(self.route_of)
                    if len(inst.groups[inst.group_of[r]]) == 1
                    or self.group_unserved[inst.group_of[r]] > 0]
            if not pool:  # everything served sits in complete groups
                pool = sorted(self.route_of)
        if not pool:
            # nothing to drop, but the attempt still counts: record the value
            # (repeated records age the tabu list out of a frozen state) and
            # restart the stagnation window instead of re-firing every step
            self._record_tabu(self.objective())
            self.no_improve = 0
            return
        k = ceil(0.05 * len(pool))
        victims = self.rng.sample(pool, k)
        for r in sorted(victims):
            ki = self.route_of.get(r)
            if ki is None:
                continue
            reduced = remove_pair_seq(inst, self.seqs[ki], r)
            ev = evaluate_route(inst, reduced, self.work)
            if ev is None:
                continue
            term = ev[2]
            span = ev[3] if len(reduced) > 2 else 0
            self.time_term += term - self.terms[ki]
            self.seqs[ki] = reduced
            self._slot_cache[ki].clear()
            self.terms[ki] = term
            self.spans[ki] = span
            self.penalty += self._penalty_delta((), (r,))
            self.group_unserved[inst.group_of[r]] += 1
            self.unserved.add(r)
            del self.route_of[r]
        self._record_tabu(self.objective())
        self.no_improve = 0

    def _heartbeat(self):
        e = self.elapsed()
        if e >= self._next_beat:
            self._record_trace()
            self._next_beat = int(e) + 1

    def run(self) -> tuple[Solution, ProgressTrace]:
        """Run to the virtual time budget; returns the raw (unstripped)
        incumbent and the progress trace."""
        limit = self.cfg.time_limit
        while self.elapsed() < limit:
            if self.no_improve >= self.cfg.max_no_improve:
                self._perturb()
            self.step()
            self._heartbeat()
        self._record_trace()
        return self._incumbent_solution(), self.trace

    def _incumbent_solution(self) -> Solution:
        inst = self.inst
        routes = []
        for ki, seq in enumerate(self._inc_seqs):
            if len(seq) <= 2:
                continue
            ev = evaluate_route(inst, seq)
            routes.append(Route(vehicle=ki + 1, sequence=list(seq), times=ev[1]))
        return Solution(routes=routes, unserved=set(self._inc_unserved))


def solve(inst: Instance, init: Solution, cfg: SearchConfig) -> tuple[Solution, ProgressTrace]:
    """Improve init under cfg; returns a feasible, partial-group-free solution
    whose configured objective is never worse than init's, plus the trace."""
    search = TabuSearch(inst, init, cfg)
    raw, trace = search.run()
    return strip_partial_groups(inst, raw), trace
