"""Initial solution by group-aware cheapest pair insertion.

Groups are attempted in seed-randomized order, each group atomically (all its
requests or none); members left over from failed groups are retried one by
one afterwards, so the initial solution may serve groups partially — the
penalty already charges the whole group either way, matching how the search
treats partial service.
"""

from __future__ import annotations

import random

from .model import Instance, Route, Solution
from .routeops import best_pair_slot, evaluate_route


class _Builder:
    def __init__(self, inst: Instance):
        self.inst = inst
        self.seqs = [[inst.start_depot(k), inst.end_depot(k)]
                     for k in range(1, inst.m + 1)]

    def try_insert(self, req: int) -> bool:
        """Insert at the cheapest feasible slot across all routes; ties go to
        the lowest vehicle, then the earliest position pair."""
        best = None
        best_key = None
        for ki, seq in enumerate(self.seqs):
            found = best_pair_slot(self.inst, seq, req)
            if found is None:
                continue
            dterm, i, j = found[0], found[1], found[2]
            key = (dterm, ki, i, j)
            if best_key is None or key < best_key:
                best_key = key
                best = (ki, found)
        if best is None:
            return False
        ki, found = best
        self.seqs[ki] = found[3]
        return True

    def remove(self, req: int):
        # used only to roll back an insertion made within the current group,
        # which restores the exact pre-insertion sequence
        p, d = req, self.inst.n + req
        for ki, seq in enumerate(self.seqs):
            if p in seq:
                self.seqs[ki] = [v for v in seq if v != p and v != d]
                return


def construct(inst: Instance, seed: int) -> Solution:
    """Deterministic greedy start: feasible, possibly with unserved requests."""
    rng = random.Random(seed)
    order = list(range(len(inst.groups)))
    rng.shuffle(order)
    b = _Builder(inst)
    served: set[int] = set()
    leftovers: list[int] = []
    for gi in order:
        members = inst.groups[gi]
        placed = []
        ok = True
        for r in members:
            if b.try_insert(r):
                placed.append(r)
            else:
                ok = False
                break
        if ok:
            served.update(members)
        else:
            for r in reversed(placed):
                b.remove(r)
            leftovers.extend(members)
    for r in leftovers:
        if b.try_insert(r):
            served.add(r)
    routes = []
    for ki, seq in enumerate(b.seqs):
        if len(seq) <= 2:
            continue
        ev = evaluate_route(inst, seq)
        routes.append(Route(vehicle=ki + 1, sequence=seq, times=ev[1]))
    return Solution(routes=routes, unserved=set(range(1, inst.n + 1)) - served)
