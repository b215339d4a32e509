"""Low-level route evaluation and insertion scanning.

Shared by the constructor and the tabu search. Everything here works on bare
node sequences (lists of ints) and returns plain tuples; the exported
dataclasses of the evaluator wrap these for the public API.

Work accounting: evaluation cost is dominated by forward/backward passes over
sequences, so feasibility checks add len(sequence) units to a Work counter.
The search converts accumulated units into a deterministic virtual clock.
"""

from __future__ import annotations

from bisect import bisect_right

from .model import Instance


class Work:
    """Mutable unit counter; units grow with nodes touched during scheduling."""
    __slots__ = ("units",)

    def __init__(self):
        self.units = 0


def evaluate_route(inst: Instance, seq: list[int], work: Work | None = None):
    """Full feasibility evaluation of one sequence.

    Returns (shift_start, times, term, span) or None. term is the
    service+travel sum along the sequence (0 for a bare depot pair).
    """
    if work is not None:
        work.units += len(seq)
    demand = inst.demand
    cap = inst.capacity
    load = 0
    for idx in range(len(seq) - 1):
        load += demand[seq[idx]]
        if load < 0 or load > cap:
            return None
    close = inst.window_close
    service = inst.service
    travel = inst.travel
    # backward slack pass: latest start meeting all window closes
    j = seq[-1]
    lim = close[j]
    for idx in range(len(seq) - 2, -1, -1):
        i = seq[idx]
        lim -= service[i] + travel[i][j]
        bi = close[i]
        if bi < lim:
            lim = bi
        j = i
    opens = inst.window_open
    lo = opens[seq[0]]
    if inst.shift_starts is None:
        start = lim
        if start < lo:
            return None
    else:
        cands = inst.shift_starts
        pos = bisect_right(cands, lim)
        if pos == 0:
            return None
        start = cands[pos - 1]
        if start < lo:
            return None
    times = [start]
    cur = start
    term = 0
    i = seq[0]
    for j in seq[1:]:
        step = service[i] + travel[i][j]
        term += step
        cur += step
        aj = opens[j]
        if cur < aj:
            cur = aj
        elif cur > close[j]:
            return None
        times.append(cur)
        i = j
    span = cur - start
    if span > inst.max_shift_span:
        return None
    if len(seq) == 2:
        term = 0
    return start, times, term, span


def earliest_times(inst: Instance, seq: list[int]) -> list[int]:
    """Forward pass from the earliest admissible start, ignoring window
    closes: a pointwise lower bound on any feasible schedule of seq."""
    opens = inst.window_open
    service = inst.service
    travel = inst.travel
    if inst.shift_starts is None:
        cur = opens[seq[0]]
    else:
        cur = max(inst.shift_starts[0], opens[seq[0]])
    out = [cur]
    i = seq[0]
    for j in seq[1:]:
        cur += service[i] + travel[i][j]
        aj = opens[j]
        if cur < aj:
            cur = aj
        out.append(cur)
        i = j
    return out


def arrival_load_prefix(inst: Instance, seq: list[int]) -> list[int]:
    """Load on arrival at each position of seq."""
    demand = inst.demand
    load = 0
    out = [0]
    for idx in range(len(seq) - 1):
        load += demand[seq[idx]]
        out.append(load)
    return out


def slot_screens(inst: Instance, seq: list[int]):
    """Forward profile of a feasible sequence for O(1) insertion screening:
    (earliest, loads, cumwait, slack).

    earliest[k] is the pointwise-minimal service start at position k, so any
    chain built on it lower-bounds every schedule of a candidate extension.
    cumwait[k] is the waiting accumulated up to k in that minimal schedule: a
    service-start delay of v at position q reaches position k >= q shrunk to
    max(0, v - (cumwait[k] - cumwait[q])). slack[k] is the largest delay at k
    that still meets every window close from k onward, with that absorption
    accounted.
    """
    earliest = earliest_times(inst, seq)
    loads = arrival_load_prefix(inst, seq)
    service = inst.service
    travel = inst.travel
    close = inst.window_close
    last = len(seq) - 1
    cumwait = [0] * (last + 1)
    slack = [0] * (last + 1)
    slack[last] = close[seq[last]] - earliest[last]
    for k in range(last, 0, -1):
        i, j = seq[k - 1], seq[k]
        wait = earliest[k] - (earliest[k - 1] + service[i] + travel[i][j])
        cumwait[k] = wait
        gap = close[i] - earliest[k - 1]
        grown = slack[k] + wait
        slack[k - 1] = gap if gap < grown else grown
    for k in range(1, last + 1):
        cumwait[k] += cumwait[k - 1]
    return earliest, loads, cumwait, slack


def best_pair_slot(inst: Instance, seq: list[int], req: int,
                   work: Work | None = None,
                   first_feasible: bool = False):
    """Cheapest feasible insertion of request `req` into one route.

    Returns (dterm, i, j, new_seq, start, times, term, span) where the new
    sequence is seq[:i] + [pickup] + seq[i:j] + [dropoff] + seq[j:], or None
    if no slot is feasible. Lexicographically earliest (i, j) wins ties.
    With first_feasible the scan stops at the first slot that schedules,
    cheap or not, for callers whose objective attaches no value to the
    detour.

    Slots are screened in O(1) against window closes before anything is
    scheduled: the screens only ever discard slots no schedule can satisfy,
    so the returned slot matches a full scan's.
    """
    p = req
    d = inst.n + req
    dreq = inst.demand[p]
    cap = inst.capacity
    travel = inst.travel
    service = inst.service
    close = inst.window_close
    opens = inst.window_open
    sp, sd = service[p], service[d]
    bp, bd = close[p], close[d]
    op_, od = opens[p], opens[d]
    tpd = travel[p][d]
    earliest, loads, cumwait, slack = slot_screens(inst, seq)
    best = None
    best_dterm = None
    last = len(seq) - 1
    scanned = 4 * last  # profile passes
    # a bare depot pair costs 0, so inserting into it pays its whole new term,
    # not just the detour relative to driving depot-to-depot
    bare_bonus = service[seq[0]] + travel[seq[0]][seq[1]] if last == 1 else 0
    for i in range(1, last + 1):
        if earliest[i - 1] > bp:
            break  # later positions only start later
        x = seq[i - 1]
        t_x_p = travel[x][p]
        ap = earliest[i - 1] + service[x] + t_x_p
        if ap > bp:
            scanned += 1
            continue
        if ap < op_:
            ap = op_
        si = seq[i]
        # service-start delay the detour through p forces on position i
        # (j > i keeps the old i..j-1 chain behind the pickup)
        dmid = ap + sp + travel[p][si] - earliest[i]
        mx = loads[i]
        for j in range(i, last + 1):
            scanned += 1
            if loads[j] > mx:
                mx = loads[j]
            if mx + dreq > cap:
                break
            if j == i:
                z = si
                dterm = sp + sd + t_x_p + tpd + travel[d][z] - travel[x][z]
                ad = ap + sp + tpd
            else:
                # rounding can shave a minute off each detour leg, so the
                # mid-chain delay alone must overshoot by more than that
                # before the whole tail is provably dead
                if dmid > slack[i] + 2:
                    break
                if earliest[j - 1] > bd:
                    break  # the drop-off can only trail later positions
                w = seq[j - 1]
                z = seq[j]
                dterm = (sp + sd + t_x_p + travel[p][si] - travel[x][si]
                         + travel[w][d] + travel[d][z] - travel[w][z])
                dw = dmid - (cumwait[j - 1] - cumwait[i])
                aw = earliest[j - 1] + (dw if dw > 0 else 0)
                ad = aw + service[w] + travel[w][d]
            if ad > bd:
                continue
            if ad < od:
                ad = od
            if ad + sd + travel[d][z] - earliest[j] > slack[j]:
                continue
            dterm += bare_bonus
            if best_dterm is not None and dterm >= best_dterm:
                continue
            cand = seq[:i] + [p] + seq[i:j] + [d] + seq[j:]
            ev = evaluate_route(inst, cand, work)
            if ev is None:
                continue
            start, times, term, span = ev
            best_dterm = dterm
            best = (dterm, i, j, cand, start, times, term, span)
            if first_feasible:
                if work is not None:
                    work.units += scanned
                return best
    if work is not None:
        work.units += scanned
    return best


def remove_pair_seq(inst: Instance, seq: list[int], req: int) -> list[int]:
    p = req
    d = inst.n + req
    return [v for v in seq if v != p and v != d]
