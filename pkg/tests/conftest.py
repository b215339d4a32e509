"""Shared builders: hand-sized instances with exact line-metric travel."""

import pytest

from parashift import Instance, Route, Solution


def line_travel(positions):
    """Symmetric travel matrix from 1-indexed node positions on a line."""
    size = len(positions) - 1
    t = [[0] * (size + 1) for _ in range(size + 1)]
    for i in range(1, size + 1):
        for j in range(1, size + 1):
            t[i][j] = abs(positions[i] - positions[j])
    return t


def single_request_instance(*, shift_starts=(0, 60), span=480,
                            p_window=(60, 120), d_window=(80, 140)):
    """One request, one vehicle, 10 minutes between consecutive stops.

    Canonical schedule with starts {0, 60}: depart 60, pickup at 70,
    drop-off at 85, end depot at 100, span 40.
    """
    # nodes: 1=pickup, 2=dropoff, 3=start depot, 4=end depot
    positions = [None, 10, 20, 0, 30]
    return Instance(
        n=1, m=1, capacity=3, max_shift_span=span,
        shift_starts=None if shift_starts is None else list(shift_starts),
        big_m=10_000,
        window_open=[0, p_window[0], d_window[0], 0, 0],
        window_close=[0, p_window[1], d_window[1], 1000, 1000],
        service=[0, 5, 5, 0, 0],
        demand=[0, 1, -1, 0, 0],
        travel=line_travel(positions),
        groups=[[1]],
    )


def two_by_two_instance(*, capacity=3, groups=None):
    """Two singleton requests, two vehicles, wide windows, line metric.

    nodes: p1=1 (at 10), p2=2 (at 30), d1=3 (at 20), d2=4 (at 40),
    S1=5, S2=6 (at 0), E1=7, E2=8 (at 0).
    """
    positions = [None, 10, 30, 20, 40, 0, 0, 0, 0]
    return Instance(
        n=2, m=2, capacity=capacity, max_shift_span=480,
        shift_starts=[0, 60], big_m=10_000,
        window_open=[0] + [0] * 4 + [0] * 4,
        window_close=[0] + [500] * 4 + [1000] * 4,
        service=[0, 5, 5, 5, 5, 0, 0, 0, 0],
        demand=[0, 1, 1, -1, -1, 0, 0, 0, 0],
        travel=line_travel(positions),
        groups=groups or [[1], [2]],
    )


def reference_two_by_two_solution():
    """Feasible canonical plan for two_by_two_instance: one request each."""
    return Solution(
        routes=[
            Route(vehicle=1, sequence=[5, 1, 3, 7], times=[60, 70, 85, 110]),
            Route(vehicle=2, sequence=[6, 2, 4, 8], times=[60, 90, 105, 150]),
        ],
        unserved=set(),
    )


def violation_mutants():
    """(tag, instance, solution) triples, each tripping exactly its tag."""
    from dataclasses import replace
    from parashift.evaluator import (CAPACITY, LOAD_PROGRESS, LOAD_START,
                                     PAIR_ORDER, PAIR_VEHICLE, SHIFT_SPAN,
                                     START_CANDIDATE, TIME_PROGRESS,
                                     TIME_WINDOW, UNIQUENESS)
    inst = two_by_two_instance()
    cases = []

    def sol(routes, unserved=frozenset()):
        return Solution(routes=routes, unserved=set(unserved))

    # drop-off timed before service+travel from the pickup can finish
    cases.append((TIME_PROGRESS, inst, sol([
        Route(1, [5, 1, 3, 7], [60, 70, 84, 110]),
        Route(2, [6, 2, 4, 8], [60, 90, 105, 150])])))
    # drop-off served after its window closes
    cases.append((TIME_WINDOW, inst, sol([
        Route(1, [5, 1, 3, 7], [60, 70, 501, 526]),
        Route(2, [6, 2, 4, 8], [60, 90, 105, 150])])))
    # departure at 61, which is not one of the candidate starts {0, 60}
    cases.append((START_CANDIDATE, inst, sol([
        Route(1, [5, 1, 3, 7], [61, 71, 86, 111]),
        Route(2, [6, 2, 4, 8], [60, 90, 105, 150])])))
    # vehicle 2 idles at the end depot until minute 490: span 490 > 480
    cases.append((SHIFT_SPAN, inst, sol([
        Route(1, [5, 1, 3, 7], [60, 70, 85, 110]),
        Route(2, [6, 2, 4, 8], [0, 90, 105, 490])])))
    # pickups and drop-offs exchanged between the two vehicles
    cases.append((PAIR_VEHICLE, inst, sol([
        Route(1, [5, 1, 4, 7], [60, 70, 105, 150]),
        Route(2, [6, 2, 3, 8], [60, 90, 105, 130])])))
    # one vehicle serves both requests but request 1's drop-off comes first
    cases.append((PAIR_ORDER, inst, sol([
        Route(1, [5, 2, 3, 1, 4, 7], [60, 90, 105, 120, 155, 200])])))
    # stored loads jump by 2 at the drop-off instead of following demand
    cases.append((LOAD_PROGRESS, inst, sol([
        Route(1, [5, 1, 3, 7], [60, 70, 85, 110], loads=[0, 0, 2, 0]),
        Route(2, [6, 2, 4, 8], [60, 90, 105, 150])])))
    # same plan under capacity 1: two riders aboard when reaching node 3
    tight = replace(inst, capacity=1)
    cases.append((CAPACITY, tight, sol([
        Route(1, [5, 1, 2, 3, 4, 7], [60, 70, 95, 110, 135, 180])])))
    # stored loads claim one rider already aboard at the start depot
    cases.append((LOAD_START, inst, sol([
        Route(1, [5, 1, 3, 7], [60, 70, 85, 110], loads=[1, 1, 2, 1]),
        Route(2, [6, 2, 4, 8], [60, 90, 105, 150])])))
    # request 1 served by vehicle 1 yet also listed as unserved
    cases.append((UNIQUENESS, inst, sol([
        Route(1, [5, 1, 3, 7], [60, 70, 85, 110]),
        Route(2, [6, 2, 4, 8], [60, 90, 105, 150])], unserved={1})))
    return cases


@pytest.fixture
def one_req():
    return single_request_instance()


@pytest.fixture
def two_by_two():
    return two_by_two_instance()
