import random
from dataclasses import replace

import pytest

from parashift import (GenParams, Instance, Route, Solution, check_solution,
                       construct, generate, objective_accelerated,
                       objective_unserved, schedule_route,
                       strip_partial_groups, total_working_hours)
from parashift.evaluator import (ALL_TAGS, CAPACITY, SHIFT_SPAN,
                                 START_CANDIDATE, TIME_WINDOW,
                                 RouteInfeasibility, RouteSchedule,
                                 choose_shift_start, route_time_term)

from conftest import (line_travel, single_request_instance,
                      two_by_two_instance, reference_two_by_two_solution,
                      violation_mutants)


# -- schedule_route on the hand-worked single-request line --------------------

def test_schedule_latest_candidate_start(one_req):
    sched = schedule_route(one_req, [3, 1, 2, 4])
    assert isinstance(sched, RouteSchedule)
    assert sched.shift_start == 60
    assert sched.node_times == [60, 70, 85, 100]
    assert sched.node_loads == [0, 0, 1, 0]
    assert sched.span == 40


def test_schedule_waits_at_window_open():
    inst = single_request_instance(shift_starts=(0,))
    sched = schedule_route(inst, [3, 1, 2, 4])
    assert sched.shift_start == 0
    # arrival at minute 10 waits for the pickup window to open at 60
    assert sched.node_times == [0, 60, 80, 95]
    assert sched.span == 95


def test_schedule_tight_pickup_forces_early_candidate():
    inst = single_request_instance(p_window=(60, 65))
    sched = schedule_route(inst, [3, 1, 2, 4])
    assert sched.shift_start == 0
    assert sched.node_times == [0, 60, 80, 95]


def test_schedule_flexible_start_minimizes_span(one_req):
    flex = replace(one_req, shift_starts=None)
    assert choose_shift_start(flex, [3, 1, 2, 4]) == 110
    sched = schedule_route(flex, [3, 1, 2, 4])
    assert sched.shift_start == 110
    assert sched.node_times == [110, 120, 135, 150]
    assert sched.span == 40


def test_schedule_span_violation():
    inst = single_request_instance(shift_starts=(0,), span=30)
    sched = schedule_route(inst, [3, 1, 2, 4])
    assert isinstance(sched, RouteInfeasibility)
    assert sched.reason == SHIFT_SPAN


def test_schedule_unreachable_window():
    inst = single_request_instance(p_window=(0, 5))
    sched = schedule_route(inst, [3, 1, 2, 4])
    assert isinstance(sched, RouteInfeasibility)
    assert sched.reason in (START_CANDIDATE, TIME_WINDOW)


def test_schedule_capacity_infeasible(two_by_two):
    tight = replace(two_by_two, capacity=0)
    sched = schedule_route(tight, [5, 1, 3, 7])
    assert isinstance(sched, RouteInfeasibility)
    assert sched.reason == CAPACITY


def test_schedule_rejects_wrong_endpoints(one_req):
    with pytest.raises(ValueError):
        schedule_route(one_req, [3, 1, 2, 3])
    with pytest.raises(ValueError):
        schedule_route(one_req, [1, 2, 4])


def test_bare_route_schedules_and_costs_nothing(one_req):
    sched = schedule_route(one_req, [3, 4])
    assert isinstance(sched, RouteSchedule)
    assert route_time_term(one_req, [3, 4]) == 0


# -- validator -----------------------------------------------------------------

def test_reference_solution_feasible(two_by_two):
    report = check_solution(two_by_two, reference_two_by_two_solution())
    assert report.feasible
    assert report.violations == []


def test_stored_times_may_include_slack(two_by_two):
    # later-than-necessary times are fine while they stay inside windows
    sol = Solution(routes=[Route(1, [5, 1, 3, 7], [60, 75, 95, 125]),
                           Route(2, [6, 2, 4, 8], [60, 90, 105, 150])],
                   unserved=set())
    assert check_solution(two_by_two, sol).feasible


def test_each_mutant_trips_exactly_its_tag():
    seen = set()
    for tag, inst, sol in violation_mutants():
        report = check_solution(inst, sol)
        assert not report.feasible, tag
        assert report.tags() == {tag}
        seen.add(tag)
    assert seen == set(ALL_TAGS)


def test_validator_report_json():
    _, inst, sol = violation_mutants()[0]
    report = check_solution(inst, sol)
    assert '"feasible": false' in report.to_json()


def test_structural_precondition_raises(two_by_two):
    # vehicle 1 leaving from vehicle 2's depot is malformed, not infeasible
    bad = Solution(routes=[Route(1, [6, 1, 3, 7], [60, 70, 85, 110])],
                   unserved={2})
    with pytest.raises(ValueError):
        check_solution(two_by_two, bad)


def test_partial_group_is_feasible_but_penalized():
    inst = two_by_two_instance(groups=[[1, 2]])
    partial = Solution(routes=[Route(1, [5, 1, 3, 7], [60, 70, 85, 110])],
                       unserved={2})
    assert check_solution(inst, partial).feasible
    assert objective_unserved(inst, partial) == 2  # full group weight


# -- objectives ------------------------------------------------------------------

def test_group_penalty_all_or_nothing():
    inst = two_by_two_instance(groups=[[1, 2]])
    nothing = Solution(routes=[], unserved={1, 2})
    assert objective_unserved(inst, nothing) == 2
    both = reference_two_by_two_solution()
    assert objective_unserved(inst, both) == 0


def test_accelerated_objective_decomposition(two_by_two):
    sol = reference_two_by_two_solution()
    term = route_time_term(two_by_two, [5, 1, 3, 7]) + \
        route_time_term(two_by_two, [6, 2, 4, 8])
    assert objective_accelerated(two_by_two, sol) == term
    one_off = Solution(routes=sol.routes[:1], unserved={2})
    assert objective_accelerated(two_by_two, one_off) == \
        route_time_term(two_by_two, [5, 1, 3, 7]) + 10_000


def test_working_minutes_sum_spans_of_active_routes(two_by_two):
    sol = reference_two_by_two_solution()
    assert total_working_hours(two_by_two, sol) == (110 - 60) + (150 - 60)
    # a bare depot-to-depot route contributes nothing
    with_idle = Solution(routes=[Route(1, [5, 7], [60, 60]),
                                 Route(2, [6, 2, 4, 8], [60, 90, 105, 150])],
                         unserved={1})
    assert total_working_hours(two_by_two, with_idle) == 90


# -- strip_partial_groups ---------------------------------------------------------

def test_strip_removes_partial_group_members():
    inst = two_by_two_instance(groups=[[1, 2]])
    partial = Solution(routes=[Route(1, [5, 1, 3, 7], [60, 70, 85, 110])],
                       unserved={2})
    stripped = strip_partial_groups(inst, partial)
    assert stripped.unserved == {1, 2}
    assert stripped.routes == []
    assert objective_unserved(inst, stripped) == objective_unserved(inst, partial)
    assert strip_partial_groups(inst, stripped) == stripped


def test_strip_keeps_complete_groups(two_by_two):
    sol = reference_two_by_two_solution()
    assert strip_partial_groups(two_by_two, sol) == sol


def test_strip_reschedules_surviving_route():
    # three requests on a line, one vehicle; group {2,3} half-served
    positions = [None, 10, 30, 50, 20, 40, 60, 0, 0]
    inst = Instance(
        n=3, m=1, capacity=3, max_shift_span=480,
        shift_starts=[0, 60], big_m=10_000,
        window_open=[0] * 7 + [0, 0],
        window_close=[0] + [500] * 6 + [1000, 1000],
        service=[0] + [5] * 6 + [0, 0],
        demand=[0, 1, 1, 1, -1, -1, -1, 0, 0],
        travel=line_travel(positions),
        groups=[[1], [2, 3]],
    )
    inst.validate()
    sol = Solution(routes=[Route(1, [7, 1, 4, 2, 5, 8],
                                 [60, 70, 85, 100, 115, 160])],
                   unserved={3})
    assert check_solution(inst, sol).feasible
    out = strip_partial_groups(inst, sol)
    # request 2 leaves the route, request 1 stays, times are rebuilt
    assert out.unserved == {2, 3}
    assert out.routes == [Route(1, [7, 1, 4, 8], [60, 70, 85, 110])]
    assert check_solution(inst, out).feasible
    assert objective_unserved(inst, out) == objective_unserved(inst, sol) == 2


def test_strip_on_random_search_states():
    rng = random.Random(4)
    for _ in range(15):
        inst = generate(GenParams(n_requests=10, n_vehicles=3,
                                  seed=rng.randint(0, 10_000)))
        sol = construct(inst, rng.randint(0, 10_000))
        assert check_solution(inst, sol).feasible
        stripped = strip_partial_groups(inst, sol)
        assert check_solution(inst, stripped).feasible
        assert objective_unserved(inst, stripped) == objective_unserved(inst, sol)
        assert strip_partial_groups(inst, stripped) == stripped
