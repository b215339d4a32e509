"""Joint paratransit trip planning and crew shift scheduling.

A library and CLI for door-to-door ride requests with time windows, vehicle
capacities, all-or-nothing request groups, and driver shifts whose start
times are chosen from a candidate set or left fully flexible. Solutions are
built by group-aware insertion and improved by a deterministic tabu search;
tiny instances can be checked against an exhaustive oracle.
"""

from .construct import construct
from .evaluator import (RouteInfeasibility, RouteSchedule, ValidationReport,
                        Violation, check_solution, objective_accelerated,
                        objective_unserved, schedule_route,
                        strip_partial_groups, total_working_hours)
from .generate import GenParams, generate
from .model import (Instance, InvariantError, ParseError, Route, Solution,
                    load_instance, load_solution, save_instance,
                    save_solution, served_requests)
from .oracle import solve_exact
from .search import (OPERATORS, ProgressTrace, SearchConfig, TabuSearch, solve)

__version__ = "0.1.0"

__all__ = [
    "Instance", "Route", "Solution", "ParseError", "InvariantError",
    "load_instance", "save_instance", "load_solution", "save_solution",
    "served_requests",
    "RouteSchedule", "RouteInfeasibility", "Violation", "ValidationReport",
    "schedule_route", "check_solution", "objective_unserved",
    "objective_accelerated", "total_working_hours", "strip_partial_groups",
    "construct", "solve_exact",
    "SearchConfig", "ProgressTrace", "TabuSearch", "OPERATORS", "solve",
    "GenParams", "generate",
    "__version__",
]
