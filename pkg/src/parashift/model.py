"""Problem and solution data model.

Node convention for an instance with n requests and m vehicles: nodes are
numbered 1..2n+2m. Pickups are 1..n, drop-offs n+1..2n (request i alights at
node n+i), vehicle start depots 2n+1..2n+m, vehicle end depots
2n+m+1..2n+2m. All times are integer minutes since midnight.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property


class ParseError(ValueError):
    """A file is structurally malformed (bad JSON, missing/ill-typed field)."""


class InvariantError(ValueError):
    """Structurally readable data that breaks a model invariant."""


PICKUP = "pickup"
DROPOFF = "dropoff"
START_DEPOT = "start_depot"
END_DEPOT = "end_depot"


@dataclass(eq=True)
class Instance:
    """One problem datum. Node-indexed arrays are padded so index 0 is unused.

    shift_starts is a sorted list of candidate shift start minutes, or None
    when shift starts are fully flexible (any integer minute inside the start
    depot window).
    """

    n: int
    m: int
    capacity: int
    max_shift_span: int
    shift_starts: list[int] | None
    big_m: int
    window_open: list[int]
    window_close: list[int]
    service: list[int]
    demand: list[int]
    travel: list[list[int]]  # (N+1)x(N+1), row/col 0 unused
    groups: list[list[int]]

    def __post_init__(self):
        if self.shift_starts is not None:
            self.shift_starts = sorted(self.shift_starts)
        self.groups = sorted((sorted(g) for g in self.groups),
                             key=lambda g: g[0] if g else -1)

    @property
    def num_nodes(self) -> int:
        return 2 * self.n + 2 * self.m

    def start_depot(self, k: int) -> int:
        return 2 * self.n + k

    def end_depot(self, k: int) -> int:
        return 2 * self.n + self.m + k

    def node_role(self, i: int) -> str:
        n, m = self.n, self.m
        if not 1 <= i <= 2 * n + 2 * m:
            raise ValueError(f"node id {i} out of range 1..{2 * n + 2 * m}")
        if i <= n:
            return PICKUP
        if i <= 2 * n:
            return DROPOFF
        if i <= 2 * n + m:
            return START_DEPOT
        return END_DEPOT

    def partner(self, i: int) -> int:
        role = self.node_role(i)
        if role == PICKUP:
            return i + self.n
        if role == DROPOFF:
            return i - self.n
        raise ValueError(f"node {i} is a depot and has no partner")

    @cached_property
    def group_of(self) -> dict[int, int]:
        """Request id -> index into self.groups."""
        out = {}
        for gi, members in enumerate(self.groups):
            for r in members:
                out[r] = gi
        return out

    def validate(self) -> None:
        """Raise InvariantError naming the first broken model invariant."""
        n, m, size = self.n, self.m, self.num_nodes
        if n < 0 or m < 1:
            raise InvariantError(f"fleet/request counts: n={n}, m={m}")
        if self.capacity < 1:
            raise InvariantError(f"capacity must be positive, got {self.capacity}")
        if self.max_shift_span < 0:
            raise InvariantError("max_shift_span must be nonnegative")
        if self.big_m <= 0:
            raise InvariantError("big_m must be positive")
        for name, arr in (("window_open", self.window_open),
                          ("window_close", self.window_close),
                          ("service", self.service), ("demand", self.demand)):
            if len(arr) != size + 1:
                raise InvariantError(f"node table size: {name} has {len(arr) - 1} "
                                     f"entries, expected {size}")
        if len(self.travel) != size + 1 or any(len(row) != size + 1 for row in self.travel):
            raise InvariantError(f"travel matrix must be {size}x{size}")
        for i in range(1, size + 1):
            a, b = self.window_open[i], self.window_close[i]
            if not (isinstance(a, int) and isinstance(b, int)) or a < 0 or a > b:
                raise InvariantError(f"window of node {i}: need 0 <= a <= b, got [{a},{b}]")
            if self.service[i] < 0:
                raise InvariantError(f"service time of node {i} is negative")
            for j in range(1, size + 1):
                if self.travel[i][j] < 0:
                    raise InvariantError(f"travel[{i}][{j}] is negative")
        for i in range(1, n + 1):
            if self.demand[i] <= 0:
                raise InvariantError(f"demand sign: pickup {i} must have d > 0")
            if self.demand[n + i] != -self.demand[i]:
                raise InvariantError(f"demand antisymmetry: d[{n + i}] != -d[{i}]")
        for i in range(2 * n + 1, size + 1):
            if self.demand[i] != 0:
                raise InvariantError(f"demand of depot node {i} must be 0")
        seen: set[int] = set()
        for g in self.groups:
            if not g:
                raise InvariantError("groups not a partition: empty group")
            for r in g:
                if not 1 <= r <= n or r in seen:
                    raise InvariantError("groups not a partition")
                seen.add(r)
        if len(seen) != n:
            raise InvariantError("groups not a partition")
        if self.shift_starts is not None:
            if not self.shift_starts:
                raise InvariantError("explicit shift_starts must be nonempty")
            for t in self.shift_starts:
                if not isinstance(t, int):
                    raise InvariantError("shift start candidates must be integers")
                for k in range(1, m + 1):
                    s = self.start_depot(k)
                    if not self.window_open[s] <= t <= self.window_close[s]:
                        raise InvariantError(
                            f"shift start candidate {t} outside window of depot {s}")


@dataclass(eq=True)
class Route:
    """One vehicle's path: full sequence from its start depot to its end depot,
    with the service-start minute of every visited node.

    loads is normally None (derived from demands by the validator); tests may
    supply explicit arrival loads. It is never serialized.
    """

    vehicle: int
    sequence: list[int]
    times: list[int]
    loads: list[int] | None = field(default=None, compare=False)

    @property
    def shift_start(self) -> int:
        return self.times[0]


@dataclass(eq=True)
class Solution:
    routes: list[Route]
    unserved: set[int]

    def __post_init__(self):
        self.routes = sorted(self.routes, key=lambda r: r.vehicle)
        self.unserved = set(self.unserved)

    def copy(self) -> "Solution":
        return Solution(
            routes=[Route(r.vehicle, list(r.sequence), list(r.times),
                          None if r.loads is None else list(r.loads))
                    for r in self.routes],
            unserved=set(self.unserved),
        )


def served_requests(inst: Instance, sol: Solution) -> set[int]:
    """Request ids whose pickup appears on some route."""
    n = inst.n
    return {node for r in sol.routes for node in r.sequence[1:-1] if node <= n}


def _canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def save_instance(inst: Instance, path) -> None:
    size = inst.num_nodes
    payload = {
        "n": inst.n,
        "m": inst.m,
        "capacity": inst.capacity,
        "max_shift_span": inst.max_shift_span,
        "shift_starts": "flexible" if inst.shift_starts is None else inst.shift_starts,
        "big_m": inst.big_m,
        "nodes": [
            {"id": i, "a": inst.window_open[i], "b": inst.window_close[i],
             "s": inst.service[i], "d": inst.demand[i]}
            for i in range(1, size + 1)
        ],
        "travel": [inst.travel[i][1:] for i in range(1, size + 1)],
        "groups": inst.groups,
    }
    with open(path, "w") as fh:
        fh.write(_canonical_dumps(payload))


def _require(cond: bool, msg: str):
    if not cond:
        raise ParseError(msg)


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where}: expected integer, got {value!r}")
    return value


def load_instance(path) -> Instance:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}") from e
    _require(isinstance(raw, dict), f"{path}: top level must be an object")
    for key in ("n", "m", "capacity", "max_shift_span", "shift_starts",
                "big_m", "nodes", "travel", "groups"):
        _require(key in raw, f"{path}: missing field '{key}'")
    n = _as_int(raw["n"], "n")
    m = _as_int(raw["m"], "m")
    size = 2 * n + 2 * m
    nodes = raw["nodes"]
    _require(isinstance(nodes, list) and len(nodes) == size,
             f"nodes: expected {size} entries, got {len(nodes) if isinstance(nodes, list) else '?'}")
    window_open = [0] * (size + 1)
    window_close = [0] * (size + 1)
    service = [0] * (size + 1)
    demand = [0] * (size + 1)
    seen_ids = set()
    for idx, nd in enumerate(nodes):
        _require(isinstance(nd, dict), f"nodes[{idx}]: expected object")
        i = _as_int(nd.get("id"), f"nodes[{idx}].id")
        _require(1 <= i <= size and i not in seen_ids, f"nodes[{idx}].id: bad or duplicate id {i}")
        seen_ids.add(i)
        window_open[i] = _as_int(nd.get("a"), f"nodes[{idx}].a")
        window_close[i] = _as_int(nd.get("b"), f"nodes[{idx}].b")
        service[i] = _as_int(nd.get("s"), f"nodes[{idx}].s")
        demand[i] = _as_int(nd.get("d"), f"nodes[{idx}].d")
    t_raw = raw["travel"]
    _require(isinstance(t_raw, list) and len(t_raw) == size, f"travel: expected {size} rows")
    travel = [[0] * (size + 1)]
    for ri, row in enumerate(t_raw):
        _require(isinstance(row, list) and len(row) == size, f"travel[{ri}]: expected {size} columns")
        travel.append([0] + [_as_int(v, f"travel[{ri}][{ci}]") for ci, v in enumerate(row)])
    shifts = raw["shift_starts"]
    if shifts == "flexible":
        shift_starts = None
    else:
        _require(isinstance(shifts, list), "shift_starts: expected array or \"flexible\"")
        shift_starts = [_as_int(v, f"shift_starts[{i}]") for i, v in enumerate(shifts)]
    groups_raw = raw["groups"]
    _require(isinstance(groups_raw, list), "groups: expected array of arrays")
    groups = []
    for gi, g in enumerate(groups_raw):
        _require(isinstance(g, list), f"groups[{gi}]: expected array")
        groups.append([_as_int(r, f"groups[{gi}][{j}]") for j, r in enumerate(g)])
    inst = Instance(
        n=n, m=m,
        capacity=_as_int(raw["capacity"], "capacity"),
        max_shift_span=_as_int(raw["max_shift_span"], "max_shift_span"),
        shift_starts=shift_starts,
        big_m=_as_int(raw["big_m"], "big_m"),
        window_open=window_open, window_close=window_close,
        service=service, demand=demand, travel=travel, groups=groups,
    )
    inst.validate()
    return inst


def save_solution(sol: Solution, path) -> None:
    payload = {
        "routes": [
            {"vehicle": r.vehicle, "sequence": r.sequence,
             "shift_start": r.times[0], "times": r.times}
            for r in sol.routes
        ],
        "unserved": sorted(sol.unserved),
    }
    with open(path, "w") as fh:
        fh.write(_canonical_dumps(payload))


def load_solution(inst: Instance, path) -> Solution:
    """Structural checks only; constraint violations are the validator's job."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}") from e
    _require(isinstance(raw, dict), f"{path}: top level must be an object")
    _require("routes" in raw and "unserved" in raw, f"{path}: missing 'routes' or 'unserved'")
    _require(isinstance(raw["routes"], list), "routes: expected array")
    n = inst.n
    routes = []
    seen_vehicles = set()
    for ri, rr in enumerate(raw["routes"]):
        _require(isinstance(rr, dict), f"routes[{ri}]: expected object")
        k = _as_int(rr.get("vehicle"), f"routes[{ri}].vehicle")
        _require(1 <= k <= inst.m, f"routes[{ri}].vehicle: {k} out of range 1..{inst.m}")
        _require(k not in seen_vehicles, f"routes[{ri}]: duplicate route for vehicle {k}")
        seen_vehicles.add(k)
        seq = rr.get("sequence")
        _require(isinstance(seq, list) and len(seq) >= 2, f"routes[{ri}].sequence: expected array of >= 2 nodes")
        seq = [_as_int(v, f"routes[{ri}].sequence[{j}]") for j, v in enumerate(seq)]
        _require(seq[0] == inst.start_depot(k),
                 f"routes[{ri}]: sequence must begin at start depot {inst.start_depot(k)}")
        _require(seq[-1] == inst.end_depot(k),
                 f"routes[{ri}]: sequence must end at end depot {inst.end_depot(k)}")
        for node in seq[1:-1]:
            _require(1 <= node <= 2 * n, f"routes[{ri}]: interior node {node} is not a request node")
        times = rr.get("times")
        _require(isinstance(times, list) and len(times) == len(seq),
                 f"routes[{ri}].times: expected one time per sequence node")
        times = [_as_int(v, f"routes[{ri}].times[{j}]") for j, v in enumerate(times)]
        start = _as_int(rr.get("shift_start"), f"routes[{ri}].shift_start")
        _require(start == times[0], f"routes[{ri}]: shift_start {start} != times[0] {times[0]}")
        routes.append(Route(vehicle=k, sequence=seq, times=times))
    _require(isinstance(raw["unserved"], list), "unserved: expected array")
    unserved = set()
    for j, r in enumerate(raw["unserved"]):
        r = _as_int(r, f"unserved[{j}]")
        _require(1 <= r <= n, f"unserved[{j}]: request id {r} out of range 1..{n}")
        unserved.add(r)
    return Solution(routes=routes, unserved=unserved)
