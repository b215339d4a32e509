"""Synthetic instance generator.

Requests live on a Euclidean plane whose unit is one minute of driving; the
travel matrix is the rounded point distance, so it is symmetric with zero
diagonal. Riders book either a single leg or a chain of legs (outbound,
possibly intermediate stops, then back home); every chain is one
all-or-nothing group. Requested arrival times follow a two-peak Gaussian
mixture over the service day.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import hypot

from .model import Instance

DAY_START = 300   # 5am, minutes after midnight
DAY_END = 1320    # 10pm


@dataclass
class GenParams:
    n_requests: int = 100
    n_vehicles: int = 6
    seed: int = 0
    area_half_width: float = 25.0     # drive minutes from depot to edge
    service_time: int = 5
    dropoff_window_width: int = 30
    day_start: int = DAY_START
    day_end: int = DAY_END
    shift_mode: str = "candidates"    # or "flexible"
    shift_step: int = 60
    last_shift_start: int = 840       # 2pm
    max_shift_span: int = 480
    capacity: int = 3
    big_m: int = 10_000
    round_trip_fraction: float = 0.5
    chain_length_range: tuple[int, int] = (2, 2)
    return_gap_range: tuple[int, int] = (120, 300)
    demand_peaks: tuple[int, int] = (540, 840)  # 9am, 2pm
    peak_sigma: float = 90.0
    passengers_per_request: int = 1

    def validate(self):
        if self.n_requests < 0:
            raise ValueError("n_requests must be >= 0")
        if self.n_vehicles < 1:
            raise ValueError("n_vehicles must be >= 1")
        for name in ("service_time", "dropoff_window_width", "max_shift_span",
                     "capacity", "big_m", "passengers_per_request", "shift_step"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.area_half_width <= 0:
            raise ValueError("area_half_width must be positive")
        if not 0.0 <= self.round_trip_fraction <= 1.0:
            raise ValueError("round_trip_fraction must be in [0, 1]")
        if self.day_start < 0 or self.day_end <= self.day_start:
            raise ValueError("day span must be a nonempty interval")
        if self.shift_mode not in ("candidates", "flexible"):
            raise ValueError(f"unknown shift_mode {self.shift_mode!r}")
        lo, hi = self.chain_length_range
        if not 2 <= lo <= hi:
            raise ValueError("chain_length_range must satisfy 2 <= lo <= hi")
        glo, ghi = self.return_gap_range
        if not 0 < glo <= ghi:
            raise ValueError("return_gap_range must satisfy 0 < lo <= hi")
        # the longest chain must fit between the arrival-sampling margins
        margin_lo = self.day_start + 120
        margin_hi = self.day_end - 120
        if margin_lo + (hi - 1) * glo > margin_hi:
            raise ValueError("chain_length_range does not fit in the day span")


def _sample_arrival(rng: random.Random, p: GenParams, hi: int) -> int:
    lo = p.day_start + 120
    while True:
        peak = p.demand_peaks[0] if rng.random() < 0.5 else p.demand_peaks[1]
        t = round(rng.gauss(peak, p.peak_sigma))
        if lo <= t <= hi:
            return t


def _chain_arrivals(rng: random.Random, p: GenParams, legs: int) -> list[int]:
    glo, ghi = p.return_gap_range
    hi = p.day_end - 120
    while True:
        first = _sample_arrival(rng, p, hi - (legs - 1) * glo)
        arr = [first]
        for _ in range(legs - 1):
            arr.append(arr[-1] + rng.randint(glo, ghi))
        if arr[-1] <= hi:
            return arr


def generate(p: GenParams) -> Instance:
    """Build an instance; deterministic per p.seed."""
    p.validate()
    rng = random.Random(p.seed)
    n = p.n_requests
    m = p.n_vehicles
    A = p.area_half_width

    def point():
        return (rng.uniform(-A, A), rng.uniform(-A, A))

    # bookings: a booking is one group of consecutive request ids whose legs
    # chain geographically (each leg starts where the previous ended)
    groups: list[list[int]] = []
    pickup_pt: dict[int, tuple] = {}
    drop_pt: dict[int, tuple] = {}
    arrival: dict[int, int] = {}
    next_req = 1
    while next_req <= n:
        remaining = n - next_req + 1
        legs = 1
        if remaining >= 2 and rng.random() < p.round_trip_fraction:
            legs = min(rng.randint(*p.chain_length_range), remaining)
        home = point()
        stops = [home] + [point() for _ in range(legs - 1)] + [home]
        arrs = _chain_arrivals(rng, p, legs) if legs > 1 else \
            [_sample_arrival(rng, p, p.day_end - 120)]
        members = []
        for leg in range(legs):
            r = next_req
            pickup_pt[r] = stops[leg]
            drop_pt[r] = stops[leg + 1]
            arrival[r] = arrs[leg]
            members.append(r)
            next_req += 1
        groups.append(members)

    depot = (0.0, 0.0)
    coords = [None] + [pickup_pt[r] for r in range(1, n + 1)] \
                    + [drop_pt[r] for r in range(1, n + 1)] \
                    + [depot] * (2 * m)
    N = 2 * n + 2 * m
    travel = [[0] * (N + 1) for _ in range(N + 1)]
    for i in range(1, N + 1):
        xi, yi = coords[i]
        row = travel[i]
        for j in range(i + 1, N + 1):
            xj, yj = coords[j]
            d = round(hypot(xi - xj, yi - yj))
            row[j] = d
            travel[j][i] = d

    w = p.dropoff_window_width
    window_open = [0] * (N + 1)
    window_close = [0] * (N + 1)
    service = [0] * (N + 1)
    demand = [0] * (N + 1)
    for r in range(1, n + 1):
        tau = arrival[r]
        direct = travel[r][n + r]
        window_open[n + r] = tau - w
        window_close[n + r] = tau
        window_open[r] = tau - w - direct
        window_close[r] = tau - direct
        service[r] = p.service_time
        service[n + r] = p.service_time
        demand[r] = p.passengers_per_request
        demand[n + r] = -p.passengers_per_request
    for v in range(2 * n + 1, N + 1):
        window_open[v] = p.day_start
        window_close[v] = p.day_end

    if p.shift_mode == "flexible":
        shift_starts = None
    else:
        shift_starts = list(range(p.day_start, p.last_shift_start + 1, p.shift_step))

    inst = Instance(n=n, m=m, capacity=p.capacity, max_shift_span=p.max_shift_span,
                    shift_starts=shift_starts, big_m=p.big_m,
                    window_open=window_open, window_close=window_close,
                    service=service, demand=demand, travel=travel, groups=groups)
    inst.validate()
    return inst
