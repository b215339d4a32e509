import pytest

from parashift import GenParams, generate


def test_default_shape():
    p = GenParams(n_requests=30, n_vehicles=4, seed=1)
    inst = generate(p)
    assert inst.n == 30 and inst.m == 4
    assert inst.capacity == 3
    assert inst.max_shift_span == 480
    assert inst.big_m == 10_000
    assert inst.shift_starts == list(range(300, 841, 60))
    inst.validate()


def test_same_seed_same_instance():
    p = GenParams(n_requests=25, n_vehicles=3, seed=9)
    assert generate(p) == generate(p)
    other = GenParams(n_requests=25, n_vehicles=3, seed=10)
    assert generate(other) != generate(p)


def test_travel_matrix_properties():
    inst = generate(GenParams(n_requests=20, n_vehicles=2, seed=3))
    size = inst.num_nodes
    for i in range(1, size + 1):
        assert inst.travel[i][i] == 0
        for j in range(i + 1, size + 1):
            assert inst.travel[i][j] == inst.travel[j][i] >= 0


def test_request_windows():
    p = GenParams(n_requests=40, n_vehicles=3, seed=5)
    inst = generate(p)
    for i in range(1, inst.n + 1):
        d = inst.n + i
        # drop-off window has the configured width
        assert inst.window_close[d] - inst.window_open[d] == 30
        # pickup window is the drop-off window shifted back by the direct ride
        ride = inst.travel[i][d]
        assert inst.window_open[i] == inst.window_open[d] - ride
        assert inst.window_close[i] == inst.window_close[d] - ride
        # arrivals stay well inside the day
        assert inst.window_open[i] > 0
        assert inst.window_close[d] <= p.day_end - 120


def test_depot_windows_span_the_day():
    p = GenParams(n_requests=10, n_vehicles=3, seed=6)
    inst = generate(p)
    for k in range(1, inst.m + 1):
        for node in (inst.start_depot(k), inst.end_depot(k)):
            assert inst.window_open[node] == p.day_start
            assert inst.window_close[node] == p.day_end


def test_flexible_mode_drops_candidates():
    inst = generate(GenParams(n_requests=5, n_vehicles=2, seed=2,
                              shift_mode="flexible"))
    assert inst.shift_starts is None


def test_no_round_trips_means_singleton_groups():
    inst = generate(GenParams(n_requests=12, n_vehicles=2, seed=4,
                              round_trip_fraction=0.0))
    assert inst.groups == [[i] for i in range(1, 13)]


def test_full_round_trips_chain_consecutive_requests():
    inst = generate(GenParams(n_requests=10, n_vehicles=2, seed=4,
                              round_trip_fraction=1.0))
    assert all(len(g) == 2 for g in inst.groups)
    for g in inst.groups:
        assert g[1] == g[0] + 1
        # the return leg comes home: second drop-off at the first pickup spot
        out_p, back_d = g[0], inst.n + g[1]
        assert inst.travel[out_p][back_d] == 0


def test_chained_legs_connect():
    inst = generate(GenParams(n_requests=9, n_vehicles=2, seed=8,
                              round_trip_fraction=1.0,
                              chain_length_range=(3, 3)))
    sizes = sorted(len(g) for g in inst.groups)
    assert sizes == [3, 3, 3]
    for g in inst.groups:
        for a, b in zip(g, g[1:]):
            # each leg starts where the previous one ended
            assert inst.travel[inst.n + a][b] == 0
            # and departs after it arrived
            assert inst.window_open[b] >= inst.window_open[inst.n + a]


def test_group_sizes_respect_range_and_partition():
    inst = generate(GenParams(n_requests=23, n_vehicles=3, seed=11,
                              round_trip_fraction=0.7,
                              chain_length_range=(2, 4)))
    seen = sorted(r for g in inst.groups for r in g)
    assert seen == list(range(1, 24))
    assert all(1 <= len(g) <= 4 for g in inst.groups)


def test_param_validation():
    with pytest.raises(ValueError):
        GenParams(n_requests=-1).validate()
    with pytest.raises(ValueError):
        GenParams(n_vehicles=0).validate()
    with pytest.raises(ValueError):
        GenParams(round_trip_fraction=1.5).validate()
    with pytest.raises(ValueError):
        GenParams(chain_length_range=(1, 2)).validate()
    with pytest.raises(ValueError):
        GenParams(chain_length_range=(4, 2)).validate()
    with pytest.raises(ValueError):
        GenParams(shift_mode="sliding").validate()
    with pytest.raises(ValueError):
        GenParams(day_start=600, day_end=500).validate()


def test_generated_instances_pass_model_invariants():
    for seed in range(6):
        inst = generate(GenParams(n_requests=15, n_vehicles=2, seed=seed,
                                  round_trip_fraction=0.6))
        inst.validate()
