import json
import os

import pytest

from parashift import (Route, Solution, load_instance, load_solution,
                       save_instance, save_solution)
from parashift.cli import main

from conftest import two_by_two_instance, reference_two_by_two_solution


@pytest.fixture
def tiny_instance_file(tmp_path):
    path = tmp_path / "tiny.json"
    assert main(["generate", "--out", str(path), "--requests", "6",
                 "--vehicles", "2", "--seed", "3"]) == 0
    return str(path)


def test_generate_writes_loadable_instance(tiny_instance_file, capsys):
    inst = load_instance(tiny_instance_file)
    assert inst.n == 6 and inst.m == 2


def test_generate_params_file_with_overrides(tmp_path, capsys):
    params = tmp_path / "params.json"
    params.write_text(json.dumps({"n_requests": 4, "n_vehicles": 1,
                                  "round_trip_fraction": 1.0}))
    out = tmp_path / "inst.json"
    assert main(["generate", "--params", str(params), "--out", str(out),
                 "--requests", "8", "--seed", "1"]) == 0
    inst = load_instance(str(out))
    assert inst.n == 8 and inst.m == 1
    assert all(len(g) == 2 for g in inst.groups)
    assert "8 requests" in capsys.readouterr().out


def test_generate_rejects_bad_chain_range(tmp_path, capsys):
    out = tmp_path / "x.json"
    rc = main(["generate", "--out", str(out), "--chain-min", "5"])
    assert rc == 1
    assert "error:" in capsys.readouterr().err
    assert not out.exists()


def test_solve_reports_and_saves(tiny_instance_file, tmp_path, capsys):
    sol_path = tmp_path / "sol.json"
    trace_path = tmp_path / "trace.csv"
    rc = main(["solve", "--instance", tiny_instance_file,
               "--time-limit", "0.3", "--seed", "1",
               "--out", str(sol_path), "--trace", str(trace_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.startswith("served ")
    assert "working_minutes" in out
    inst = load_instance(tiny_instance_file)
    sol = load_solution(inst, str(sol_path))
    lines = trace_path.read_text().splitlines()
    assert lines[0] == "elapsed_s,served,working_minutes,objective"
    assert len(lines) >= 3


def test_solve_validate_pipeline(tiny_instance_file, tmp_path, capsys):
    sol_path = tmp_path / "sol.json"
    assert main(["solve", "--instance", tiny_instance_file,
                 "--time-limit", "0.3", "--out", str(sol_path)]) == 0
    capsys.readouterr()
    assert main(["validate", "--instance", tiny_instance_file,
                 "--solution", str(sol_path)]) == 0
    assert capsys.readouterr().out.strip() == "feasible"


def test_solve_flexible_on_candidate_instance(tiny_instance_file, capsys):
    rc = main(["solve", "--instance", tiny_instance_file,
               "--shifts", "flexible", "--time-limit", "0.3"])
    assert rc == 0


def test_solve_pinned_shifts_roundtrip(tiny_instance_file, tmp_path, capsys):
    first = tmp_path / "first.json"
    assert main(["solve", "--instance", tiny_instance_file,
                 "--time-limit", "0.3", "--out", str(first)]) == 0
    rc = main(["solve", "--instance", tiny_instance_file,
               "--pin-shifts", str(first), "--time-limit", "0.3"])
    assert rc == 0
    assert "served" in capsys.readouterr().out


def test_solve_candidates_on_flexible_instance(tmp_path, capsys):
    path = tmp_path / "flex.json"
    assert main(["generate", "--out", str(path), "--requests", "4",
                 "--vehicles", "1", "--shift-mode", "flexible"]) == 0
    rc = main(["solve", "--instance", str(path), "--shifts", "candidates",
               "--time-limit", "0.2"])
    assert rc == 1
    assert "candidates" in capsys.readouterr().err


def test_validate_flags_violations(tmp_path, capsys):
    inst = two_by_two_instance()
    ipath, spath = tmp_path / "i.json", tmp_path / "s.json"
    save_instance(inst, str(ipath))
    sol = reference_two_by_two_solution()
    sol.routes[0].times[1] = 59  # arrives sooner than travel from the depot allows
    save_solution(sol, str(spath))
    rc = main(["validate", "--instance", str(ipath), "--solution", str(spath)])
    assert rc == 2
    assert "time_progress" in capsys.readouterr().out


def test_validate_rejects_malformed_solution(tmp_path, capsys):
    inst = two_by_two_instance()
    ipath, spath = tmp_path / "i.json", tmp_path / "s.json"
    save_instance(inst, str(ipath))
    spath.write_text(json.dumps({"routes": [], "unserved": [99]}))
    rc = main(["validate", "--instance", str(ipath), "--solution", str(spath)])
    assert rc == 2
    assert capsys.readouterr().out.startswith("infeasible:")


def test_missing_file_is_an_error(tmp_path, capsys):
    rc = main(["validate", "--instance", str(tmp_path / "no.json"),
               "--solution", str(tmp_path / "also-no.json")])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_oracle_command(tmp_path, capsys):
    inst = two_by_two_instance()
    ipath = tmp_path / "i.json"
    save_instance(inst, str(ipath))
    best = tmp_path / "best.json"
    rc = main(["oracle", "--instance", str(ipath), "--out", str(best)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "optimal penalty 0" in out and "served 2/2" in out
    sol = load_solution(inst, str(best))
    assert sol.unserved == set()


def test_oracle_refuses_large_instances(tiny_instance_file, capsys):
    rc = main(["oracle", "--instance", tiny_instance_file])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_bench_and_report_figures(tmp_path, capsys):
    csv = tmp_path / "bench.csv"
    fig = tmp_path / "bench-bars.png"
    rc = main(["bench", "--suite", "oracle-agreement", "--instances", "2",
               "--seed", "5", "--time-limit", "0.3", "--out", str(csv),
               "--figure", str(fig)])
    assert rc == 0
    lines = csv.read_text().splitlines()
    assert lines[0] == ("instance,mode,seed,served,requests,penalty,"
                        "working_minutes,wall_s")
    assert len(lines) == 5  # two instances x (oracle row + tabu row)
    assert fig.exists() and fig.stat().st_size > 0


def test_report_renders_trace_png(tiny_instance_file, tmp_path, capsys):
    trace = tmp_path / "run-trace.csv"
    assert main(["solve", "--instance", tiny_instance_file,
                 "--time-limit", "0.3", "--trace", str(trace)]) == 0
    outdir = tmp_path / "figs"
    rc = main(["report", "--trace", str(trace), "--out-dir", str(outdir)])
    assert rc == 0
    png = outdir / "run-trace.png"
    assert png.exists() and png.stat().st_size > 0


def test_report_needs_an_input(capsys):
    assert main(["report"]) == 1
