import csv
import json
import math
import os
import subprocess
import sys

import pytest

from uniformed_patroller.cli import main, write_sweep
from uniformed_patroller.hitting import interception_for_delay
from uniformed_patroller.model import GameConfig, PatrollerStrategy


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    record = json.loads(out) if out.strip() else None
    return code, record, err


def test_value_defaults_to_optimal_patrol(capsys):
    code, rec, _ = run_cli(capsys, "value", "--n", "10", "--m", "7")
    assert code == 0
    assert rec["Q"] == pytest.approx(0.271, abs=1e-15)
    assert (rec["s"], rec["d"], rec["p"]) == (1.0, 2, 0.1)


def test_value_at_periodic_patrol(capsys):
    _, rec, _ = run_cli(capsys, "value", "--n", "10", "--m", "2", "--p", "0.1")
    assert rec["Q"] == 0.0


def test_value_general_s_and_delay(capsys):
    _, rec, _ = run_cli(capsys, "value", "--n", "10", "--m", "4", "--p", "0.05",
                        "--s", "0.7", "--d", "3")
    expected = interception_for_delay(GameConfig(10, 4), PatrollerStrategy(10, 0.05, 0.7), 3)
    assert rec["Q"] == expected


def test_solve_records(capsys):
    _, rec, _ = run_cli(capsys, "solve", "--n", "10", "--m", "2")
    assert rec["p_hat"] == pytest.approx(0.0513167, abs=1e-7)
    assert set(rec) == {"p_hat", "r_hat", "value", "method"}
    _, rec, _ = run_cli(capsys, "solve", "--n", "5", "--m", "5")
    assert rec["p_hat"] == 0.2 and rec["value"] == pytest.approx(0.36, abs=1e-15)
    _, rec, _ = run_cli(capsys, "solve", "--n", "10", "--m", "6")
    assert rec["method"] == "numeric"


def test_uniform_cost(capsys):
    _, rec, _ = run_cli(capsys, "uniform-cost", "--n", "1000000", "--m", "2")
    assert rec["ratio"] == pytest.approx(0.25, abs=1e-4)
    _, rec, _ = run_cli(capsys, "uniform-cost", "--n", "10", "--m", "3")
    assert rec["V_tilde"] == pytest.approx(0.145, abs=1e-15)
    assert rec["V"] == pytest.approx(0.1, abs=1e-15)


def test_uniform_cost_even_m_is_input_error(capsys):
    code, rec, err = run_cli(capsys, "uniform-cost", "--n", "10", "--m", "4")
    assert code == 1 and rec is None
    assert "non-uniformed value undefined for even m>=4" in err


@pytest.mark.parametrize("argv", [
    ["value", "--n", "10", "--m", "4", "--p", "0.2"],
    ["value", "--n", "10", "--m", "1"],
    ["solve", "--n", "0", "--m", "3"],
    ["solve", "--n", "ten", "--m", "3"],
    ["bogus"],
])
def test_invalid_input_exits_1(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 1


def test_runtime_failure_exits_2(capsys, tmp_path):
    code, _, err = run_cli(capsys, "sweep", "--n", "3", "--m", "2", "--p-steps", "2",
                           "--out", str(tmp_path / "missing" / "curves.csv"))
    assert code == 2 and "error" in err


@pytest.mark.parametrize("argv", [
    ["value", "--n", "7", "--m", "5", "--p", "0.1", "--s", "0.4", "--d", "3"],
    ["value", "--n", "12", "--m", "6"],
    ["solve", "--n", "9", "--m", "8"],
])
def test_json_round_trip(capsys, argv):
    _, first, _ = run_cli(capsys, *argv)
    if "Q" in first:
        echoed = ["value", "--n", str(first["n"]), "--m", str(first["m"]),
                  "--p", repr(first["p"]), "--s", repr(first["s"]), "--d", str(first["d"])]
        _, again, _ = run_cli(capsys, *echoed)
        assert again == first
    else:
        _, again, _ = run_cli(capsys, *argv)
        assert again == first
        # value uses the matrix engine, solve the closed form
        _, rec, _ = run_cli(capsys, "value", "--n", "9", "--m", "8", "--p", repr(first["p_hat"]))
        assert rec["Q"] == pytest.approx(first["value"], abs=1e-12)


def test_simulate_is_deterministic(capsys):
    argv = ["simulate", "--n", "3", "--m", "3", "--p", "0.2", "--trials", "20000"]
    _, a, _ = run_cli(capsys, *argv)
    _, b, _ = run_cli(capsys, *argv)
    assert a == b and a["seed"] == 42
    assert a["ci_low"] <= a["q_hat"] <= a["ci_high"]
    assert a["z"] == pytest.approx(abs(a["q_hat"] - a["exact"]) / a["half_width_95"])


def test_simulate_seed_from_environment(capsys, monkeypatch):
    argv = ["simulate", "--n", "3", "--m", "3", "--p", "0.2", "--trials", "20000"]
    monkeypatch.setenv("UNIFORMED_PATROLLER_SEED", "1234")
    _, a, _ = run_cli(capsys, *argv)
    assert a["seed"] == 1234
    _, b, _ = run_cli(capsys, *argv, "--seed", "1234")
    assert a == b
    monkeypatch.setenv("UNIFORMED_PATROLLER_SEED", "x")
    code, _, _ = run_cli(capsys, *argv)
    assert code == 1


@pytest.mark.slow
def test_simulate_headline_cell(capsys):
    _, rec, _ = run_cli(capsys, "simulate", "--n", "2", "--m", "2", "--p", "0.2928932",
                        "--trials", "10000000")
    assert abs(rec["q_hat"] - (3 - 2 * math.sqrt(2))) / rec["half_width_95"] < 4


def test_simulate_verify(capsys):
    code, rec, _ = run_cli(capsys, "simulate", "--n", "4", "--m", "3", "--trials", "50000",
                           "--verify")
    assert code == 0 and rec["verify"]["passed"]


def test_verify_command(capsys):
    code, rec, _ = run_cli(capsys, "verify", "--n", "5", "--m", "4", "--trials", "50000")
    assert code == 0
    assert rec["equilibrium"]["passed"] and rec["coupling_passed"]
    assert all(row["violations"] == 0 for row in rec["coupling"])


# -- sweeps ---------------------------------------------------------------------------

def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_sweep_files(tmp_path, capsys):
    out = tmp_path / "curves.csv"
    code, rec, _ = run_cli(capsys, "sweep", "--n", "10", "--p-steps", "500", "--out", str(out))
    assert code == 0
    rows = read_rows(out)
    assert len(rows) == 9 * 500
    assert list(rows[0]) == ["n", "m", "p", "q"]
    for m in range(2, 11):
        qs = [float(r["q"]) for r in rows if r["m"] == str(m)]
        best = qs.index(max(qs))
        if m % 2 == 0:
            assert 0 < best < len(qs) - 1
        else:
            assert best == len(qs) - 1
    optima = read_rows(rec["optima"])
    assert list(optima[0]) == ["n", "m", "p_hat", "r_hat", "value"]
    assert len(optima) == 9


def test_sweep_minimal_grid(tmp_path):
    curves, optima = write_sweep([4], [2, 3], 2, tmp_path / "tiny.csv")
    rows = read_rows(curves)
    assert len(rows) == 4
    assert [float(r["p"]) for r in rows[:2]] == [0.125, 0.25]
    assert optima.name == "tiny.optima.csv"


def test_sweep_rejects_single_step(tmp_path, capsys):
    code, _, _ = run_cli(capsys, "sweep", "--n", "4", "--p-steps", "1",
                         "--out", str(tmp_path / "x.csv"))
    assert code == 1


def test_sweep_m4_optima_cluster(tmp_path):
    _, optima = write_sweep([5, 10, 15, 20], [2, 4, 6, 8], 50, tmp_path / "f3.csv")
    r_hats = [float(r["r_hat"]) for r in read_rows(optima) if r["m"] == "4"]
    assert len(r_hats) == 4
    assert all(abs(r - 0.202) <= 0.01 for r in r_hats)


def test_sweep_byte_identical_across_processes(tmp_path):
    paths = []
    for k in range(2):
        out = tmp_path / f"run{k}.csv"
        subprocess.run([sys.executable, "-m", "uniformed_patroller", "sweep", "--n", "3", "7",
                        "--m", "2", "4", "5", "--p-steps", "40", "--out", str(out)],
                       check=True, capture_output=True, env=dict(os.environ))
        paths.append(out)
    assert paths[0].read_bytes() == paths[1].read_bytes()
    opt = [p.with_name(p.stem + ".optima.csv") for p in paths]
    assert opt[0].read_bytes() == opt[1].read_bytes()
    assert b"\r" not in paths[0].read_bytes()


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "uniformed_patroller", "solve", "--n", "2",
                           "--m", "2"], capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["value"] == pytest.approx(3 - 2 * math.sqrt(2), abs=1e-15)
