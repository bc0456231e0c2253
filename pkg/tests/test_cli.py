import csv
import io
import json

import pytest

from cirgame.cli import expand_values, main, run, split_tokens


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_token_parsing():
    pos, kv = split_tokens(["star:3", "trials=10", "s=2"])
    assert pos == ["star:3"] and kv == {"trials": "10", "s": "2"}
    assert expand_values("1..3,7") == [1, 2, 3, 7]
    assert expand_values("0.25,1") == [0.25, 1]


def test_table_star():
    out = rows(run(["table", "star", "1..4", "trials=50"]))
    assert [r["schema"] for r in out] == ["1"] * 4
    for N, r in enumerate(out, start=1):
        assert r["ct_lower"] == r["ct_upper"] == str(N)
        assert r["dct_lower"] == f"{N}/{N + 1}"
        assert r["F_lower"] == str(N + 1)
        assert r["mc_method"] == "mc" and not r["error"]


def test_empty_range_gives_header_only():
    text = run(["table", "star", "3..2"])
    assert text.strip().startswith("schema,family") and len(text.strip().splitlines()) == 1


def test_table_is_deterministic():
    args = ["table", "tree", "2", "2", "trials=100", "seed=5"]
    assert run(args) == run(args)


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("CIR_SEED", "9")
    out = rows(run(["simulate", "path:4", "schedule:0,1,2,3", "trials=10"]))
    assert out[0]["seed"] == "9"


def test_simulate_speed():
    out = rows(run(["simulate", "star:3", "star-infspeed", "adversarial-uniform-leaf", "s=4",
                    "trials=4000", "seed=1"]))[0]
    assert float(out["ci_low"]) <= 5 <= float(out["ci_high"])
    assert out["method"] == "mc"


def test_simulate_rejects_zero_trials(capsys):
    assert main(["simulate", "path:4", "stationary:0", "trials=0"]) != 0
    assert "trials" in capsys.readouterr().err


def test_bad_strategy_exit_code():
    assert main(["simulate", "star:3", "tree-round"]) != 0
    assert main(["simulate", "nosuch:3", "stationary:0"]) != 0


def test_solvers_json():
    out = json.loads(run(["solve-adversarial", "star:2", "m=4", "--format", "json"]))
    assert out[0]["value_exact"] == "2" and out[0]["method"] == "exact"
    out = json.loads(run(["solve-drunk", "star:2", "--format", "json"]))
    assert out[0]["lower"] == out[0]["upper"] == "2/3"


def test_solve_adversarial_tables_and_dump(tmp_path):
    dump = tmp_path / "tree.txt"
    text = run(["solve-adversarial", "path:3", "m=3", "--format", "json", "--tables",
                "--dump", str(dump)])
    doc = json.loads(text)
    assert "cop_strategy" in doc and dump.read_text()


def test_convergence_plateau():
    out = rows(run(["convergence", "path:3", "m_max=5"]))
    assert [r["value"] for r in out] == ["0", "1", "3/2", "2", "2", "2"]
    assert {r["plateau_from"] for r in out} == {"3"}


def test_bounds_rows():
    out = rows(run(["bounds", "path:3"]))
    assert all(r["method"] == "formula" for r in out)
    assert any(r["source"] == "guessing-rounds-upper" and r["value"] == "27" for r in out)


def test_broom_scan():
    out = rows(run(["broom-scan", "c=0.5", "n=100", "trials=200"]))[0]
    assert out["x"] == "1" and out["f_min"] == "1"


def test_conjecture_check():
    out = rows(run(["conjecture-check", "path:3", "star:2"]))
    assert [r["status"] for r in out] == ["holds", "holds"]


def test_table_row_errors_are_reported():
    out = rows(run(["table", "path", "1..2", "trials=10"]))
    assert len(out) == 2
