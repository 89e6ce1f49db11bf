import json

import pytest

from toraldyn import cli
from toraldyn.relation_analyzer import Check

FIB = "[[1, 1], [1, 0]]"
S53 = "6 9 8 12\n3 6 4 8\n4 6 6 9\n2 4 3 6\n"
T53 = "6 15 8 20\n3 6 4 8\n4 10 6 15\n2 4 3 6\n"


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in (("fib", FIB), ("s", S53), ("t", T53), ("empty", ""), ("rect", "1 2 3\n4 5 6\n"),
                       ("sing", "[[2, 0], [0, 1]]")):
        p = tmp_path / f"{name}.txt"
        p.write_text(text)
        paths[name] = str(p)
    return paths


def run(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze(files, capsys):
    code, out, _ = run(capsys, ["analyze", "--matrix", files["fib"]])
    assert code == 0
    rep = json.loads(out)
    assert rep["tool"] == "toraldyn" and rep["command"] == "analyze" and rep["precision_bits"] == 128
    assert rep["result"]["total_irreducibility"]["status"] == "certified"
    assert rep["result"]["split"]["dims"] == [1, 0, 1]
    assert "out" not in rep["config"]


def test_game_writes_report_and_is_deterministic(files, tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["game", "--matrix", files["fib"], "--rounds", "10", "--seed", "4", "--bob", "adversarial",
            "--point", "1/7,2/9", "--verify-horizon", "50"]
    assert cli.main(argv + ["--out", str(a)]) == 0
    assert cli.main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())["result"]
    assert rep["invariant_violations"] == []
    assert float(rep["nondense"]["min_distance"]) > 0


def test_equidist_straighten_correlate(files, capsys):
    code, out, _ = run(capsys, ["equidist", "--matrix", files["fib"], "--steps", "2000", "--freq-cutoff", "2"])
    assert code == 0 and json.loads(out)["result"]["N"] == 2000
    code, out, _ = run(capsys, ["straighten", "--matrix", files["fib"], "--direction", "1,0"])
    assert code == 0 and "w_lambda" in json.loads(out)["result"]
    code, out, _ = run(capsys, ["correlate", "--matrix", files["fib"], "--nmax", "8", "--format", "text"])
    assert code == 0 and "decay_fit" in out


def test_relate(files, capsys):
    code, out, _ = run(capsys, ["relate", "--matrix-s", files["s"], "--matrix-t", files["t"]])
    assert code == 0
    res = json.loads(out)["result"]
    assert res["theorem_route"] == "Outside_all_known_cases"
    assert sorted(w["dimension"] for w in res["invariant_subspaces"]) == [2, 2, 4]


def test_example53_verify(capsys):
    code, out, _ = run(capsys, ["example53", "--verify"])
    assert code == 0 and json.loads(out)["result"]["all_passed"] is True


def test_example53_failure_exits_two(monkeypatch, capsys):
    monkeypatch.setattr(cli, "verify_example_53", lambda bits: [Check("forced", False, "")])
    code, out, err = run(capsys, ["example53", "--verify"])
    assert code == 2 and "verification failed" in err
    assert json.loads(out)["result"]["all_passed"] is False


@pytest.mark.parametrize("name", ["empty", "rect", "sing"])
def test_bad_matrices_exit_one(files, capsys, name):
    code, _, err = run(capsys, ["analyze", "--matrix", files[name]])
    assert code == 1 and err.startswith("error:")


def test_low_precision_exits_one(files, capsys):
    code, _, err = run(capsys, ["analyze", "--matrix", files["fib"], "--precision-bits", "32"])
    assert code == 1 and "64" in err


def test_threads_variable(files, monkeypatch, capsys):
    monkeypatch.setenv("TORALDYN_THREADS", "3")
    code, out, _ = run(capsys, ["analyze", "--matrix", files["fib"]])
    assert code == 0 and json.loads(out)["threads"] == 3
    monkeypatch.setenv("TORALDYN_THREADS", "many")
    code, _, err = run(capsys, ["analyze", "--matrix", files["fib"]])
    assert code == 1 and "TORALDYN_THREADS" in err


def test_inside_weak_stable_direction_exits_one(files, capsys):
    code, _, err = run(capsys, ["game", "--matrix", files["fib"], "--direction", "0,0"])
    assert code == 1 and "InsideWeakStable" in err
