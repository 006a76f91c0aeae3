import json
from pathlib import Path

import pytest

from sossched.cli import main


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture
def minckp_file(tmp_path):
    path = tmp_path / "inst.json"
    assert run("gen", "--seed", 5, "--n", 8, "--theta", "3/5", "--output", path) == 0
    return path


@pytest.fixture
def maxsub_file(tmp_path):
    path = tmp_path / "m.json"
    assert run("gen", "--kind", "maxsub", "--seed", 5, "--n", 3, "--output", path) == 0
    return path


def test_gen_stdout(capsys):
    assert run("gen", "--seed", 1, "--n", 3) == 0
    assert json.loads(capsys.readouterr().out)["kind"] == "minckp"


def test_gen_many(tmp_path):
    out = tmp_path / "corpus"
    assert run("gen", "--seed", 10, "--n", 4, "--count", 3, "--output", out) == 0
    assert sorted(p.name for p in out.iterdir()) == [
        "minckp-n4-s10.json", "minckp-n4-s11.json", "minckp-n4-s12.json"]


def test_solve_verify_minckp(tmp_path, minckp_file, capsys):
    sol = tmp_path / "sol.json"
    assert run("solve", "minckp", "--input", minckp_file, "--epsilon", "1/2", "--output", sol) == 0
    assert run("verify", "--input", minckp_file, "--solution", sol) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "OK"


def test_solve_maxsub_modes(tmp_path, maxsub_file):
    for extra in ([], ["--oracle", "grid", "--grid-resolution", 16], ["--relaxation-only"],
                  ["--fw-steps", 3]):
        sol = tmp_path / "s.json"
        assert run("solve", "maxsub", "--input", maxsub_file, "--output", sol, *extra) == 0
        assert run("verify", "--input", maxsub_file, "--solution", sol) == 0


def test_relaxation_minckp(tmp_path, minckp_file):
    sol = tmp_path / "r.json"
    assert run("solve", "minckp", "--input", minckp_file, "--relaxation-only",
               "--output", sol) == 0
    assert json.loads(sol.read_text())["relaxation"] is True
    assert run("verify", "--input", minckp_file, "--solution", sol) == 0


def test_oracle(minckp_file, maxsub_file, capsys):
    assert run("oracle", "--input", minckp_file) == 0
    assert "brute" in json.loads(capsys.readouterr().out)
    assert run("oracle", "--input", maxsub_file, "--grid-resolution", 8) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["grid"]["problem"] == "f1"


def test_exit_codes(tmp_path, minckp_file, maxsub_file):
    assert run("solve", "minckp", "--input", minckp_file, "--epsilon", "2") == 3
    assert run("solve", "minckp", "--input", maxsub_file) == 3
    assert run("solve", "minckp", "--input", tmp_path / "missing.json") == 3
    assert run("solve", "minckp", "--input", minckp_file, "--epsilon", "abc") == 3
    assert run("oracle", "--input", minckp_file, "--grid-resolution", 4) == 3
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "minckp", "c": [1], "p": [1], "q": [1], "capacity": "9"}')
    assert run("solve", "minckp", "--input", bad) == 2


def test_guard(tmp_path, capsys):
    path = tmp_path / "big.json"
    assert run("gen", "--seed", 1, "--n", 60, "--output", path) == 0
    assert run("solve", "minckp", "--input", path, "--epsilon", "1/4") == 3
    assert "--force" in capsys.readouterr().err


def test_verify_rejects(tmp_path, minckp_file):
    sol = tmp_path / "sol.json"
    run("solve", "minckp", "--input", minckp_file, "--output", sol)
    d = json.loads(sol.read_text())
    d["value"] = str(int(d["value"]) + 1)
    sol.write_text(json.dumps(d))
    assert run("verify", "--input", minckp_file, "--solution", sol) == 3
    sol.write_text("{")
    assert run("verify", "--input", minckp_file, "--solution", sol) == 3


def test_bench(tmp_path, capsys):
    corpus = tmp_path / "c"
    run("gen", "--seed", 3, "--n", 6, "--count", 2, "--output", corpus)
    run("gen", "--kind", "maxsub", "--seed", 3, "--n", 4, "--output", corpus / "m.json")
    report = tmp_path / "r.json"
    csv_path = tmp_path / "r.csv"
    assert run("bench", "--input", corpus, "--epsilon", "1/2", "--epsilon", "1",
               "--output", csv_path, "--report", report) == 0
    rows = json.loads(report.read_text())["rows"]
    assert len(rows) == 6
    assert csv_path.read_text().splitlines()[0].startswith("instance,kind,algorithm")


def test_bench_empty(tmp_path, capsys):
    empty = tmp_path / "e"
    empty.mkdir()
    assert run("bench", "--input", empty) == 0
    assert capsys.readouterr().out.strip().count("\n") == 0


def test_help():
    assert run("--help") == 0


def test_every_error_has_documented_code():
    from sossched import errors

    def walk(cls):
        for sub in cls.__subclasses__():
            yield sub
            yield from walk(sub)

    classes = set(walk(errors.SosschedError))
    assert len(classes) > 20
    assert {cls.exit_code for cls in classes} <= {2, 3, 4}
