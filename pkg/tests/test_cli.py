import json
import subprocess
import sys
from pathlib import Path

import pytest

from couples.cli import main

GOLDEN = Path(__file__).parent / "golden"
B = {"origin": "0", "breakpoints": ["1", "3"], "values": ["0", "1"], "tail": "0"}


@pytest.fixture
def bfile(tmp_path):
    p = tmp_path / "b.json"
    p.write_text(json.dumps(B))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compute_level(capsys, bfile):
    code, out, _ = run(capsys, "compute", "level", "-f", bfile)
    assert code == 0
    assert json.loads(out) == {"origin": "0", "breakpoints": ["3"], "values": ["2/3"], "tail": "0"}


def test_compute_kprofile_csv(capsys, bfile):
    code, out, _ = run(capsys, "compute", "kprofile", "-f", bfile, "--couple", "l1tilde-linf",
                       "--csv")
    assert code == 0 and out == "t,K\n0,0\n3,3\n"


def test_compute_norm_and_star2(capsys, bfile):
    assert run(capsys, "compute", "norm", "-f", bfile, "--space", "linf-level")[1] == '"2/3"\n'
    assert run(capsys, "compute", "star2", "-f", bfile, "--x", "4")[1] == '"1/2"\n'
    code, _, err = run(capsys, "compute", "star2", "-f", bfile, "--x", "0")
    assert code == 3 and "domain error" in err


def test_compute_with_measure(capsys, tmp_path):
    mu = tmp_path / "mu.json"
    mu.write_text(json.dumps({"atoms": [{"x": "1", "w": "1/2"}, {"x": "2", "w": "1/4"},
                                        {"x": "3", "w": "1/4"}],
                              "segments": []}))
    f = tmp_path / "f.json"
    f.write_text(json.dumps({"origin": "-inf", "breakpoints": ["2", "5/2"],
                             "values": ["0", "1"], "tail": "0"}))
    code, out, _ = run(capsys, "compute", "kprofile", "-f", str(f), "--measure", str(mu))
    assert code == 0 and json.loads(out)["vertices"][-1] == ["1/4", "1/4"]


def test_malformed_inputs(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "compute", "level", "-f", str(bad))[0] == 2
    bad.write_text(json.dumps({"origin": "0", "breakpoints": ["2", "1"], "values": ["1", "1"],
                               "tail": "0"}))
    assert run(capsys, "compute", "level", "-f", str(bad))[0] == 2
    assert run(capsys, "compute", "level", "-f", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "extremal", "custom")[0] == 2


def test_verify_exit_codes(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "kfnls", "--seed", "7", "--trials", "40")
    assert code == 0 and json.loads(out)["failures"] == []
    out_file = tmp_path / "rep.json"
    assert run(capsys, "verify", "degenerate", "--kmax", "20", "--trials", "20",
               "-o", str(out_file))[0] == 0
    assert json.loads(out_file.read_text())["stats"]["k_max"] == 20


def test_verify_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("COUPLES_SEED", "3")
    code, out, _ = run(capsys, "verify", "projections", "--trials", "5")
    assert code == 0 and json.loads(out)["seed"] == 3
    monkeypatch.setenv("COUPLES_SEED", "x")
    assert run(capsys, "verify", "projections", "--trials", "5")[0] == 2


def test_verify_all_aggregates(capsys):
    code, out, _ = run(capsys, "verify", "all", "--trials", "3")
    rep = json.loads(out)
    assert code == 0 and rep["suite"] == "all" and rep["failures"] == []


@pytest.mark.parametrize("argv,golden", [
    (["extremal", "exm"], "extremal_exm.txt"),
    (["extremal", "exn", "--refine", "2"], "extremal_exn_refine2.txt"),
    (["extremal", "custom", "--g", str(GOLDEN / "a.json")], "extremal_custom_a.txt"),
])
def test_extremal_golden(capsys, argv, golden):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out == (GOLDEN / golden).read_text()


def test_extremal_json_output(capsys, tmp_path):
    target = tmp_path / "cert.json"
    code, out, _ = run(capsys, "extremal", "exm", "--json", "-o", str(target))
    assert code == 0
    doc = json.loads(out.strip().split("\n")[-1])
    assert doc["certificates"][0]["optimum"] == "9/8"
    assert json.loads(target.read_text()) == doc


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "couples", "extremal", "exm"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "optimum 9/8" in res.stdout
