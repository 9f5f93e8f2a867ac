import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from exactseriation.cli import main
from exactseriation.exact import brute_force
from exactseriation.fileio import load_result_json, read_matrix_csv, write_matrix_csv
from exactseriation.measures import Measure
from conftest import HAVE_HIGHS


@pytest.fixture
def mat5(tmp_path, rng):
    path = tmp_path / "a.csv"
    a = np.round(rng.random((5, 5)), 4)
    write_matrix_csv(path, a)
    return path, a


def test_seriate_matches_oracle(tmp_path, mat5):
    path, a = mat5
    out = tmp_path / "r.json"
    assert main(["seriate", "--in", str(path), "--measure", "vn", "--p", "1", "--engine", "heldkarp", "--out", str(out)]) == 0
    doc = load_result_json(out)
    assert doc.objective == pytest.approx(brute_force(a, Measure.vn(1)).objective, abs=1e-9)
    assert doc.status == "Optimal" and doc.engine == "heldkarp"


def test_seriate_usage_errors(tmp_path, capsys):
    path = tmp_path / "r.csv"
    write_matrix_csv(path, np.arange(6.0).reshape(2, 3))
    assert main(["seriate", "--in", str(path), "--coordinated"]) == 1
    assert main(["seriate", "--in", str(path), "--cluster", "1,2:1"]) == 1
    assert main(["seriate", "--in", str(tmp_path / "missing.csv")]) == 1
    assert main(["seriate", "--in", str(path), "--measure", "eps"]) == 1
    with pytest.raises(SystemExit) as info:
        main(["seriate", "--bogus"])
    assert info.value.code == 1


def test_seriate_missing_solver_config(tmp_path, mat5, monkeypatch):
    path, _ = mat5
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"solver_command": "/nonexistent/x {model} {solution}"}))
    assert main(["seriate", "--in", str(path), "--engine", "milp", "--solver-config", str(cfg)]) == 1


def test_seriate_limits_and_heatmap(tmp_path, rng):
    path = tmp_path / "a.csv"
    write_matrix_csv(path, rng.random((12, 12)))
    out, heat = tmp_path / "r.json", tmp_path / "h.pgm"
    code = main(["seriate", "--in", str(path), "--engine", "bnb", "--node-limit", "1", "--out", str(out), "--heatmap", str(heat)])
    assert code == 0
    doc = load_result_json(out)
    assert doc.status in ("Optimal", "FeasibleWithGap")
    assert heat.read_bytes().startswith(b"P5\n12 12\n255\n") and len(heat.read_bytes()) == 13 + 144


@pytest.mark.skipif(not HAVE_HIGHS, reason="highspy not installed")
def test_seriate_infeasible_pins(tmp_path, rng):
    path = tmp_path / "a.csv"
    write_matrix_csv(path, rng.random((3, 3)))
    args = ["seriate", "--in", str(path), "--engine", "milp", "--formulation", "pam-l2", "--pin", "1:1", "--pin", "2:1"]
    assert main(args) == 2


def test_evaluate(tmp_path, mat5, capsys):
    path, a = mat5
    assert main(["evaluate", "--in", str(path)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["deviations"] == {"Dev_N": 0, "Dev_Mo": 0, "Dev_ME": 0, "Dev_Hom": 0}
    assert report["measures"]["vn_p1"] == pytest.approx(Measure.vn(1).evaluate(a))
    perm = tmp_path / "perm.txt"
    perm.write_text("5 4 3 2 1\n1,2,3,4,5\n")
    assert main(["evaluate", "--in", str(path), "--perm", str(perm)]) == 0
    assert json.loads(capsys.readouterr().out)["row_perm"] == [5, 4, 3, 2, 1]
    perm.write_text("1 1 2 3 4\n1 2 3 4 5\n")
    assert main(["evaluate", "--in", str(path), "--perm", str(perm)]) == 1


def test_generate_twice_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert main(["generate", "--family", "easy", "--n", "10", "--seed", "1", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    side = json.loads((tmp_path / "a.json").read_text())
    assert len(side["points"]["points"]) == 10
    assert main(["generate", "--family", "easy", "--n", "3", "--m", "4", "--out", str(a)]) == 1


def test_emit_model_counts(tmp_path, capsys):
    path = tmp_path / "a.csv"
    write_matrix_csv(path, np.arange(9.0).reshape(3, 3))
    out = tmp_path / "m.lp"
    assert main(["emit-model", "--in", str(path), "--out", str(out), "--formulation", "hpm"]) == 0
    text = out.read_text()
    assert text.count("zR_") and "Generals" in text and "Binaries" in text
    capsys.readouterr()
    main(["emit-model", "--in", str(path), "--out", str(out), "--formulation", "hpm"])
    msg = capsys.readouterr().out
    assert "30 variables (18 binary, 12 integer, 0 continuous)" in msg


def test_render(tmp_path):
    path = tmp_path / "b.csv"
    assert main(["generate", "--family", "bin_nonsquare", "--n", "4", "--m", "6", "--density", "0.5", "--out", str(path)]) == 0
    out = tmp_path / "b.pgm"
    assert main(["render", "--in", str(path), "--out", str(out)]) == 0
    a = read_matrix_csv(path).values
    raw = out.read_bytes()
    assert len(raw) == len(b"P5\n6 4\n255\n") + 24
    assert list(raw[-24:]) == [0 if v else 255 for v in a.ravel()]
    assert main(["render", "--in", str(path), "--out", str(tmp_path / "b.svg")]) == 0


def test_bench_small(tmp_path, capsys):
    out = tmp_path / "bench"
    code = main(["bench", "--sizes", "3,4", "--families", "easy,nsq,bin", "--densities", "0.5", "--repeats", "1",
                 "--measures", "vn,me", "--workers", "1", "--out-dir", str(out)])
    assert code == 0
    rows = list(csv.DictReader(open(out / "aggregate.csv")))
    assert {r["type"] for r in rows} == {"eas", "nsq", "bin"}
    assert all(r["status"] == "Optimal" for r in rows)
    assert list(rows[0])[:10] == ["n", "m", "type", "Dev_N", "Dev_Mo", "Dev_ME", "Dev_Hom", "runtime", "status", "gap"]
    prof = list(csv.DictReader(open(out / "performance_profile.csv")))
    assert prof and float(prof[-1]["fraction_solved"]) == 1.0
    assert len(list((out / "instances").iterdir())) == len(rows)


def test_console_script_help():
    proc = subprocess.run([sys.executable, "-m", "exactseriation.cli", "seriate", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "--engine" in proc.stdout
