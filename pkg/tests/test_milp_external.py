import json
import sys

import numpy as np
import pytest

from exactseriation.errors import InfeasibleError, SolverCapabilityError, SolverConfigError, SolverFailedError
from exactseriation.exact import Status, brute_force, held_karp_path, solve_separable
from exactseriation.instances import GenSpec, generate
from exactseriation.matrix import Permutation
from exactseriation.measures import Measure
from exactseriation.milp import (
    ExternalSolverConfig,
    assignment_from_permutations,
    build_model,
    run_external_solver,
    solve_with_model,
)
from exactseriation.milp.external import ENV_CONFIG
from exactseriation.weights import vn_weights

FAKE = """
import json, shutil, sys
model, solution, canned = sys.argv[1], sys.argv[2], sys.argv[3]
shutil.copyfile(canned, solution)
"""


def fake_config(tmp_path, text, name="fake"):
    script = tmp_path / "fake_solver.py"
    script.write_text(FAKE)
    canned = tmp_path / "canned.txt"
    canned.write_text(text)
    return ExternalSolverConfig(f"{sys.executable} {script} {{model}} {{solution}} {canned}", 60, name)


def test_config_file_and_env(tmp_path, monkeypatch):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"solver_command": "s {model} {solution}", "timeout_seconds": 5}))
    cfg = ExternalSolverConfig.from_file(path)
    assert cfg.command == "s {model} {solution}" and cfg.timeout == 5
    monkeypatch.setenv(ENV_CONFIG, str(path))
    assert ExternalSolverConfig.from_env() == cfg
    path.write_text(json.dumps({"timeout_seconds": 5}))
    with pytest.raises(SolverConfigError):
        ExternalSolverConfig.from_file(path)
    with pytest.raises(SolverConfigError):
        ExternalSolverConfig("solver {model}")


def test_solver_absent_keeps_only_model(tmp_path):
    cfg = ExternalSolverConfig("/nonexistent/solver {model} {solution}", 10)
    work = tmp_path / "work"
    with pytest.raises(SolverConfigError) as info:
        solve_with_model(np.eye(3), Measure.vn(1), "hpm", config=cfg, workdir=work)
    assert sorted(p.name for p in work.iterdir()) == ["model.lp"]
    assert "model.lp" in str(info.value)


def test_fake_solver_gap(tmp_path):
    a = np.array([[0.0, 0.9, 0.2], [0.4, 0.1, 0.8], [0.5, 0.3, 0.6]])
    mdl = build_model(a, Measure.vn(1), "hpm")
    ident = Permutation.identity(3)
    x = assignment_from_permutations(mdl, ident, ident)
    obj = mdl.objective_value(x)
    bound = obj * 0.75
    body = "".join(f"{k} {v!r}\n" for k, v in x.items())
    cfg = fake_config(tmp_path, f"status time_limit\nobjective {obj!r}\nbound {bound!r}\n{body}")
    res = run_external_solver(mdl, cfg)
    assert res.status == Status.FEASIBLE
    assert res.gap == pytest.approx(abs(obj - bound) / max(1e-10, abs(obj)))
    assert res.row_perm == ident


def test_fake_solver_failures(tmp_path):
    mdl = build_model(np.eye(3), Measure.vn(1), "hpm")
    with pytest.raises(InfeasibleError):
        run_external_solver(mdl, fake_config(tmp_path, "status infeasible\n"))
    script = tmp_path / "boom.py"
    script.write_text("import sys; sys.exit(9)")
    with pytest.raises(SolverFailedError):
        run_external_solver(mdl, ExternalSolverConfig(f"{sys.executable} {script} {{model}} {{solution}}"))


def test_temp_dir_removed(tmp_path, monkeypatch):
    monkeypatch.setenv("TMPDIR", str(tmp_path))
    import tempfile

    monkeypatch.setattr(tempfile, "tempdir", None)
    mdl = build_model(np.eye(3), Measure.vn(1), "hpm")
    with pytest.raises(InfeasibleError):
        run_external_solver(mdl, fake_config(tmp_path, "status infeasible\n"))
    assert not [p for p in tmp_path.iterdir() if p.name.startswith("exactseriation-")]


# ---------------------------------------------------------------------------
# reference solver


@pytest.mark.external
@pytest.mark.parametrize("coordinated", [False, True])
def test_hpm_equals_held_karp(rng, coordinated):
    for _ in range(2):
        a = rng.random((5, 5))
        res = solve_with_model(a, Measure.vn(1), "hpm", coordinated=coordinated)
        want = solve_separable(a, Measure.vn(1), coordinated, "heldkarp")
        assert res.status == Status.OPTIMAL
        assert res.objective == pytest.approx(want.objective, abs=1e-9)


@pytest.mark.external
def test_hpm_me_matches_brute():
    a = generate(GenSpec("bin_nonsquare", 4, 5, density=0.5, seed=3))
    res = solve_with_model(a, Measure.me(), "hpm")
    assert res.objective == brute_force(a, Measure.me()).objective


@pytest.mark.external
def test_constant_matrix_moore_zero():
    res = solve_with_model(np.full((3, 3), 0.5), Measure.moore(1), "hpm-moore")
    assert res.objective == 0


@pytest.mark.external
def test_cluster_constraints():
    a = generate(GenSpec("easy", 5, seed=8))
    free = solve_with_model(a, Measure.vn(1), "hpm")
    pts_order = list(free.row_perm.order())
    lo, hi = pts_order[0], pts_order[-1]
    vacuous = solve_with_model(a, Measure.vn(1), "hpm", clusters=[("row", [lo, hi], 4)])
    assert vacuous.objective == pytest.approx(free.objective)
    tight = solve_with_model(a, Measure.vn(1), "hpm", clusters=[("row", [lo, hi], 1)])
    assert tight.objective > free.objective + 1e-9
    ranks = tight.row_perm.mapping
    assert abs(int(ranks[lo]) - int(ranks[hi])) <= 1


@pytest.mark.external
def test_position_constraints(rng):
    a = rng.random((4, 4))
    free = solve_with_model(a, Measure.vn(1), "pam-l2")
    assert free.objective == pytest.approx(brute_force(a, Measure.vn(1)).objective, abs=1e-9)
    vac = solve_with_model(a, Measure.vn(1), "pam-l2", pins=[("row", [0], [0, 1, 2, 3])])
    assert vac.objective == pytest.approx(free.objective, abs=1e-9)
    pinned = solve_with_model(a, Measure.vn(1), "pam-l2", pins=[("row", [0], [0])])
    assert pinned.objective >= free.objective - 1e-9
    assert pinned.row_perm.mapping[0] == 0
    with pytest.raises(InfeasibleError):
        solve_with_model(a, Measure.vn(1), "pam-l2", pins=[("row", [0], [0]), ("row", [1], [0])])


@pytest.mark.external
def test_symmetry_breaking_keeps_optimum(rng):
    a = rng.random((4, 4))
    off = solve_with_model(a, Measure.vn(1), "pam-l2")
    on = solve_with_model(a, Measure.vn(1), "pam-l2", symmetry_breaking=True)
    assert on.objective == pytest.approx(off.objective, abs=1e-9)


@pytest.mark.external
def test_quadratic_model_rejected():
    with pytest.raises(SolverCapabilityError):
        solve_with_model(np.eye(3), Measure.vn(2), "pam-l2")


@pytest.mark.external
def test_emitted_hpm_solves_cleanly(tmp_path):
    from exactseriation.milp import emit_lp

    a = np.arange(9.0).reshape(3, 3)
    mdl = build_model(a, Measure.vn(1), "hpm")
    emit_lp(mdl, tmp_path / "m.lp")
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    assert h.readModel(str(tmp_path / "m.lp")) == highspy.HighsStatus.kOk
    h.run()
    rows, cols = vn_weights(a, 1)
    want = held_karp_path(rows)[1] + held_karp_path(cols)[1]
    assert h.getInfo().objective_function_value == pytest.approx(want)
