import itertools

import numpy as np
import pytest

from exactseriation.errors import IntegrityError, UnsupportedConstraintError
from exactseriation.matrix import Permutation, apply_permutations, normalize
from exactseriation.measures import Measure, StressParams
from exactseriation.milp import (
    MilpModel,
    add_cluster_constraint,
    add_position_constraint,
    assignment_from_permutations,
    build_hpm,
    build_hpm_cross2,
    build_hpm_moore,
    build_model,
    build_pam,
    emit_lp,
    extract_permutations,
    parse_solution,
)
from exactseriation.milp.model import to_lp_string
from exactseriation.errors import SolutionParseError
from exactseriation.neighborhoods import NeighborhoodSpec


def test_empty_objective_header():
    mdl = MilpModel("empty")
    mdl.add_var("x", 0, 1, kind="binary")
    text = to_lp_string(mdl)
    assert "Minimize\n obj: 0\n" in text
    assert text.rstrip().endswith("End")


def test_emit_is_deterministic(tmp_path, rng):
    a = rng.random((3, 4))
    p1, p2 = tmp_path / "a.lp", tmp_path / "b.lp"
    emit_lp(build_model(a, Measure.vn(1), "pam-l1"), p1)
    emit_lp(build_model(a, Measure.vn(1), "pam-l1"), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_model_validation():
    mdl = MilpModel("m")
    mdl.add_var("x")
    with pytest.raises(ValueError):
        mdl.add_var("x")
    with pytest.raises(ValueError):
        mdl.add_var("bad name")
    with pytest.raises(ValueError):
        mdl.add_constraint("c", {"nope": 1}, "<=", 1)


def test_pam_counts():
    a, _ = normalize(np.array([[0.0, 1], [1, 0]]))
    mdl = build_pam(a, StressParams(1, NeighborhoodSpec.von_neumann()), "L1")
    assert mdl.count("binary") == 8
    assert mdl.count(prefix="z") == 16
    coord = build_pam(np.eye(3), StressParams(1), "L2", coordinated=True)
    assert coord.count(prefix="x") == 9 and coord.count(prefix="y") == 0


def test_pam_rejects_unnormalized():
    with pytest.raises(ValueError):
        build_pam(np.array([[0.0, 3.0]]), StressParams(1), "L1")


def test_hpm_counts():
    mdl = build_hpm(np.arange(9.0).reshape(3, 3), Measure.vn(1))
    assert mdl.count() == 2 * (6 + 3 + 6)
    assert mdl.count(prefix="zR") == 6 and mdl.count(prefix="gC") == 6
    moore = build_hpm_moore(np.arange(9.0).reshape(3, 3), 1)
    assert moore.count(prefix="h") == 36


def test_symmetry_breaking_constraint_present():
    a, _ = normalize(np.arange(16.0).reshape(4, 4))
    mdl = build_pam(a, StressParams(1), "L2", symmetry_breaking=True)
    names = [c.name for c in mdl.constraints]
    assert any(name.startswith("sym") for name in names)
    custom = StressParams(1, NeighborhoodSpec.custom([(1, 0), (-1, 1)]))
    with pytest.raises(UnsupportedConstraintError):
        build_pam(a, custom, "L2", symmetry_breaking=True)


FORMS = [
    ("pam-l1", Measure.vn(1)),
    ("pam-l2", Measure.vn(1)),
    ("pam-l1", Measure.vn(2)),
    ("pam-l2", Measure.moore(2)),
    ("pam-l2", Measure.cross2(1)),
    ("pam-l1", Measure("eps", 1, eps=2)),
    ("hpm", Measure.vn(1)),
    ("hpm", Measure.vn(2)),
    ("hpm", Measure.me()),
    ("hpm-moore", Measure.moore(1)),
    ("hpm-moore", Measure.moore(2)),
    ("hpm-cross2", Measure.cross2(1)),
]


@pytest.mark.parametrize("form,measure", FORMS)
@pytest.mark.parametrize("coordinated", [False, True])
def test_model_value_equals_measure(rng, form, measure, coordinated):
    n, m = (3, 3) if coordinated else (3, 4)
    a = rng.random((n, m))
    mdl = build_model(a, measure, form, coordinated)
    info = mdl.meta.get("normalization")
    base = mdl.meta["matrix"]
    for _ in range(4):
        rp = Permutation(rng.permutation(n))
        cp = rp if coordinated else Permutation(rng.permutation(m))
        x = assignment_from_permutations(mdl, rp, cp)
        assert mdl.violations(x) == []
        value = mdl.objective_value(x)
        assert value == pytest.approx(measure.evaluate(apply_permutations(base, rp, cp)), abs=1e-9)
        if info is not None:
            assert value * info.scale**measure.p == pytest.approx(measure.evaluate(apply_permutations(a, rp, cp)))
        got = extract_permutations(x, mdl)
        assert got == (rp, cp)


def test_extract_hand_built_path():
    mdl = build_hpm(np.arange(9.0).reshape(3, 3), Measure.vn(1), coordinated=True)
    sol = {"zR_3_1": 1, "zR_1_2": 1, "tR_2": 1}
    rp, cp = extract_permutations(sol, mdl)
    assert rp.mapping.tolist() == [1, 2, 0] and cp == rp


def test_extract_identity_and_fractional():
    a, _ = normalize(np.arange(4.0).reshape(2, 2))
    mdl = build_pam(a, StressParams(1), "L2")
    sol = {f"x_{i}_{i}": 1 for i in (1, 2)} | {f"y_{j}_{j}": 1 for j in (1, 2)}
    assert extract_permutations(sol, mdl) == (Permutation.identity(2), Permutation.identity(2))
    sol = {f"x_{i}_{k}": 0.5 for i, k in itertools.product((1, 2), repeat=2)}
    with pytest.raises(IntegrityError):
        extract_permutations(sol, mdl)
    broken = {"zR_1_2": 1, "zR_2_1": 1, "tR_3": 1}
    with pytest.raises(IntegrityError):
        extract_permutations(broken, build_hpm(np.eye(3), Measure.vn(1), coordinated=True))


def test_tailoring_family_checks():
    hpm = build_hpm(np.eye(4), Measure.vn(1))
    a, _ = normalize(np.eye(4))
    pam = build_pam(a, StressParams(1), "L2")
    with pytest.raises(UnsupportedConstraintError):
        add_position_constraint(hpm, [0], [0])
    with pytest.raises(UnsupportedConstraintError):
        add_cluster_constraint(pam, [0, 1], 1)
    before = len(hpm.constraints)
    add_cluster_constraint(hpm, [2], 1)
    assert len(hpm.constraints) == before
    with pytest.raises(ValueError):
        add_position_constraint(pam, [0, 1, 2], [0, 1])


def test_cluster_constraint_respects_ranks(rng):
    a = rng.random((5, 5))
    mdl = build_hpm(a, Measure.vn(1))
    add_cluster_constraint(mdl, [0, 4], 1)
    ident = Permutation.identity(5)
    far = assignment_from_permutations(mdl, ident, ident)
    assert mdl.violations(far)
    near = Permutation.from_order([1, 2, 0, 4, 3])
    assert mdl.violations(assignment_from_permutations(mdl, near, ident)) == []


def test_position_constraint_respects_pins(rng):
    a, _ = normalize(rng.random((4, 4)))
    mdl = build_pam(a, StressParams(1), "L2")
    add_position_constraint(mdl, [1], [0], axis="col")
    ident = Permutation.identity(4)
    assert mdl.violations(assignment_from_permutations(mdl, ident, ident))
    cp = Permutation.from_order([1, 0, 2, 3])
    assert mdl.violations(assignment_from_permutations(mdl, ident, cp)) == []


def test_cross2_identical_rows_zero_u():
    a = np.tile(np.array([0.1, 0.7, 0.3]), (4, 1))
    mdl = build_hpm_cross2(a, 1)
    ident3, ident4 = Permutation.identity(3), Permutation.identity(4)
    x = assignment_from_permutations(mdl, ident4, ident3)
    assert all(v == 0 for k, v in x.items() if k.startswith("uR_"))


def test_parse_solution():
    mdl = build_hpm(np.eye(2), Measure.vn(1), coordinated=True)
    sol = parse_solution("# c\nstatus optimal\nobjective 3\nbound 2.5\nzR_1_2 1\n", mdl)
    assert sol.status == "optimal" and sol.objective == 3 and sol.bound == 2.5
    assert sol.values == {"zR_1_2": 1.0}
    for bad in ("zR_1_2\n", "zR_1_2 abc\n", "zQ 1\n", "zR_1_2 nan\n"):
        with pytest.raises(SolutionParseError):
            parse_solution(bad, mdl)


def test_build_model_errors():
    with pytest.raises(ValueError):
        build_model(np.eye(3), Measure.me(), "pam-l1")
    with pytest.raises(ValueError):
        build_model(np.eye(3), Measure.vn(1), "hpm-moore")
    with pytest.raises(ValueError):
        build_model(np.eye(3), Measure.vn(1), "qap")
