"""Bridge to an external MILP solver through LP and solution files.

The solver is any command line that reads ``{model}`` and writes
``{solution}``; an optional ``{time_limit}`` placeholder receives the time
limit in seconds. Configuration comes from a JSON file::

    {"solver_command": "highs_wrapper {model} {solution}", "timeout_seconds": 600}

whose path may also be given in ``EXACTSERIATION_SOLVER_CONFIG``. Without
either, the bundled HiGHS adapter is used when ``highspy`` is importable.
"""
from __future__ import annotations

import json
import logging
import math
import os
import shlex
import shutil
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import (
    InfeasibleError,
    IntegrityError,
    NoIncumbentError,
    SolutionParseError,
    SolverCapabilityError,
    SolverConfigError,
    SolverFailedError,
)
from ..matrix import apply_permutations, as_matrix, denormalize_objective, normalize
from ..measures import Measure
from .formulations import (
    add_cluster_constraint,
    add_position_constraint,
    build_hpm,
    build_hpm_cross2,
    build_hpm_moore,
    build_pam,
    extract_permutations,
)
from .protocol import EXIT_REJECTED
from .model import MilpModel, emit_lp

__all__ = [
    "ENV_CONFIG",
    "FORMULATIONS",
    "ExternalSolverConfig",
    "SolutionFile",
    "parse_solution",
    "build_model",
    "default_formulation",
    "run_external_solver",
    "solve_with_model",
]

log = logging.getLogger(__name__)

ENV_CONFIG = "EXACTSERIATION_SOLVER_CONFIG"
FORMULATIONS = ("pam-l1", "pam-l2", "hpm", "hpm-moore", "hpm-cross2")
OBJECTIVE_TOL = 1e-6


@dataclass(frozen=True)
class ExternalSolverConfig:
    command: str
    timeout: float = 3600.0
    name: str = "external"

    def __post_init__(self):
        if "{model}" not in self.command or "{solution}" not in self.command:
            raise SolverConfigError("solver command must contain both {model} and {solution}")
        if self.timeout <= 0:
            raise SolverConfigError("solver timeout must be positive")

    @classmethod
    def from_file(cls, path) -> "ExternalSolverConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise SolverConfigError(f"cannot read solver config {path}: {exc}") from exc
        if "solver_command" not in data:
            raise SolverConfigError(f"{path}: missing key 'solver_command'")
        return cls(str(data["solver_command"]), float(data.get("timeout_seconds", 3600)), data.get("name", "external"))

    @classmethod
    def reference(cls, timeout: float = 3600.0) -> "ExternalSolverConfig":
        """The bundled HiGHS adapter run with the current interpreter."""
        cmd = f"{shlex.quote(sys.executable)} -m exactseriation.milp.highs_runner {{model}} {{solution}}"
        return cls(cmd + " --time-limit {time_limit}", timeout, "highs")

    @classmethod
    def from_env(cls) -> "ExternalSolverConfig":
        path = os.environ.get(ENV_CONFIG)
        if path:
            return cls.from_file(path)
        try:
            import highspy  # noqa: F401
        except ImportError:
            raise SolverConfigError(
                f"no external MILP solver configured: set {ENV_CONFIG} to a JSON config file"
            ) from None
        return cls.reference()


@dataclass
class SolutionFile:
    values: dict[str, float] = field(default_factory=dict)
    objective: float | None = None
    bound: float | None = None
    status: str | None = None


def parse_solution(text: str, model: MilpModel | None = None) -> SolutionFile:
    """Parse ``name value`` lines; ``#`` lines are comments.

    ``objective``, ``bound`` and ``status`` lines are recognized when they do
    not clash with a variable of the same name.
    """
    sol = SolutionFile()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SolutionParseError(f"line {lineno}: expected 'name value', got {raw!r}")
        key, value = parts
        known = model is not None and key in model.variables
        if key == "status" and not known:
            sol.status = value.lower()
            continue
        try:
            num = float(value)
        except ValueError:
            raise SolutionParseError(f"line {lineno}: non-numeric value {value!r}") from None
        if not math.isfinite(num):
            raise SolutionParseError(f"line {lineno}: non-finite value {value!r}")
        if key == "objective" and not known:
            sol.objective = num
        elif key == "bound" and not known:
            sol.bound = num
        else:
            if model is not None and key not in model.variables:
                raise SolutionParseError(f"line {lineno}: unknown variable {key!r}")
            sol.values[key] = num
    return sol


def default_formulation(measure: Measure) -> str:
    kind = measure.canonical().kind
    return {"vn": "hpm", "me": "hpm", "moore": "hpm-moore", "cross2": "hpm-cross2"}.get(kind, "pam-l2")


def build_model(a, measure: Measure, formulation: str | None = None, coordinated: bool = False,
                symmetry_breaking: bool = False) -> MilpModel:
    """Build the requested formulation; PAM models are built on the normalized matrix."""
    a = as_matrix(a)
    measure = measure.canonical()
    form = formulation or default_formulation(measure)
    if form not in FORMULATIONS:
        raise ValueError(f"unknown formulation {form!r}; choose from {', '.join(FORMULATIONS)}")
    if form.startswith("pam"):
        if not measure.is_stress:
            raise ValueError("PAM models minimize stress; use hpm for ME")
        norm, info = normalize(a)
        mdl = build_pam(norm, measure.stress_params(), form[-2:], coordinated, symmetry_breaking)
        mdl.meta["normalization"] = info
        mdl.meta["measure"] = measure
        return mdl
    if symmetry_breaking:
        log.info("symmetry breaking applies to PAM models only; ignored for %s", form)
    if form == "hpm":
        return build_hpm(a, measure, coordinated)
    want = "moore" if form == "hpm-moore" else "cross2"
    if measure.kind != want:
        raise ValueError(f"{form} optimizes {want} stress, not {measure.label()}")
    builder = build_hpm_moore if want == "moore" else build_hpm_cross2
    return builder(a, measure.p, coordinated)


def _solve_raw(model: MilpModel, config: ExternalSolverConfig, time_limit: float | None, workdir=None):
    """Run the solver on ``model``; returns permutations, objective, bound and status string."""
    own_dir = workdir is None
    wd = Path(tempfile.mkdtemp(prefix="exactseriation-") if own_dir else workdir)
    wd.mkdir(parents=True, exist_ok=True)
    model_path = wd / "model.lp"
    sol_path = wd / "solution.txt"
    emit_lp(model, model_path)
    limit = time_limit if time_limit is not None else config.timeout
    argv = [
        tok.format(model=str(model_path), solution=str(sol_path), time_limit=f"{limit:g}")
        for tok in shlex.split(config.command)
    ]
    exe = argv[0]
    if shutil.which(exe) is None and not os.path.isfile(exe):
        raise SolverConfigError(f"solver executable {exe!r} not found (model kept at {model_path})")
    timeout = config.timeout if time_limit is None else min(config.timeout, time_limit + 30.0)
    try:
        sol = _invoke(argv, timeout, sol_path, model)
    finally:
        if own_dir:
            shutil.rmtree(wd, ignore_errors=True)
    if sol.status == "infeasible":
        raise InfeasibleError("the solver proved the model infeasible")
    if sol.status == "unbounded":
        raise SolverFailedError("the solver reported an unbounded model")
    if not sol.values:
        raise NoIncumbentError(f"solver stopped ({sol.status or 'no status'}) without an incumbent")
    rp, cp = extract_permutations(sol.values, model)
    return rp, cp, sol


def _invoke(argv, timeout, sol_path: Path, model: MilpModel) -> "SolutionFile":
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout, check=False)
    except subprocess.TimeoutExpired:
        raise NoIncumbentError(f"solver exceeded {timeout:g}s without returning a solution") from None
    if proc.returncode == EXIT_REJECTED:
        raise SolverCapabilityError(f"solver rejected the model: {proc.stderr.strip()[-500:]}")
    if proc.returncode != 0:
        raise SolverFailedError(f"solver exited with code {proc.returncode}: {proc.stderr.strip()[-500:]}")
    try:
        text = sol_path.read_text()
    except OSError as exc:
        raise SolutionParseError(f"solver wrote no solution file: {exc}") from exc
    return parse_solution(text, model)


def _check_objective(reported, native, optimal: bool, sense: str) -> None:
    if reported is None:
        return
    tol = OBJECTIVE_TOL * max(1.0, abs(native))
    # auxiliaries of a non-optimal incumbent may be slack, never better than the true value
    worse = reported - native if sense == "minimize" else native - reported
    if worse < -tol or (optimal and abs(worse) > tol):
        raise IntegrityError(f"solver objective {reported!r} disagrees with native evaluation {native!r}")


def run_external_solver(model: MilpModel, config: ExternalSolverConfig | None = None, limits=None, workdir=None):
    """Solve ``model`` externally and return a SeriationResult for the model's own matrix."""
    from ..exact import Status, _finish

    config = config or ExternalSolverConfig.from_env()
    t0 = time.perf_counter()
    a = model.meta["matrix"]
    measure = model.meta["measure"]
    rp, cp, sol = _solve_raw(model, config, getattr(limits, "time_limit", None), workdir)
    native = measure.evaluate(apply_permutations(a, rp, cp))
    optimal = sol.status == "optimal"
    _check_objective(sol.objective, native, optimal, model.sense)
    status = Status.OPTIMAL if optimal else Status.FEASIBLE
    return _finish(a, measure, rp, cp, native, sol.bound, status, config.name, t0, check=False)


def solve_with_model(
    a,
    measure: Measure,
    formulation: str | None = None,
    coordinated: bool = False,
    config: ExternalSolverConfig | None = None,
    limits=None,
    symmetry_breaking: bool = False,
    clusters=(),
    pins=(),
    workdir=None,
):
    """Build, emit and externally solve a model for ``a``; results refer to the original matrix.

    ``clusters`` holds ``(axis, indices, kappa)`` and ``pins`` holds
    ``(axis, indices, positions)`` tuples, all 0-based.
    """
    from ..exact import Status, _finish

    t0 = time.perf_counter()
    config = config or ExternalSolverConfig.from_env()
    a = as_matrix(a)
    measure = measure.canonical()
    model = build_model(a, measure, formulation, coordinated, symmetry_breaking)
    for axis, idx, kappa in clusters:
        add_cluster_constraint(model, idx, kappa, axis)
    for axis, idx, pos in pins:
        add_position_constraint(model, idx, pos, axis)
    rp, cp, sol = _solve_raw(model, config, getattr(limits, "time_limit", None), workdir)
    info = model.meta.get("normalization")
    objective, bound = sol.objective, sol.bound
    if info is not None:
        if objective is not None:
            objective = denormalize_objective(objective, info, measure.p)
        if bound is not None:
            bound = denormalize_objective(bound, info, measure.p)
    native = measure.evaluate(apply_permutations(a, rp, cp))
    optimal = sol.status == "optimal"
    _check_objective(objective, native, optimal, model.sense)
    status = Status.OPTIMAL if optimal else Status.FEASIBLE
    name = f"{config.name}:{model.meta['formulation']}"
    return _finish(a, measure, rp, cp, native, bound, status, name, t0, check=False)
