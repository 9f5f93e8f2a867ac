"""Mixed-integer models of seriation, LP emission and the external solver bridge."""
from .external import (
    ExternalSolverConfig,
    build_model,
    default_formulation,
    parse_solution,
    run_external_solver,
    solve_with_model,
)
from .formulations import (
    add_cluster_constraint,
    add_position_constraint,
    assignment_from_permutations,
    build_hpm,
    build_hpm_cross2,
    build_hpm_moore,
    build_pam,
    extract_permutations,
)
from .model import MilpModel, emit_lp, to_lp_string

__all__ = [
    "MilpModel",
    "emit_lp",
    "to_lp_string",
    "build_pam",
    "build_hpm",
    "build_hpm_moore",
    "build_hpm_cross2",
    "add_cluster_constraint",
    "add_position_constraint",
    "assignment_from_permutations",
    "extract_permutations",
    "ExternalSolverConfig",
    "build_model",
    "default_formulation",
    "parse_solution",
    "run_external_solver",
    "solve_with_model",
]
