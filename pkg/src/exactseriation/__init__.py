"""Exact matrix seriation: stress and ME objectives, native exact engines and MILP models."""
from ._accel import backend
from .exact import (
    SeriationResult,
    SolveLimits,
    Status,
    branch_and_bound_path,
    brute_force,
    held_karp_path,
    seriate,
    solve_cross2,
    solve_moore,
    solve_separable,
)
from .heuristics import bea, two_opt_path
from .matrix import (
    NormalizationInfo,
    Permutation,
    apply_permutations,
    as_matrix,
    denormalize_objective,
    normalize,
    permutation_matrix,
)
from .measures import (
    Measure,
    StressParams,
    cell_stress,
    deviation_report,
    effectiveness,
    homogeneity,
    measure_block,
    total_stress,
)
from .neighborhoods import NeighborhoodSpec, neighbors
from .weights import PathGraph, coordinated_merge, me_weights, moore_coupling, vn_weights

__version__ = "0.1.0"

__all__ = [
    "backend",
    "SeriationResult",
    "SolveLimits",
    "Status",
    "branch_and_bound_path",
    "brute_force",
    "held_karp_path",
    "seriate",
    "solve_cross2",
    "solve_moore",
    "solve_separable",
    "bea",
    "two_opt_path",
    "NormalizationInfo",
    "Permutation",
    "apply_permutations",
    "as_matrix",
    "denormalize_objective",
    "normalize",
    "permutation_matrix",
    "Measure",
    "StressParams",
    "cell_stress",
    "deviation_report",
    "effectiveness",
    "homogeneity",
    "measure_block",
    "total_stress",
    "NeighborhoodSpec",
    "neighbors",
    "PathGraph",
    "coordinated_merge",
    "me_weights",
    "moore_coupling",
    "vn_weights",
]
