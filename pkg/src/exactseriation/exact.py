"""Exact native engines and the seriation driver.

Engines:

* ``brute``      exhaustive enumeration of row/column mappings (oracle)
* ``heldkarp``   subset DP over Hamiltonian paths (second-order DP for cross2)
* ``bnb``        depth-first branch and bound on paths, resumable under limits
* ``alternating`` coordinate descent for the non-separable Moore objective
* ``milp``       emitted model solved by an external MILP solver

``auto`` picks brute when the search space is at most ``5!*5!``, else
heldkarp up to 20 nodes per axis, else bnb (Moore: alternating).
"""
from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import IntegrityError, SizeGuardError
from .heuristics import nearest_neighbor_order, two_opt_path
from .matrix import Permutation, apply_permutations, as_matrix
from .measures import Measure, deviation_report, measure_block
from .weights import PathGraph, coordinated_merge, me_weights, moore_coupling, path_value, vn_weights

__all__ = [
    "Status",
    "SolveLimits",
    "SeriationResult",
    "brute_force",
    "held_karp_path",
    "held_karp2_path",
    "branch_and_bound_path",
    "solve_separable",
    "solve_cross2",
    "solve_moore",
    "seriate",
    "BRUTE_LIMIT",
    "AUTO_BRUTE_LIMIT",
    "HELD_KARP_MAX",
    "HELD_KARP2_MAX",
]

log = logging.getLogger(__name__)

BRUTE_LIMIT = 10**7
AUTO_BRUTE_LIMIT = math.factorial(5) ** 2
HELD_KARP_MAX = 20
HELD_KARP2_MAX = 14
MOORE_MAX_PASSES = 100


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    FEASIBLE = "FeasibleWithGap"
    INFEASIBLE = "Infeasible"
    LIMIT = "LimitReached"


@dataclass(frozen=True)
class SolveLimits:
    time_limit: float | None = None
    node_limit: int | None = None

    def __post_init__(self):
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.node_limit is not None and self.node_limit <= 0:
            raise ValueError("node_limit must be positive")


@dataclass
class SeriationResult:
    row_perm: Permutation
    col_perm: Permutation
    objective: float
    bound: float | None
    status: Status
    gap: float
    measure: str
    sense: str
    solver_name: str
    runtime: float = 0.0
    measures: dict = field(default_factory=dict)
    deviations: dict = field(default_factory=dict)


def gap_of(obj: float, bound: float | None) -> float:
    if bound is None:
        return math.nan
    return abs(obj - bound) / max(1e-10, abs(obj))


def _space_size(n: int, m: int, coordinated: bool) -> int:
    return math.factorial(n) if coordinated else math.factorial(n) * math.factorial(m)


def _check_coordinated(a: np.ndarray, coordinated: bool) -> None:
    if coordinated and a.shape[0] != a.shape[1]:
        raise ValueError(f"coordinated seriation needs a square matrix, got {a.shape}")


def _finish(a, measure: Measure, row_perm, col_perm, objective, bound, status, solver, t0, check=True):
    """Re-evaluate the objective natively and attach the measure record."""
    b = apply_permutations(a, row_perm, col_perm)
    native = measure.evaluate(b)
    if check and abs(native - objective) > 1e-9 * max(1.0, abs(native)):
        raise IntegrityError(f"{solver}: objective {objective!r} but re-evaluation gives {native!r}")
    gap = 0.0 if status == Status.OPTIMAL else gap_of(native, bound)
    dev = deviation_report(a, b, measure.p if measure.is_stress else 1)
    return SeriationResult(
        row_perm=row_perm,
        col_perm=col_perm,
        objective=native,
        bound=native if status == Status.OPTIMAL else bound,
        status=status,
        gap=gap,
        measure=measure.label(),
        sense=measure.sense,
        solver_name=solver,
        runtime=time.perf_counter() - t0,
        measures=measure_block(b),
        deviations=dev.as_dict(),
    )


# --------------------------------------------------------------------------
# brute force


def brute_force(a, measure: Measure, coordinated: bool = False) -> SeriationResult:
    """Global optimum by exhaustive enumeration.

    Ties resolve to the lexicographically smallest (row mapping, column mapping).
    """
    t0 = time.perf_counter()
    a = as_matrix(a)
    _check_coordinated(a, coordinated)
    n, m = a.shape
    space = _space_size(n, m, coordinated)
    if space > BRUTE_LIMIT:
        raise SizeGuardError(f"brute force over {space} reorderings exceeds the limit of {BRUTE_LIMIT}")
    is_me = measure.kind == "me"
    offs = np.zeros((0, 2), dtype=np.int64) if is_me else measure.neighborhood().offset_array()
    value, rmap, cmap = _kernels.brute_force_search(a, offs, measure.p, is_me, coordinated)
    return _finish(a, measure, Permutation(rmap), Permutation(cmap), value, value, Status.OPTIMAL, "brute", t0)


# --------------------------------------------------------------------------
# path engines


def _normalize_direction(order: list[int]) -> list[int]:
    return order if len(order) < 2 or order[0] < order[-1] else order[::-1]


def held_karp_path(g: PathGraph) -> tuple[list[int], float]:
    """Optimal Hamiltonian path by subset dynamic programming.

    Returns the lexicographically smallest optimal node order (first < last).
    """
    if g.size > HELD_KARP_MAX:
        raise SizeGuardError(f"Held-Karp is limited to {HELD_KARP_MAX} nodes, got {g.size}")
    order = _normalize_direction(_kernels.held_karp_min(g.minimization_weights()))
    return order, path_value(g, order)


def held_karp2_path(g1: PathGraph, g2: PathGraph) -> tuple[list[int], float]:
    """Optimal path when pairs two apart also pay ``g2`` weights."""
    if g1.size > HELD_KARP2_MAX:
        raise SizeGuardError(f"second-order Held-Karp is limited to {HELD_KARP2_MAX} nodes, got {g1.size}")
    order = _normalize_direction(_kernels.held_karp2_min(g1.weights, g2.weights))
    return order, _kernels.path2_cost(g1.weights, g2.weights, order)


def _default_warm_start(g: PathGraph) -> list[int]:
    candidates = [two_opt_path(g, list(range(g.size)))]
    if g.size > 2:
        candidates.append(two_opt_path(g, nearest_neighbor_order(g)))
    w = g.minimization_weights()
    return min(candidates, key=lambda o: (_kernels.path_cost(w, o), o))


def branch_and_bound_path(
    g: PathGraph, warm=None, limits: SolveLimits | None = None, chunk: int = 20000
) -> tuple[list[int], float, float, Status]:
    """Depth-first branch and bound for an optimal Hamiltonian path.

    Returns ``(order, value, bound, status)``. ``bound`` is a valid lower
    bound when minimizing (upper bound when maximizing) even when a limit
    stops the search, in which case the status is ``LimitReached``.
    """
    if g.size < 2:
        return [0] * g.size, 0.0, 0.0, Status.OPTIMAL
    limits = limits or SolveLimits()
    warm = list(warm) if warm is not None else _default_warm_start(g)
    search = _kernels.PathSearch(g.minimization_weights(), warm)
    t0 = time.perf_counter()
    status = Status.OPTIMAL
    while not search.done:
        budget = chunk
        if limits.node_limit is not None:
            budget = min(budget, limits.node_limit - search.nodes)
        if budget <= 0:
            status = Status.LIMIT
            break
        search.run(budget)
        if search.done:
            break
        if limits.time_limit is not None and time.perf_counter() - t0 >= limits.time_limit:
            status = Status.LIMIT
            break
    order = _normalize_direction([int(v) for v in search.inc_path])
    value = path_value(g, order)
    bound = search.lower_bound() if status == Status.LIMIT else float(search.inc_val[0])
    if g.sense == "maximize":
        bound = -bound
    if status == Status.OPTIMAL:
        bound = value
    return order, value, bound, status


def _solve_path(g: PathGraph, engine: str, limits: SolveLimits | None):
    """Returns (order, value, bound, optimal?)."""
    if engine == "auto":
        engine = "heldkarp" if g.size <= HELD_KARP_MAX else "bnb"
    if engine == "heldkarp":
        order, value = held_karp_path(g)
        return order, value, value, True
    if engine == "bnb":
        order, value, bound, status = branch_and_bound_path(g, limits=limits)
        return order, value, bound, status == Status.OPTIMAL
    raise ValueError(f"unknown path engine {engine!r}")


# --------------------------------------------------------------------------
# separable objectives


def solve_separable(
    a, measure: Measure, coordinated: bool = False, engine: str = "auto", limits: SolveLimits | None = None
) -> SeriationResult:
    """Von Neumann stress or ME via one or two Hamiltonian path problems."""
    t0 = time.perf_counter()
    a = as_matrix(a)
    _check_coordinated(a, coordinated)
    measure = measure.canonical()
    if measure.kind == "vn":
        rows, cols = vn_weights(a, measure.p)
    elif measure.kind == "me":
        rows, cols = me_weights(a)
    else:
        raise ValueError(f"measure {measure.label()} is not separable into path problems")
    if coordinated:
        g = coordinated_merge(rows, cols)
        order, value, bound, optimal = _solve_path(g, engine, limits)
        row_perm = col_perm = Permutation.from_order(order)
    else:
        r_order, r_val, r_bound, r_opt = _solve_path(rows, engine, limits)
        c_order, c_val, c_bound, c_opt = _solve_path(cols, engine, limits)
        row_perm, col_perm = Permutation.from_order(r_order), Permutation.from_order(c_order)
        value, bound, optimal = r_val + c_val, r_bound + c_bound, r_opt and c_opt
    status = Status.OPTIMAL if optimal else Status.FEASIBLE
    name = {"auto": "heldkarp" if max(a.shape) <= HELD_KARP_MAX else "bnb"}.get(engine, engine)
    return _finish(a, measure, row_perm, col_perm, value, bound, status, name, t0)


def solve_cross2(a, p: float = 1, coordinated: bool = False) -> SeriationResult:
    """Two-step cross stress: separable into second-order path problems per axis."""
    t0 = time.perf_counter()
    a = as_matrix(a)
    _check_coordinated(a, coordinated)
    rows, cols = vn_weights(a, p)
    if coordinated:
        g = coordinated_merge(rows, cols)
        order, value = held_karp2_path(g, g)
        row_perm = col_perm = Permutation.from_order(order)
    else:
        r_order, r_val = held_karp2_path(rows, rows)
        c_order, c_val = held_karp2_path(cols, cols)
        row_perm, col_perm = Permutation.from_order(r_order), Permutation.from_order(c_order)
        value = r_val + c_val
    return _finish(a, Measure.cross2(p), row_perm, col_perm, value, value, Status.OPTIMAL, "heldkarp", t0)


# --------------------------------------------------------------------------
# Moore


def _moore_value(rows, cols, c, ro, co) -> float:
    total = path_value(rows, ro) + path_value(cols, co)
    if len(ro) > 1 and len(co) > 1:
        ro, co = np.asarray(ro), np.asarray(co)
        total += 2.0 * float(c[ro[:-1], ro[1:]][:, co[:-1], co[1:]].sum())
    return total


def solve_moore(
    a,
    p: float = 1,
    mode: str = "alternating",
    limits: SolveLimits | None = None,
    coordinated: bool = False,
    solver_config=None,
    warm: tuple[list[int], list[int]] | None = None,
) -> SeriationResult:
    """Moore stress seriation.

    ``exact_tiny`` enumerates; ``alternating`` fixes one axis order and solves
    the other exactly with effective weights ``omega + 2 * coupling`` until a
    full pass brings no strict improvement; ``milp_bridge`` solves the
    linearized path model externally.
    """
    t0 = time.perf_counter()
    a = as_matrix(a)
    _check_coordinated(a, coordinated)
    measure = Measure.moore(p)
    if mode == "exact_tiny":
        return brute_force(a, measure, coordinated)
    if mode == "milp_bridge":
        from .milp.external import solve_with_model

        return solve_with_model(a, measure, "hpm-moore", coordinated=coordinated, config=solver_config)
    if mode != "alternating":
        raise ValueError(f"unknown Moore mode {mode!r}")
    if coordinated:
        raise ValueError("alternating Moore descent needs independent row and column orders")

    n, m = a.shape
    rows, cols = vn_weights(a, p)
    c = moore_coupling(a, p)
    # lower bound: Moore stress >= VN stress of the same reordering >= VN optimum
    vn = solve_separable(a, Measure.vn(p), engine="auto", limits=limits)
    vn_bound = vn.bound if vn.bound is not None else 0.0
    starts = [(list(range(n)), list(range(m))), (list(vn.row_perm.order()), list(vn.col_perm.order()))]
    if warm is not None:
        starts.append((list(warm[0]), list(warm[1])))
    ro, co = min(starts, key=lambda s: _moore_value(rows, cols, c, *s))
    best = _moore_value(rows, cols, c, ro, co)
    engine = "auto"
    for _ in range(MOORE_MAX_PASSES):
        improved = False
        if m > 1:
            cw = c[:, :, np.asarray(co[:-1]), np.asarray(co[1:])].sum(axis=2)
            eff = PathGraph(rows.weights + 2.0 * cw)
            cand, _, _, _ = _solve_path(eff, engine, limits)
        else:
            cand, _, _, _ = _solve_path(rows, engine, limits)
        val = _moore_value(rows, cols, c, cand, co)
        if val < best - _kernels.tie_tol(best):
            ro, best, improved = cand, val, True
        if n > 1:
            rw = c[np.asarray(ro[:-1]), np.asarray(ro[1:])].sum(axis=0)
            eff = PathGraph(cols.weights + 2.0 * rw)
            cand, _, _, _ = _solve_path(eff, engine, limits)
        else:
            cand, _, _, _ = _solve_path(cols, engine, limits)
        val = _moore_value(rows, cols, c, ro, cand)
        if val < best - _kernels.tie_tol(best):
            co, best, improved = cand, val, True
        if not improved:
            break
    bound = min(vn_bound, best)
    status = Status.OPTIMAL if best <= bound + _kernels.tie_tol(best) else Status.FEASIBLE
    return _finish(
        a, measure, Permutation.from_order(ro), Permutation.from_order(co), best, bound, status, "alternating", t0
    )


# --------------------------------------------------------------------------
# driver


def choose_engine(shape: tuple[int, int], measure: Measure, coordinated: bool) -> str:
    n, m = shape
    if _space_size(n, m, coordinated) <= AUTO_BRUTE_LIMIT:
        return "brute"
    kind = measure.canonical().kind
    if kind in ("vn", "me"):
        return "heldkarp" if max(n, m) <= HELD_KARP_MAX else "bnb"
    if kind == "moore":
        return "alternating"
    if kind == "cross2" and max(n, m) <= HELD_KARP2_MAX:
        return "heldkarp"
    return "milp"


def seriate(
    a,
    measure: Measure,
    coordinated: bool = False,
    engine: str = "auto",
    limits: SolveLimits | None = None,
    solver_config=None,
) -> SeriationResult:
    """Optimize ``measure`` over row/column reorderings of ``a`` with the chosen engine."""
    a = as_matrix(a)
    _check_coordinated(a, coordinated)
    measure = measure.canonical()
    if engine == "auto":
        engine = choose_engine(a.shape, measure, coordinated)
        log.info("engine auto -> %s", engine)
    kind = measure.kind
    if engine == "brute":
        return brute_force(a, measure, coordinated)
    if engine == "milp":
        from .milp.external import solve_with_model

        return solve_with_model(a, measure, None, coordinated=coordinated, config=solver_config, limits=limits)
    if kind == "moore":
        if engine != "alternating":
            raise ValueError(f"engine {engine!r} cannot solve Moore stress; use brute, alternating or milp")
        return solve_moore(a, measure.p, "alternating", limits, coordinated)
    if kind == "cross2":
        if engine != "heldkarp":
            raise ValueError(f"engine {engine!r} cannot solve cross2 stress; use brute, heldkarp or milp")
        return solve_cross2(a, measure.p, coordinated)
    if kind in ("vn", "me"):
        if engine not in ("heldkarp", "bnb"):
            raise ValueError(f"engine {engine!r} cannot solve {measure.label()}; use brute, heldkarp, bnb or milp")
        return solve_separable(a, measure, coordinated, engine, limits)
    raise ValueError(f"no native exact engine for {measure.label()} beyond brute force; use milp")
