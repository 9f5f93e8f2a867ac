"""Position-assignment (PAM) and Hamiltonian-path (HPM) model builders.

Variable names are 1-based and encode their indices, so every model has a
unique, readable LP file:

* PAM: ``x_i_k`` (row i at position k), ``y_j_l``, ``z_i_j_k_l`` (product
  linearization), ``s_k_l`` (entry at position (k, l)), ``v``/``w``/``theta``
  (first linearization) and ``nu``/``rho`` (second linearization) for the
  absolute and squared differences between neighboring positions.
* HPM: per axis family ``R`` (rows) and ``C`` (columns): ``zR_i_k`` arc
  i -> k, ``tR_i`` i is the last node, ``gR_i_k`` sequence number of the arc;
  ``h_i_k_j_l`` row-arc/column-arc products (Moore); ``uR_i`` two-ahead
  costs (cross2).
"""
from __future__ import annotations

import math

import numpy as np

from ..errors import IntegrityError, UnsupportedConstraintError
from ..matrix import Permutation, apply_permutations, as_matrix
from ..measures import Measure, StressParams
from ..weights import coordinated_merge, me_weights, moore_coupling, vn_weights
from .model import MilpModel

__all__ = [
    "build_pam",
    "build_hpm",
    "build_hpm_moore",
    "build_hpm_cross2",
    "add_cluster_constraint",
    "add_position_constraint",
    "assignment_from_permutations",
    "extract_permutations",
    "SYMMETRY_POWER_MAX",
]

SYMMETRY_POWER_MAX = 30
INTEGRALITY_TOL = 1e-4


def _nm(*parts) -> str:
    return "_".join(str(p) for p in parts)


# --------------------------------------------------------------------------
# PAM


def _neighbor_pairs(n: int, m: int, offsets) -> list[tuple[int, int, int, int]]:
    pairs = []
    for k in range(n):
        for l in range(m):
            for dr, dc in offsets:
                kk, ll = k + dr, l + dc
                if 0 <= kk < n and 0 <= ll < m:
                    pairs.append((k, l, kk, ll))
    return pairs


def _reversal_safe(offsets, coordinated: bool) -> bool:
    offs = set(offsets)
    if coordinated:
        return all((-dr, -dc) in offs for dr, dc in offs)
    return all((-dr, dc) in offs for dr, dc in offs)


def build_pam(
    a,
    params: StressParams,
    linearization: str = "L2",
    coordinated: bool = False,
    symmetry_breaking: bool = False,
) -> MilpModel:
    """Position assignment model for stress minimization on a normalized matrix.

    ``L1`` linearizes each entry as ``sum a_ij z_ijkl`` with ``z = x * y``;
    ``L2`` uses one ``s_kl`` per position with big-M 1 and the four families
    of valid inequalities. For ``p = 1`` only the absolute-value variables are
    kept; for ``p = 2`` squared differences go through quadratic constraints.
    """
    a = as_matrix(a)
    if a.min() < 0 or a.max() > 1:
        raise ValueError("PAM models need a matrix normalized to [0, 1]; call normalize() first")
    if params.p not in (1, 2):
        raise ValueError(f"PAM models support p in {{1, 2}}, got {params.p}")
    lin = linearization.upper()
    if lin not in ("L1", "L2"):
        raise ValueError(f"unknown linearization {linearization!r}")
    n, m = a.shape
    if coordinated and n != m:
        raise ValueError(f"coordinated seriation needs a square matrix, got {a.shape}")
    offsets = params.spec.offsets()

    mdl = MilpModel(name=f"pam_{lin.lower()}_{n}x{m}")
    x = [[mdl.add_var(_nm("x", i + 1, k + 1), kind="binary") for k in range(n)] for i in range(n)]
    if coordinated:
        y = x
    else:
        y = [[mdl.add_var(_nm("y", j + 1, l + 1), kind="binary") for l in range(m)] for j in range(m)]

    for i in range(n):
        mdl.add_constraint(_nm("rowpos", i + 1), {x[i][k]: 1 for k in range(n)}, "=", 1)
    for k in range(n):
        mdl.add_constraint(_nm("rowslot", k + 1), {x[i][k]: 1 for i in range(n)}, "=", 1)
    if not coordinated:
        for j in range(m):
            mdl.add_constraint(_nm("colpos", j + 1), {y[j][l]: 1 for l in range(m)}, "=", 1)
        for l in range(m):
            mdl.add_constraint(_nm("colslot", l + 1), {y[j][l]: 1 for j in range(m)}, "=", 1)

    entry: dict[tuple[int, int], dict[str, float]] = {}
    if lin == "L1":
        for i in range(n):
            for j in range(m):
                for k in range(n):
                    for l in range(m):
                        z = mdl.add_var(_nm("z", i + 1, j + 1, k + 1, l + 1), 0, 1)
                        tag = _nm(i + 1, j + 1, k + 1, l + 1)
                        mdl.add_constraint("zlo_" + tag, [(z, 1), (x[i][k], -1), (y[j][l], -1)], ">=", -1)
                        mdl.add_constraint("zx_" + tag, [(z, 1), (x[i][k], -1)], "<=", 0)
                        mdl.add_constraint("zy_" + tag, [(z, 1), (y[j][l], -1)], "<=", 0)
                        if a[i, j] != 0:
                            entry.setdefault((k, l), {})[z] = float(a[i, j])
        for k in range(n):
            for l in range(m):
                entry.setdefault((k, l), {})
        prefix_abs, prefix_sq, prefix_cell = "v", "w", "theta"
    else:
        s = [[mdl.add_var(_nm("s", k + 1, l + 1), 0, math.inf) for l in range(m)] for k in range(n)]
        rs = a.sum(axis=1)
        cs = a.sum(axis=0)
        for k in range(n):
            for l in range(m):
                for i in range(n):
                    tag = _nm(i + 1, k + 1, l + 1)
                    lo = [(s[k][l], 1), (x[i][k], -1)] + [(y[j][l], -a[i, j]) for j in range(m)]
                    mdl.add_constraint("slo_" + tag, lo, ">=", -1)
                    hi = [(s[k][l], 1), (x[i][k], 1)] + [(y[j][l], -a[i, j]) for j in range(m)]
                    mdl.add_constraint("shi_" + tag, hi, "<=", 1)
        # valid inequalities: row/column sums and the column-side big-M pair
        for k in range(n):
            terms = [(s[k][l], 1) for l in range(m)] + [(x[i][k], -rs[i]) for i in range(n)]
            mdl.add_constraint(_nm("srow", k + 1), terms, "=", 0)
        for l in range(m):
            terms = [(s[k][l], 1) for k in range(n)] + [(y[j][l], -cs[j]) for j in range(m)]
            mdl.add_constraint(_nm("scol", l + 1), terms, "=", 0)
        for k in range(n):
            for l in range(m):
                for j in range(m):
                    tag = _nm(j + 1, k + 1, l + 1)
                    lo = [(s[k][l], 1), (y[j][l], -1)] + [(x[i][k], -a[i, j]) for i in range(n)]
                    mdl.add_constraint("svlo_" + tag, lo, ">=", -1)
                    hi = [(s[k][l], 1), (y[j][l], 1)] + [(x[i][k], -a[i, j]) for i in range(n)]
                    mdl.add_constraint("svhi_" + tag, hi, "<=", 1)
                entry[(k, l)] = {s[k][l]: 1.0}
        prefix_abs, prefix_sq, prefix_cell = "nu", None, "rho"

    objective: dict[str, float] = {}
    per_cell: dict[tuple[int, int], list[str]] = {}
    for k, l, kk, ll in _neighbor_pairs(n, m, offsets):
        v = mdl.add_var(_nm(prefix_abs, k + 1, l + 1, kk + 1, ll + 1), 0, math.inf)
        diff: dict[str, float] = {}
        for var, c in entry[(k, l)].items():
            diff[var] = diff.get(var, 0.0) + c
        for var, c in entry[(kk, ll)].items():
            diff[var] = diff.get(var, 0.0) - c
        tag = _nm(k + 1, l + 1, kk + 1, ll + 1)
        mdl.add_constraint("absp_" + tag, [(v, 1)] + [(var, -c) for var, c in diff.items()], ">=", 0)
        mdl.add_constraint("absn_" + tag, [(v, 1)] + [(var, c) for var, c in diff.items()], ">=", 0)
        if params.p == 1:
            objective[v] = 1.0
        elif prefix_sq is not None:
            w = mdl.add_var(_nm(prefix_sq, k + 1, l + 1, kk + 1, ll + 1), 0, math.inf)
            mdl.add_quadratic_constraint("sq_" + tag, {w: 1.0}, {(v, v): -1.0}, ">=", 0)
            per_cell.setdefault((k, l), []).append(w)
        else:
            per_cell.setdefault((k, l), []).append(v)
    if params.p == 2:
        for (k, l), items in per_cell.items():
            cell = mdl.add_var(_nm(prefix_cell, k + 1, l + 1), 0, math.inf)
            if prefix_sq is not None:
                mdl.add_constraint(_nm("cell", k + 1, l + 1), [(cell, 1)] + [(w, -1) for w in items], ">=", 0)
            else:
                mdl.add_quadratic_constraint(
                    _nm("cone", k + 1, l + 1), {cell: 1.0}, {(v, v): -1.0 for v in items}, ">=", 0
                )
            objective[cell] = 1.0
    mdl.set_objective("minimize", objective)

    if symmetry_breaking and n >= 2:
        if not _reversal_safe(offsets, coordinated):
            raise UnsupportedConstraintError("symmetry breaking needs a neighborhood invariant under row reversal")
        if n <= SYMMETRY_POWER_MAX:
            terms = [(x[0][k], 2.0 ** (k + 1)) for k in range(n)] + [(x[1][k], -(2.0 ** (k + 1))) for k in range(n)]
            mdl.add_constraint("symbreak", terms, "<=", 0)
        else:
            # row 2 may sit in the first k positions only if row 1 sits in the first k-1
            for k in range(n):
                terms = [(x[1][q], 1) for q in range(k + 1)] + [(x[0][q], -1) for q in range(k)]
                mdl.add_constraint(_nm("symbreak", k + 1), terms, "<=", 0)

    mdl.meta.update(
        family="pam",
        formulation=f"pam-{lin.lower()}",
        n=n,
        m=m,
        coordinated=coordinated,
        measure=_measure_of(params),
        matrix=a,
    )
    return mdl


def _measure_of(params: StressParams) -> Measure:
    return Measure("custom", params.p, offsets=params.spec.offsets()).canonical()


# --------------------------------------------------------------------------
# HPM


def _add_path_family(mdl: MilpModel, tag: str, size: int) -> None:
    """Arc, terminal and arc-sequence variables plus single-path constraints."""
    z = {}
    g = {}
    t = [mdl.add_var(_nm("t" + tag, r + 1), kind="binary") for r in range(size)]
    for r in range(size):
        for s in range(size):
            if r != s:
                z[r, s] = mdl.add_var(_nm("z" + tag, r + 1, s + 1), kind="binary")
    for r in range(size):
        for s in range(size):
            if r != s:
                g[r, s] = mdl.add_var(_nm("g" + tag, r + 1, s + 1), 0, size - 1, kind="integer")
    for r in range(size):
        mdl.add_constraint(_nm("out" + tag, r + 1), [(z[r, s], 1) for s in range(size) if s != r] + [(t[r], 1)], "=", 1)
    mdl.add_constraint("last" + tag, [(v, 1) for v in t], "=", 1)
    for s in range(size):
        mdl.add_constraint(_nm("in" + tag, s + 1), [(z[r, s], 1) for r in range(size) if r != s], "<=", 1)
    for r in range(size):
        terms = [(g[r, s], 1) for s in range(size) if s != r]
        terms += [(g[s, r], -1) for s in range(size) if s != r]
        terms.append((t[r], size))
        mdl.add_constraint(_nm("flow" + tag, r + 1), terms, ">=", 1)
    for (r, s), gv in g.items():
        mdl.add_constraint(_nm("gub" + tag, r + 1, s + 1), [(gv, 1), (z[r, s], -(size - 1))], "<=", 0)
        mdl.add_constraint(_nm("glb" + tag, r + 1, s + 1), [(gv, 1), (z[r, s], -1)], ">=", 0)


def _arc_terms(tag: str, w: np.ndarray) -> dict[str, float]:
    size = w.shape[0]
    return {_nm("z" + tag, r + 1, s + 1): float(w[r, s]) for r in range(size) for s in range(size) if r != s}


def _families(a: np.ndarray, graphs, coordinated: bool):
    if coordinated:
        if a.shape[0] != a.shape[1]:
            raise ValueError(f"coordinated seriation needs a square matrix, got {a.shape}")
        return [("R", coordinated_merge(*graphs).weights)]
    return [("R", graphs[0].weights), ("C", graphs[1].weights)]


def _hpm_meta(mdl, formulation, a, coordinated, measure):
    mdl.meta.update(
        family="hpm",
        formulation=formulation,
        n=a.shape[0],
        m=a.shape[1],
        coordinated=coordinated,
        measure=measure,
        matrix=a,
    )


def build_hpm(a, measure: Measure, coordinated: bool = False) -> MilpModel:
    """Hamiltonian path model for von Neumann stress or ME (separable objectives)."""
    a = as_matrix(a)
    measure = measure.canonical()
    if measure.kind == "vn":
        graphs = vn_weights(a, measure.p)
    elif measure.kind == "me":
        graphs = me_weights(a)
    else:
        raise ValueError(f"HPM handles vn and me; got {measure.label()} (use hpm-moore, hpm-cross2 or PAM)")
    mdl = MilpModel(name=f"hpm_{measure.label()}_{a.shape[0]}x{a.shape[1]}")
    objective: dict[str, float] = {}
    for tag, w in _families(a, graphs, coordinated):
        _add_path_family(mdl, tag, w.shape[0])
        objective.update(_arc_terms(tag, w))
    mdl.set_objective(measure.sense, objective)
    _hpm_meta(mdl, "hpm", a, coordinated, measure)
    return mdl


def build_hpm_moore(a, p: float = 1, coordinated: bool = False) -> MilpModel:
    """HPM plus row-arc x column-arc products for the diagonal Moore neighbors.

    The coupling enters with coefficient 2 because each diagonal pair is
    counted from both of its cells, like every other stress term.
    """
    a = as_matrix(a)
    n, m = a.shape
    graphs = vn_weights(a, p)
    fams = _families(a, graphs, coordinated)
    mdl = MilpModel(name=f"hpm_moore_p{p:g}_{n}x{m}")
    objective: dict[str, float] = {}
    for tag, w in fams:
        _add_path_family(mdl, tag, w.shape[0])
        objective.update(_arc_terms(tag, w))
    c = moore_coupling(a, p)
    ctag = "R" if coordinated else "C"
    for i in range(n):
        for k in range(n):
            if i == k:
                continue
            for j in range(m):
                for l in range(m):
                    if j == l:
                        continue
                    h = mdl.add_var(_nm("h", i + 1, k + 1, j + 1, l + 1), kind="binary")
                    zr = _nm("zR", i + 1, k + 1)
                    zc = _nm("z" + ctag, j + 1, l + 1)
                    tag = _nm(i + 1, k + 1, j + 1, l + 1)
                    if zr == zc:
                        mdl.add_constraint("hlo_" + tag, [(h, 1), (zr, -1)], "=", 0)
                    else:
                        mdl.add_constraint("hlo_" + tag, [(h, 1), (zr, -1), (zc, -1)], ">=", -1)
                        mdl.add_constraint("hr_" + tag, [(h, 1), (zr, -1)], "<=", 0)
                        mdl.add_constraint("hc_" + tag, [(h, 1), (zc, -1)], "<=", 0)
                    if c[i, k, j, l] != 0:
                        objective[h] = 2.0 * float(c[i, k, j, l])
    mdl.set_objective("minimize", objective)
    _hpm_meta(mdl, "hpm-moore", a, coordinated, Measure.moore(p))
    return mdl


def build_hpm_cross2(a, p: float = 1, coordinated: bool = False) -> MilpModel:
    """HPM plus two-ahead costs ``u_r`` for the 2-step cross neighborhood."""
    a = as_matrix(a)
    graphs = vn_weights(a, p)
    mdl = MilpModel(name=f"hpm_cross2_p{p:g}_{a.shape[0]}x{a.shape[1]}")
    objective: dict[str, float] = {}
    for tag, w in _families(a, graphs, coordinated):
        size = w.shape[0]
        _add_path_family(mdl, tag, size)
        objective.update(_arc_terms(tag, w))
        for r in range(size):
            u = mdl.add_var(_nm("u" + tag, r + 1), 0, math.inf)
            objective[u] = 1.0
            delta = float(w[r].max(initial=0.0))
            for s in range(size):
                if s == r:
                    continue
                terms = [(u, 1.0), (_nm("z" + tag, r + 1, s + 1), -delta)]
                terms += [(_nm("z" + tag, s + 1, q + 1), -float(w[r, q])) for q in range(size) if q not in (r, s)]
                mdl.add_constraint(_nm("two" + tag, r + 1, s + 1), terms, ">=", -delta)
    mdl.set_objective("minimize", objective)
    _hpm_meta(mdl, "hpm-cross2", a, coordinated, Measure.cross2(p))
    return mdl


# --------------------------------------------------------------------------
# tailoring constraints


def _axis_tag(model: MilpModel, axis: str) -> tuple[str, int]:
    if axis not in ("row", "col"):
        raise ValueError(f"axis must be 'row' or 'col', got {axis!r}")
    if axis == "row" or model.meta["coordinated"]:
        return "R", model.meta["n"]
    return "C", model.meta["m"]


def add_cluster_constraint(model: MilpModel, cluster, kappa: int, axis: str = "row") -> None:
    """Keep the members of ``cluster`` (0-based) within ``kappa`` positions of each other.

    The rank of node i is ``sum_k g_ik + size * t_i``: the sequence number of
    its outgoing arc, or ``size`` for the last node, which has none.
    """
    if model.meta.get("family") != "hpm":
        raise UnsupportedConstraintError("cluster constraints need an HPM-family model")
    tag, size = _axis_tag(model, axis)
    members = sorted(set(int(i) for i in cluster))
    if any(not 0 <= i < size for i in members):
        raise ValueError(f"cluster indices must lie in [0, {size})")
    if not 1 <= kappa < size:
        raise ValueError(f"kappa must satisfy 1 <= kappa < {size}, got {kappa}")

    def rank(i):
        terms = [(_nm("g" + tag, i + 1, k + 1), 1.0) for k in range(size) if k != i]
        return terms + [(_nm("t" + tag, i + 1), float(size))]

    for idx, i in enumerate(members):
        for j in members[idx + 1 :]:
            ri, rj = rank(i), rank(j)
            neg = lambda ts: [(v, -c) for v, c in ts]  # noqa: E731
            base = _nm("clu" + tag, i + 1, j + 1)
            model.add_constraint(base + "_a", ri + neg(rj), "<=", kappa)
            model.add_constraint(base + "_b", rj + neg(ri), "<=", kappa)


def add_position_constraint(model: MilpModel, observations, positions, axis: str = "row") -> None:
    """Force each index in ``observations`` into one of ``positions`` (both 0-based)."""
    if model.meta.get("family") != "pam":
        raise UnsupportedConstraintError("position constraints need a PAM-family model")
    if axis not in ("row", "col"):
        raise ValueError(f"axis must be 'row' or 'col', got {axis!r}")
    size = model.meta["n"] if axis == "row" else model.meta["m"]
    obs = sorted(set(int(i) for i in observations))
    pos = sorted(set(int(k) for k in positions))
    if any(not 0 <= i < size for i in obs) or any(not 0 <= k < size for k in pos):
        raise ValueError(f"indices and positions must lie in [0, {size})")
    if len(pos) < len(obs):
        raise ValueError(f"{len(obs)} observations cannot share {len(pos)} positions")
    prefix = "x" if axis == "row" or model.meta["coordinated"] else "y"
    for i in obs:
        name = _nm("pin" + prefix, i + 1, len(model.constraints) + 1)
        model.add_constraint(name, [(_nm(prefix, i + 1, k + 1), 1) for k in pos], "=", 1)


# --------------------------------------------------------------------------
# assignments <-> permutations


def _path_family_values(tag: str, order, w: np.ndarray | None, two_ahead: bool, out: dict) -> None:
    size = len(order)
    succ = {order[q]: order[q + 1] for q in range(size - 1)}
    seq = {order[q]: q + 1 for q in range(size - 1)}
    for r in range(size):
        out[_nm("t" + tag, r + 1)] = 1.0 if r == order[-1] else 0.0
        for s in range(size):
            if r != s:
                on = succ.get(r) == s
                out[_nm("z" + tag, r + 1, s + 1)] = 1.0 if on else 0.0
                out[_nm("g" + tag, r + 1, s + 1)] = float(seq[r]) if on else 0.0
        if two_ahead:
            nxt = succ.get(succ.get(r, -1), None)
            out[_nm("u" + tag, r + 1)] = float(w[r, nxt]) if nxt is not None else 0.0


def assignment_from_permutations(model: MilpModel, row_perm: Permutation, col_perm: Permutation) -> dict:
    """Full variable assignment encoding the given reordering (tight auxiliaries)."""
    a = model.meta["matrix"]
    n, m = a.shape
    coordinated = model.meta["coordinated"]
    if coordinated and row_perm != col_perm:
        raise ValueError("coordinated model needs identical row and column permutations")
    out: dict[str, float] = {}
    if model.meta["family"] == "pam":
        rmap, cmap = row_perm.mapping, col_perm.mapping
        for i in range(n):
            for k in range(n):
                out[_nm("x", i + 1, k + 1)] = 1.0 if rmap[i] == k else 0.0
        if not coordinated:
            for j in range(m):
                for l in range(m):
                    out[_nm("y", j + 1, l + 1)] = 1.0 if cmap[j] == l else 0.0
        b = apply_permutations(a, row_perm, col_perm)
        for name in model.variables:
            head, *idx = name.split("_")
            idx = [int(q) - 1 for q in idx]
            if head == "z":
                i, j, k, l = idx
                out[name] = 1.0 if rmap[i] == k and cmap[j] == l else 0.0
            elif head == "s":
                out[name] = float(b[idx[0], idx[1]])
            elif head in ("v", "nu"):
                k, l, kk, ll = idx
                out[name] = abs(float(b[k, l] - b[kk, ll]))
            elif head == "w":
                k, l, kk, ll = idx
                out[name] = float(b[k, l] - b[kk, ll]) ** 2
        cells: dict[str, float] = {}
        for name in model.variables:
            head, *idx = name.split("_")
            if head in ("v", "nu"):
                key = _nm(idx[0], idx[1])
                cells[key] = cells.get(key, 0.0) + out[name] ** 2
        for name in model.variables:
            head, *idx = name.split("_")
            if head in ("theta", "rho"):
                out[name] = cells.get(_nm(*idx), 0.0)
        return out

    measure = model.meta["measure"]
    form = model.meta["formulation"]
    p = measure.p
    graphs = vn_weights(a, p) if measure.kind != "me" else me_weights(a)
    fams = _families(a, graphs, coordinated)
    orders = {"R": list(row_perm.order()), "C": list(col_perm.order())}
    for tag, w in fams:
        _path_family_values(tag, orders[tag], w, form == "hpm-cross2", out)
    if form == "hpm-moore":
        ro, co = orders["R"], orders["C"] if not coordinated else orders["R"]
        redges = {(ro[q], ro[q + 1]) for q in range(n - 1)}
        cedges = {(co[q], co[q + 1]) for q in range(m - 1)}
        for name in model.variables:
            head, *idx = name.split("_")
            if head == "h":
                i, k, j, l = (int(q) - 1 for q in idx)
                out[name] = 1.0 if (i, k) in redges and (j, l) in cedges else 0.0
    return out


def _follow_path(tag: str, size: int, val) -> list[int]:
    if size == 1:
        return [0]
    succ = {}
    has_in = set()
    for r in range(size):
        for s in range(size):
            if r != s and val(_nm("z" + tag, r + 1, s + 1)) == 1:
                if r in succ:
                    raise IntegrityError(f"node {r + 1} of family {tag} has two outgoing arcs")
                succ[r] = s
                has_in.add(s)
    starts = [r for r in range(size) if r not in has_in]
    if len(starts) != 1:
        raise IntegrityError(f"family {tag}: expected one start node, found {len(starts)}")
    order = [starts[0]]
    while order[-1] in succ and len(order) <= size:
        order.append(succ[order[-1]])
    if len(order) != size or len(set(order)) != size:
        raise IntegrityError(f"family {tag}: arcs do not form a Hamiltonian path")
    if val(_nm("t" + tag, order[-1] + 1)) != 1:
        raise IntegrityError(f"family {tag}: path end is not flagged as last node")
    return order


def extract_permutations(solution: dict, model: MilpModel) -> tuple[Permutation, Permutation]:
    """Decode row and column permutations from a solver's variable values."""

    def val(name: str) -> int:
        v = float(solution.get(name, 0.0))
        r = round(v)
        if abs(v - r) > INTEGRALITY_TOL or r not in (0, 1):
            raise IntegrityError(f"variable {name} = {v!r} is not binary within {INTEGRALITY_TOL}")
        return int(r)

    n, m = model.meta["n"], model.meta["m"]
    coordinated = model.meta["coordinated"]
    if model.meta["family"] == "pam":

        def decode(prefix, size):
            mapping = [-1] * size
            for i in range(size):
                hits = [k for k in range(size) if val(_nm(prefix, i + 1, k + 1)) == 1]
                if len(hits) != 1:
                    raise IntegrityError(f"{prefix}: index {i + 1} assigned to {len(hits)} positions")
                mapping[i] = hits[0]
            if len(set(mapping)) != size:
                raise IntegrityError(f"{prefix}: duplicate positions")
            return Permutation(mapping)

        rp = decode("x", n)
        cp = rp if coordinated else decode("y", m)
        return rp, cp
    rp = Permutation.from_order(_follow_path("R", n, val))
    cp = rp if coordinated else Permutation.from_order(_follow_path("C", m, val))
    return rp, cp
