"""Edge weights turning separable seriation objectives into Hamiltonian path problems."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .matrix import as_matrix

__all__ = [
    "PathGraph",
    "vn_weights",
    "me_weights",
    "moore_coupling",
    "coordinated_merge",
    "path_value",
    "moore_path_value",
]


@dataclass(frozen=True, eq=False)
class PathGraph:
    """Complete undirected graph with symmetric weights and an optimization sense."""

    weights: np.ndarray
    sense: str = "minimize"

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weights must be square, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if not np.allclose(w, w.T, rtol=0, atol=1e-12 * max(1.0, float(np.abs(w).max(initial=0)))):
            raise ValueError("weights must be symmetric")
        if np.any(np.diag(w) != 0):
            raise ValueError("weights must have a zero diagonal")
        if self.sense not in ("minimize", "maximize"):
            raise ValueError(f"sense must be 'minimize' or 'maximize', got {self.sense!r}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    def minimization_weights(self) -> np.ndarray:
        """Weights to hand to a minimizing engine (negated when maximizing)."""
        return self.weights if self.sense == "minimize" else -self.weights


def _pairwise_lp(x: np.ndarray, p: float) -> np.ndarray:
    # out[i, k] = sum_j |x[i, j] - x[k, j]|^p
    d = np.abs(x[:, None, :] - x[None, :, :])
    if p == 1:
        return d.sum(axis=2)
    if p == 2:
        return (d * d).sum(axis=2)
    return (d**p).sum(axis=2)


def vn_weights(a, p: float = 1) -> tuple[PathGraph, PathGraph]:
    """Row and column graphs whose path weights sum to the von Neumann stress."""
    a = as_matrix(a)
    omega = 2.0 * _pairwise_lp(a, p)
    tau = 2.0 * _pairwise_lp(a.T, p)
    return PathGraph(omega), PathGraph(tau)


def me_weights(a) -> tuple[PathGraph, PathGraph]:
    """Row and column graphs whose path weights sum to the Measure of Effectiveness."""
    a = as_matrix(a)
    omega = a @ a.T
    tau = a.T @ a
    np.fill_diagonal(omega, 0.0)
    np.fill_diagonal(tau, 0.0)
    return PathGraph(omega, "maximize"), PathGraph(tau, "maximize")


def moore_coupling(a, p: float = 1) -> np.ndarray:
    """Diagonal-neighbor costs ``c[i, k, j, l] = |a_ij - a_kl|^p + |a_il - a_kj|^p``.

    When rows ``i, k`` and columns ``j, l`` are adjacent in the reordering, the
    two diagonal pairs of the 2x2 block they span contribute ``c[i, k, j, l]``
    (counted once per unordered pair). Entries with ``i == k`` or ``j == l``
    are set to zero.
    """
    a = as_matrix(a)
    n, m = a.shape
    x = a[:, None, :, None]  # a_ij
    y = a[None, :, None, :]  # a_kl
    d1 = np.abs(x - y)
    d2 = np.abs(a[:, None, None, :] - a[None, :, :, None])  # |a_il - a_kj|
    if p == 1:
        c = d1 + d2
    elif p == 2:
        c = d1 * d1 + d2 * d2
    else:
        c = d1**p + d2**p
    c[np.arange(n), np.arange(n)] = 0.0
    c[:, :, np.arange(m), np.arange(m)] = 0.0
    return c


def coordinated_merge(g1: PathGraph, g2: PathGraph) -> PathGraph:
    """Single graph for a shared row/column order: weights add."""
    if g1.size != g2.size:
        raise ValueError(f"graph sizes differ: {g1.size} vs {g2.size}")
    if g1.sense != g2.sense:
        raise ValueError(f"graph senses differ: {g1.sense} vs {g2.sense}")
    return PathGraph(g1.weights + g2.weights, g1.sense)


def path_value(g: PathGraph, order) -> float:
    return _kernels.path_cost(g.weights, order)


def moore_path_value(a, p, row_order, col_order) -> float:
    """Moore stress of the reordering given by two node orders, via path weights.

    ``VN rows + VN cols + 2 * sum over (row edge, column edge) of coupling``.
    """
    rows, cols = vn_weights(a, p)
    c = moore_coupling(a, p)
    ro = np.asarray(row_order)
    co = np.asarray(col_order)
    total = path_value(rows, ro) + path_value(cols, co)
    if ro.size > 1 and co.size > 1:
        block = c[ro[:-1], ro[1:]][:, co[:-1], co[1:]]
        total += 2.0 * float(block.sum())
    return total
