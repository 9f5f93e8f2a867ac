"""Bond Energy Algorithm and 2-opt path descent."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .matrix import Permutation, apply_permutations, as_matrix
from .weights import PathGraph

__all__ = ["BeaState", "bond_energy", "bea", "insertion_order", "two_opt_path", "nearest_neighbor_order"]

log = logging.getLogger(__name__)

MAX_ALTERNATIONS = 50


@dataclass
class BeaState:
    placed: list[int]
    remaining: set[int] = field(default_factory=set)


def bond_energy(a, row_perm: Permutation, col_perm: Permutation) -> float:
    """Sum of products of vertically and horizontally adjacent entries after reordering."""
    b = apply_permutations(as_matrix(a), row_perm, col_perm)
    rows = float((b[:-1, :] * b[1:, :]).sum())
    cols = float((b[:, :-1] * b[:, 1:]).sum())
    return rows + cols


def insertion_order(bond: np.ndarray, seed: int = 0) -> list[int]:
    """Greedy BEA ordering of the items of a symmetric bond matrix.

    Starting from ``seed``, repeatedly place the (item, gap) pair with the
    largest bond gain. Ties go to the smaller item, then the smaller gap.
    """
    size = bond.shape[0]
    state = BeaState([seed], set(range(size)) - {seed})
    while state.remaining:
        best = (-np.inf, 0, 0)
        placed = state.placed
        for r in sorted(state.remaining):
            for pos in range(len(placed) + 1):
                left = placed[pos - 1] if pos > 0 else None
                right = placed[pos] if pos < len(placed) else None
                gain = 0.0
                if left is not None:
                    gain += bond[left, r]
                if right is not None:
                    gain += bond[r, right]
                if left is not None and right is not None:
                    gain -= bond[left, right]
                if gain > best[0]:
                    best = (gain, r, pos)
        _, r, pos = best
        placed.insert(pos, r)
        state.remaining.discard(r)
    return state.placed


def bea(a, seed_index: int | None = None) -> tuple[Permutation, Permutation]:
    """Bond Energy Algorithm, alternating rows and columns until nothing changes."""
    a = as_matrix(a)
    n, m = a.shape
    seed = 0 if seed_index is None else int(seed_index)
    row_perm, col_perm = Permutation.identity(n), Permutation.identity(m)
    for _ in range(MAX_ALTERNATIONS):
        b = apply_permutations(a, row_perm, col_perm)
        rb = b @ b.T
        new_rows = Permutation.from_order(row_perm.order()[insertion_order(rb, seed % n)])
        b = apply_permutations(a, new_rows, col_perm)
        cb = b.T @ b
        new_cols = Permutation.from_order(col_perm.order()[insertion_order(cb, seed % m)])
        if new_rows == row_perm and new_cols == col_perm:
            break
        row_perm, col_perm = new_rows, new_cols
    else:
        log.warning("BEA hit the alternation cap (%d)", MAX_ALTERNATIONS)
    return row_perm, col_perm


def two_opt_path(g: PathGraph, order) -> list[int]:
    """Apply improving segment reversals until none is left.

    Works in the graph's own sense: the path value never gets worse.
    """
    order = list(order)
    if sorted(order) != list(range(g.size)):
        raise ValueError("order must be a permutation of the graph nodes")
    if g.size < 3:
        return order
    return [int(v) for v in _kernels.two_opt(g.minimization_weights(), order)]


def nearest_neighbor_order(g: PathGraph, start: int = 0) -> list[int]:
    w = g.minimization_weights()
    order = [start]
    left = set(range(g.size)) - {start}
    while left:
        last = order[-1]
        nxt = min(left, key=lambda v: (w[last, v], v))
        order.append(nxt)
        left.discard(nxt)
    return order
