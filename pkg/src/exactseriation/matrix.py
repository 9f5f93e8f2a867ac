"""Dense matrices, permutations and min-max normalization.

Matrices are plain 2-D ``float64`` numpy arrays; :func:`as_matrix` is the
single validation gate. Permutations map an original index to its position
in the reordered axis (0-based).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "as_matrix",
    "Permutation",
    "NormalizationInfo",
    "normalize",
    "denormalize_objective",
    "apply_permutations",
    "permutation_matrix",
]


def as_matrix(a) -> np.ndarray:
    """Validate ``a`` as a finite, non-empty 2-D real matrix and return a float copy."""
    arr = np.array(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"matrix must have at least one row and column, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix contains NaN or infinite entries")
    arr.setflags(write=False)
    return arr


class Permutation:
    """Bijection on ``{0, ..., size-1}``; ``mapping[i]`` is the position of index ``i``."""

    __slots__ = ("_mapping",)

    def __init__(self, mapping: Iterable[int]):
        m = np.array(list(mapping) if not isinstance(mapping, np.ndarray) else mapping, dtype=np.int64)
        if m.ndim != 1:
            raise ValueError("permutation mapping must be one-dimensional")
        if not np.array_equal(np.sort(m), np.arange(m.size)):
            raise ValueError(f"not a permutation of 0..{m.size - 1}: {m.tolist()}")
        m.setflags(write=False)
        self._mapping = m

    @classmethod
    def identity(cls, size: int) -> "Permutation":
        return cls(np.arange(size))

    @classmethod
    def from_order(cls, order: Sequence[int]) -> "Permutation":
        """Build from a sequence listing the original index found at each position."""
        order = np.asarray(order, dtype=np.int64)
        mapping = np.empty_like(order)
        mapping[order] = np.arange(order.size)
        return cls(mapping)

    @property
    def mapping(self) -> np.ndarray:
        return self._mapping

    @property
    def size(self) -> int:
        return int(self._mapping.size)

    def order(self) -> np.ndarray:
        """Original index sitting at each position (the inverse mapping)."""
        inv = np.empty_like(self._mapping)
        inv[self._mapping] = np.arange(self.size)
        return inv

    def inverse(self) -> "Permutation":
        return Permutation(self.order())

    def compose(self, first: "Permutation") -> "Permutation":
        """Return ``self ∘ first``: apply ``first``, then ``self``."""
        if first.size != self.size:
            raise ValueError("cannot compose permutations of different sizes")
        return Permutation(self._mapping[first.mapping])

    def reversed(self) -> "Permutation":
        return Permutation(self.size - 1 - self._mapping)

    def to_list(self, one_based: bool = False) -> list[int]:
        off = 1 if one_based else 0
        return [int(v) + off for v in self._mapping]

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and np.array_equal(self._mapping, other._mapping)

    def __hash__(self) -> int:
        return hash(self._mapping.tobytes())

    def __lt__(self, other: "Permutation") -> bool:
        return self.to_list() < other.to_list()

    def __repr__(self) -> str:
        return f"Permutation({self._mapping.tolist()})"


@dataclass(frozen=True)
class NormalizationInfo:
    a_min: float
    a_max: float

    @property
    def scale(self) -> float:
        return self.a_max - self.a_min


def normalize(a) -> tuple[np.ndarray, NormalizationInfo]:
    """Min-max scale ``a`` into [0, 1].

    The divisor is ``a_max - a_min``. A constant matrix maps to all zeros and
    reports ``scale == 0``. Dividing by ``a_max`` alone, with back-scaling by
    ``a_max**p``, agrees with this only when ``a_min == 0``; both bounds are
    kept in :class:`NormalizationInfo` so either convention can be rebuilt.
    """
    a = as_matrix(a)
    info = NormalizationInfo(float(a.min()), float(a.max()))
    if info.scale > 0:
        out = (a - info.a_min) / info.scale
    else:
        out = np.zeros_like(a)
    return as_matrix(out), info


def denormalize_objective(rho_tilde: float, info: NormalizationInfo, p: float) -> float:
    """Map a stress value computed on the normalized matrix back to the original scale."""
    if p not in (1, 2):
        raise ValueError(f"p must be 1 or 2, got {p}")
    return float(info.scale**p * rho_tilde)


def _check_perm(sigma: Permutation, size: int, what: str) -> None:
    if sigma.size != size:
        raise ValueError(f"{what} permutation has size {sigma.size}, matrix axis has {size}")


def apply_permutations(a, sigma_r: Permutation, sigma_c: Permutation) -> np.ndarray:
    """Reorder ``a`` so that ``out[sigma_r(i), sigma_c(j)] == a[i, j]``."""
    a = np.asarray(a, dtype=np.float64)
    _check_perm(sigma_r, a.shape[0], "row")
    _check_perm(sigma_c, a.shape[1], "column")
    return a[np.ix_(sigma_r.order(), sigma_c.order())]


def permutation_matrix(sigma: Permutation) -> np.ndarray:
    """Binary matrix ``P`` with ``P[sigma(i), i] = 1``.

    With ``P = permutation_matrix(sigma_r)`` and ``Q = permutation_matrix(sigma_c).T``,
    ``P @ A @ Q`` equals :func:`apply_permutations` ``(A, sigma_r, sigma_c)``.
    """
    p = np.zeros((sigma.size, sigma.size))
    p[sigma.mapping, np.arange(sigma.size)] = 1.0
    return p
