"""Neighborhood shapes over matrix cells."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

__all__ = ["NeighborhoodSpec", "neighbors", "parse_offsets"]

_KINDS = ("epsilon", "von_neumann", "moore", "cross2", "custom")


@dataclass(frozen=True)
class NeighborhoodSpec:
    """A translation-invariant neighborhood described by its cell offsets.

    Use the constructors :meth:`von_neumann`, :meth:`moore`, :meth:`cross2`,
    :meth:`epsilon` and :meth:`custom` rather than building one directly.
    """

    kind: str
    eps: float | None = None
    custom_offsets: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown neighborhood kind {self.kind!r}")
        if self.kind == "epsilon" and (self.eps is None or self.eps <= 0):
            raise ValueError("epsilon neighborhood needs eps > 0")
        if self.kind == "custom" and (0, 0) in self.custom_offsets:
            raise ValueError("custom offsets must not contain (0, 0)")

    @classmethod
    def von_neumann(cls) -> "NeighborhoodSpec":
        return cls("von_neumann")

    @classmethod
    def moore(cls) -> "NeighborhoodSpec":
        return cls("moore")

    @classmethod
    def cross2(cls) -> "NeighborhoodSpec":
        return cls("cross2")

    @classmethod
    def epsilon(cls, eps: float) -> "NeighborhoodSpec":
        return cls("epsilon", eps=float(eps))

    @classmethod
    def custom(cls, offsets: Iterable[tuple[int, int]]) -> "NeighborhoodSpec":
        offs = tuple(sorted({(int(dr), int(dc)) for dr, dc in offsets}))
        return cls("custom", custom_offsets=offs)

    def offsets(self) -> tuple[tuple[int, int], ...]:
        """Sorted offsets ``(dr, dc)`` relative to the center cell, center excluded."""
        if self.kind == "von_neumann":
            return _ball(Fraction(1))
        if self.kind == "moore":
            return _ball(Fraction(3, 2))
        if self.kind == "epsilon":
            return _ball(Fraction(self.eps))
        if self.kind == "cross2":
            return tuple(sorted([(d, 0) for d in (-2, -1, 1, 2)] + [(0, d) for d in (-2, -1, 1, 2)]))
        return self.custom_offsets

    def offset_array(self) -> np.ndarray:
        offs = self.offsets()
        return np.array(offs, dtype=np.int64).reshape(len(offs), 2)

    def is_symmetric(self) -> bool:
        offs = set(self.offsets())
        return all((-dr, -dc) in offs for dr, dc in offs)

    def label(self) -> str:
        if self.kind == "epsilon":
            return f"epsilon({self.eps:g})"
        if self.kind == "custom":
            return "custom(" + ";".join(f"{dr},{dc}" for dr, dc in self.custom_offsets) + ")"
        return self.kind


def _ball(eps: Fraction) -> tuple[tuple[int, int], ...]:
    # exact comparison dr^2 + dc^2 <= eps^2 on rationals
    eps2 = eps * eps
    r = math.isqrt(int(eps2)) + 1
    out = []
    for dr in range(-r, r + 1):
        for dc in range(-r, r + 1):
            if (dr, dc) != (0, 0) and dr * dr + dc * dc <= eps2:
                out.append((dr, dc))
    return tuple(out)


def neighbors(spec: NeighborhoodSpec, cell: tuple[int, int], n: int, m: int) -> set[tuple[int, int]]:
    """Cells of the ``n x m`` grid neighboring ``cell``, truncated at the border."""
    i, j = cell
    if not (0 <= i < n and 0 <= j < m):
        raise ValueError(f"cell {cell} outside a {n}x{m} grid")
    return {
        (i + dr, j + dc)
        for dr, dc in spec.offsets()
        if 0 <= i + dr < n and 0 <= j + dc < m
    }


def parse_offsets(text: str) -> NeighborhoodSpec:
    """Parse ``"dr,dc;dr,dc;..."`` (or whitespace separated pairs) into a custom spec."""
    pairs = []
    for chunk in text.replace(";", " ").split():
        try:
            dr, dc = chunk.split(",")
            pairs.append((int(dr), int(dc)))
        except ValueError:
            raise ValueError(f"bad offset {chunk!r}; expected 'dr,dc'") from None
    if not pairs:
        raise ValueError("no offsets given")
    return NeighborhoodSpec.custom(pairs)
