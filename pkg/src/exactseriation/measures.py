"""Stress, homogeneity and Measure of Effectiveness on an already reordered matrix."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .matrix import as_matrix, normalize
from .neighborhoods import NeighborhoodSpec

__all__ = [
    "StressParams",
    "cell_stress",
    "total_stress",
    "homogeneity",
    "effectiveness",
    "DeviationReport",
    "deviation_report",
    "measure_block",
    "Measure",
    "deviation_from_values",
]


@dataclass(frozen=True)
class StressParams:
    p: float = 1
    spec: NeighborhoodSpec = field(default_factory=NeighborhoodSpec.von_neumann)

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"norm exponent must be >= 1, got {self.p}")


def _check_cell(a: np.ndarray, cell) -> tuple[int, int]:
    k, l = cell
    if not (0 <= k < a.shape[0] and 0 <= l < a.shape[1]):
        raise ValueError(f"cell {cell} outside a {a.shape[0]}x{a.shape[1]} matrix")
    return int(k), int(l)


def _pow(d, p):
    return d if p == 1 else d * d if p == 2 else d**p


def cell_stress(a, params: StressParams, cell) -> float:
    """Sum of ``|a[cell] - a[nb]|**p`` over the neighbors of ``cell``."""
    a = np.asarray(a, dtype=np.float64)
    k, l = _check_cell(a, cell)
    total = 0.0
    for dr, dc in params.spec.offsets():
        kk, ll = k + dr, l + dc
        if 0 <= kk < a.shape[0] and 0 <= ll < a.shape[1]:
            total += _pow(abs(a[k, l] - a[kk, ll]), params.p)
    return total


def total_stress(a, params: StressParams) -> float:
    """Stress summed over every cell.

    Each unordered neighbor pair is counted once from each endpoint.
    """
    a = as_matrix(a)
    return _kernels.stress_value(a, params.spec.offset_array(), params.p)


def homogeneity(a, params: StressParams) -> float:
    """Neighborhood-size-normalized mean stress; 0 for constant matrices.

    Cells without neighbors (the 1x1 case) contribute 0.
    """
    a = as_matrix(a)
    if a.min() < 0 or a.max() > 1:
        warnings.warn("homogeneity expects entries in [0, 1]; got values outside", stacklevel=2)
    n, m = a.shape
    acc = np.zeros((n, m))
    count = np.zeros((n, m))
    for dr, dc in params.spec.offsets():
        i0, i1 = max(0, -dr), min(n, n - dr)
        j0, j1 = max(0, -dc), min(m, m - dc)
        if i0 >= i1 or j0 >= j1:
            continue
        d = np.abs(a[i0:i1, j0:j1] - a[i0 + dr : i1 + dr, j0 + dc : j1 + dc])
        acc[i0:i1, j0:j1] += _pow(d, params.p)
        count[i0:i1, j0:j1] += 1
    per_cell = np.divide(acc, count, out=np.zeros_like(acc), where=count > 0)
    return float(per_cell.sum() / (n * m))


def effectiveness(a) -> float:
    """McCormick's Measure of Effectiveness.

    Each horizontally or vertically adjacent pair contributes the product of
    its entries once; cells outside the matrix count as 0.
    """
    return _kernels.me_value(as_matrix(a))


@dataclass(frozen=True)
class DeviationReport:
    dev_n: float
    dev_mo: float
    dev_me: float
    dev_hom: float

    def as_dict(self) -> dict:
        return {"Dev_N": self.dev_n, "Dev_Mo": self.dev_mo, "Dev_ME": self.dev_me, "Dev_Hom": self.dev_hom}


def _rel(before: float, after: float, larger_is_better: bool) -> float:
    if before == 0:
        return 0.0
    return (after - before) / before if larger_is_better else (before - after) / before


def measure_block(a, p: float = 1) -> dict:
    """Every reported measure of ``a``; homogeneity is taken on the min-max normalized matrix."""
    a = as_matrix(a)
    vn1 = StressParams(1, NeighborhoodSpec.von_neumann())
    vn2 = StressParams(2, NeighborhoodSpec.von_neumann())
    mo1 = StressParams(1, NeighborhoodSpec.moore())
    mo2 = StressParams(2, NeighborhoodSpec.moore())
    norm, _ = normalize(a)
    return {
        "vn_p1": total_stress(a, vn1),
        "vn_p2": total_stress(a, vn2),
        "moore_p1": total_stress(a, mo1),
        "moore_p2": total_stress(a, mo2),
        "me": effectiveness(a),
        "homogeneity": homogeneity(norm, StressParams(p, NeighborhoodSpec.von_neumann())),
    }


def deviation_report(original, reordered, p: float = 1) -> DeviationReport:
    """Relative improvements of ``reordered`` over ``original``.

    Stress and homogeneity deviations are ``(orig - new) / orig``; the ME
    deviation is ``(new - orig) / orig``. A zero denominator yields 0.
    """
    original = as_matrix(original)
    reordered = as_matrix(reordered)
    if original.shape != reordered.shape:
        raise ValueError(f"shape mismatch: {original.shape} vs {reordered.shape}")
    vn = StressParams(p, NeighborhoodSpec.von_neumann())
    mo = StressParams(p, NeighborhoodSpec.moore())
    # shared scaling so both homogeneity values see the same transform
    lo, hi = float(original.min()), float(original.max())
    scale = hi - lo if hi > lo else 1.0

    def hom(x):
        return homogeneity((x - lo) / scale, vn)

    return DeviationReport(
        dev_n=_rel(total_stress(original, vn), total_stress(reordered, vn), False),
        dev_mo=_rel(total_stress(original, mo), total_stress(reordered, mo), False),
        dev_me=_rel(effectiveness(original), effectiveness(reordered), True),
        dev_hom=_rel(hom(original), hom(reordered), False),
    )


def deviation_from_values(orig: float, new: float, larger_is_better: bool = False) -> float:
    """Relative deviation between two already computed measure values."""
    return _rel(orig, new, larger_is_better)


_MEASURE_KINDS = ("vn", "moore", "cross2", "eps", "custom", "me")


@dataclass(frozen=True)
class Measure:
    """Objective selector: a stress neighborhood with exponent ``p``, or ``me``."""

    kind: str
    p: float = 1
    eps: float | None = None
    offsets: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.kind not in _MEASURE_KINDS:
            raise ValueError(f"unknown measure {self.kind!r}; choose from {', '.join(_MEASURE_KINDS)}")
        if self.kind == "eps" and (self.eps is None or self.eps <= 0):
            raise ValueError("measure 'eps' needs a positive eps")

    @classmethod
    def vn(cls, p: float = 1) -> "Measure":
        return cls("vn", p)

    @classmethod
    def moore(cls, p: float = 1) -> "Measure":
        return cls("moore", p)

    @classmethod
    def cross2(cls, p: float = 1) -> "Measure":
        return cls("cross2", p)

    @classmethod
    def me(cls) -> "Measure":
        return cls("me", 1)

    @property
    def sense(self) -> str:
        return "maximize" if self.kind == "me" else "minimize"

    @property
    def is_stress(self) -> bool:
        return self.kind != "me"

    def neighborhood(self) -> NeighborhoodSpec:
        if self.kind == "vn":
            return NeighborhoodSpec.von_neumann()
        if self.kind == "moore":
            return NeighborhoodSpec.moore()
        if self.kind == "cross2":
            return NeighborhoodSpec.cross2()
        if self.kind == "eps":
            return NeighborhoodSpec.epsilon(self.eps)
        if self.kind == "custom":
            return NeighborhoodSpec.custom(self.offsets)
        raise ValueError("the ME measure has no stress neighborhood")

    def stress_params(self) -> StressParams:
        return StressParams(self.p, self.neighborhood())

    def canonical(self) -> "Measure":
        """Collapse ``eps``/``custom`` onto a named family when the offsets coincide."""
        if self.kind not in ("eps", "custom"):
            return self
        offs = set(self.neighborhood().offsets())
        for kind in ("vn", "moore", "cross2"):
            if offs == set(Measure(kind, self.p).neighborhood().offsets()):
                return Measure(kind, self.p)
        return self

    def evaluate(self, b) -> float:
        if self.kind == "me":
            return effectiveness(b)
        return total_stress(b, self.stress_params())

    def label(self) -> str:
        if self.kind == "me":
            return "me"
        if self.kind == "eps":
            return f"eps({self.eps:g})_p{self.p:g}"
        if self.kind == "custom":
            return self.neighborhood().label() + f"_p{self.p:g}"
        return f"{self.kind}_p{self.p:g}"
