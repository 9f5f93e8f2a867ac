"""Seeded synthetic instances: distance matrices of random points and Bernoulli binary matrices.

Randomness comes from a small portable generator so that a seed reproduces
the same matrix bit for bit in any language:

* seeding: splitmix64 (increment 0x9E3779B97F4A7C15, multipliers
  0xBF58476D1CE4E5B9 and 0x94D049BB133111EB, shifts 30/27/31) expands the
  64-bit seed into the four state words;
* stream: xoshiro256** (output ``rotl(s1 * 5, 7) * 9``, state shift 17,
  rotation 45);
* uniform doubles: ``(x >> 11) * 2**-53``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

__all__ = ["GenSpec", "Xoshiro256", "FAMILIES", "DENSITIES", "generate", "generate_with_points", "sidecar"]

FAMILIES = ("easy", "sqr", "nsq", "bin_square", "bin_nonsquare")
DENSITIES = (0.25, 0.5, 0.75)
COORD_MAX = 100.0

_MASK = (1 << 64) - 1
GENERATOR_CONSTANTS = {
    "name": "xoshiro256** seeded by splitmix64",
    "splitmix64_increment": "0x9E3779B97F4A7C15",
    "splitmix64_mul1": "0xBF58476D1CE4E5B9",
    "splitmix64_mul2": "0x94D049BB133111EB",
    "splitmix64_shifts": [30, 27, 31],
    "xoshiro_output": "rotl(s1 * 5, 7) * 9",
    "xoshiro_shift": 17,
    "xoshiro_rotation": 45,
    "double": "(x >> 11) * 2^-53",
}


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


class Xoshiro256:
    """xoshiro256** with splitmix64 seeding."""

    def __init__(self, seed: int):
        z = seed & _MASK
        state = []
        for _ in range(4):
            z = (z + 0x9E3779B97F4A7C15) & _MASK
            x = z
            x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
            x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
            state.append(x ^ (x >> 31))
        self.s = state

    def next_u64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & _MASK, 7) * 9) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, count: int, high: float = 1.0) -> np.ndarray:
        return np.array([self.random() * high for _ in range(count)], dtype=np.float64)


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int
    m: int | None = None
    density: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        m = self.n if self.m is None else self.m
        object.__setattr__(self, "m", m)
        if self.n < 1 or m < 1:
            raise ValueError("sizes must be positive")
        if self.family in ("easy", "sqr", "bin_square") and self.n != m:
            raise ValueError(f"family {self.family} needs n == m, got {self.n}x{m}")
        if self.family in ("nsq", "bin_nonsquare") and not self.n < m:
            raise ValueError(f"family {self.family} needs n < m, got {self.n}x{m}")
        binary = self.family.startswith("bin")
        if binary and self.density not in DENSITIES:
            raise ValueError(f"binary families need density in {DENSITIES}, got {self.density}")
        if not binary and self.density is not None:
            raise ValueError(f"family {self.family} takes no density")
        if not 0 <= self.seed <= _MASK:
            raise ValueError("seed must be an unsigned 64-bit integer")


def _planar(rng: Xoshiro256, count: int) -> np.ndarray:
    return rng.uniform(2 * count, COORD_MAX).reshape(count, 2)


def _cross(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.sqrt(((p[:, None, :] - q[None, :, :]) ** 2).sum(axis=2))


def generate_with_points(spec: GenSpec) -> tuple[np.ndarray, dict | None]:
    """Matrix plus the generating points (``None`` for binary families)."""
    rng = Xoshiro256(spec.seed)
    n, m = spec.n, spec.m
    if spec.family == "easy":
        pts = rng.uniform(n, COORD_MAX)
        return np.abs(pts[:, None] - pts[None, :]), {"points": pts.tolist()}
    if spec.family == "sqr":
        pts = _planar(rng, n)
        return _cross(pts, pts), {"points": pts.tolist()}
    if spec.family == "nsq":
        rows = _planar(rng, n)
        cols = _planar(rng, m)
        return _cross(rows, cols), {"row_points": rows.tolist(), "col_points": cols.tolist()}
    draws = rng.uniform(n * m).reshape(n, m)
    return (draws < spec.density).astype(np.float64), None


def generate(spec: GenSpec) -> np.ndarray:
    return generate_with_points(spec)[0]


def sidecar(spec: GenSpec, points: dict | None) -> dict:
    """JSON-ready record of the spec, generator constants and generating points."""
    out = {"spec": asdict(spec), "generator": GENERATOR_CONSTANTS}
    if points is not None:
        out["points"] = points
    return out


def binomial_band(n_cells: int, p: float, z: float = 3.3) -> tuple[float, float]:
    """Two-sided band holding the fraction of ones with probability about 0.999."""
    half = z * math.sqrt(p * (1 - p) / n_cells)
    return p - half, p + half
