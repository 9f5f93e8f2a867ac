"""Grayscale heatmaps: 1 is black, 0 is white, linear in between."""
from __future__ import annotations

import os
import warnings
from html import escape

import numpy as np

from .fileio import format_float
from .matrix import as_matrix

__all__ = ["render_heatmap", "heatmap_svg", "heatmap_pgm", "gray_levels"]


def gray_levels(a) -> np.ndarray:
    """Byte intensities (255 white for 0, 0 black for 1), clamping out-of-range values."""
    a = as_matrix(a)
    if a.min() < 0 or a.max() > 1:
        warnings.warn("heatmap values outside [0, 1] were clamped; normalize the matrix first", stacklevel=3)
    v = np.clip(a, 0.0, 1.0)
    return np.rint(255.0 * (1.0 - v)).astype(np.uint8)


def heatmap_pgm(a) -> bytes:
    g = gray_levels(a)
    n, m = g.shape
    return f"P5\n{m} {n}\n255\n".encode("ascii") + g.tobytes()


def heatmap_svg(a, row_labels=None, col_labels=None, cell: int = 12) -> str:
    """One ``rect`` per cell; tooltips carry labels (or 1-based indices) and the value."""
    a = as_matrix(a)
    g = gray_levels(a)
    n, m = a.shape
    rl = row_labels if row_labels is not None else [str(i + 1) for i in range(n)]
    cl = col_labels if col_labels is not None else [str(j + 1) for j in range(m)]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{m * cell}" height="{n * cell}" '
        f'viewBox="0 0 {m * cell} {n * cell}" shape-rendering="crispEdges">'
    ]
    for i in range(n):
        for j in range(m):
            level = int(g[i, j])
            tip = escape(f"{rl[i]} / {cl[j]}: {format_float(a[i, j])}")
            out.append(
                f'<rect x="{j * cell}" y="{i * cell}" width="{cell}" height="{cell}" '
                f'fill="#{level:02x}{level:02x}{level:02x}"><title>{tip}</title></rect>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_heatmap(a, path, fmt: str | None = None, row_labels=None, col_labels=None, cell: int = 12) -> None:
    fmt = (fmt or os.path.splitext(os.fspath(path))[1].lstrip(".")).lower()
    if fmt == "svg":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(heatmap_svg(a, row_labels, col_labels, cell))
    elif fmt == "pgm":
        with open(path, "wb") as fh:
            fh.write(heatmap_pgm(a))
    else:
        raise ValueError(f"unknown heatmap format {fmt!r}; use svg or pgm")
