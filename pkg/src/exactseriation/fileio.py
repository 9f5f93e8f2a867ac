"""Matrix CSV files and self-validating JSON result documents."""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import IntegrityError, SeriationError
from .matrix import Permutation, apply_permutations, as_matrix
from .measures import Measure, measure_block

__all__ = [
    "CsvFormatError",
    "LabeledMatrix",
    "read_matrix_csv",
    "write_matrix_csv",
    "format_float",
    "ResultDocument",
    "result_document",
    "write_result_json",
    "dumps_result",
    "load_result_json",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = "1"
CHECK_TOL = 1e-9


class CsvFormatError(SeriationError, ValueError):
    """Malformed matrix CSV; the message names the offending line."""


@dataclass
class LabeledMatrix:
    values: np.ndarray
    row_labels: list[str] | None = None
    col_labels: list[str] | None = None


def _is_num(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_matrix_csv(path) -> LabeledMatrix:
    """Read a comma-separated numeric grid with optional header row and label column."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [(i, [c.strip() for c in r]) for i, r in enumerate(csv.reader(fh), 1)]
    rows = [(i, r) for i, r in rows if any(r)]
    if not rows:
        raise CsvFormatError(f"{path}: no data")
    first_line, first = rows[0]
    header = None
    if first[0] == "" or not all(_is_num(c) for c in first[1:]) or (
        not _is_num(first[0]) and len(rows) > 1 and _is_num(rows[1][1][0])
    ):
        header = first
        rows = rows[1:]
        if not rows:
            raise CsvFormatError(f"{path}: header without data rows")
    has_labels = not _is_num(rows[0][1][0])
    width = len(rows[0][1])
    body = []
    labels = []
    for lineno, r in rows:
        if len(r) != width:
            raise CsvFormatError(f"{path}, line {lineno}: expected {width} fields, found {len(r)}")
        cells = r
        if has_labels:
            labels.append(r[0])
            cells = r[1:]
        out = []
        for col, c in enumerate(cells, 2 if has_labels else 1):
            try:
                v = float(c)
            except ValueError:
                raise CsvFormatError(f"{path}, line {lineno}, field {col}: non-numeric value {c!r}") from None
            if not math.isfinite(v):
                raise CsvFormatError(f"{path}, line {lineno}, field {col}: non-finite value {c!r}")
            out.append(v)
        body.append(out)
    if not body[0]:
        raise CsvFormatError(f"{path}: no numeric columns")
    col_labels = None
    if header is not None:
        col_labels = header[1:] if has_labels else header
        if len(col_labels) != len(body[0]):
            raise CsvFormatError(f"{path}, line {first_line}: header has {len(col_labels)} names for {len(body[0])} columns")
    return LabeledMatrix(as_matrix(body), labels if has_labels else None, col_labels)


def format_float(x: float) -> str:
    """Shortest round-tripping text; integral values without a trailing '.0'."""
    x = float(x)
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def write_matrix_csv(path, a, row_labels=None, col_labels=None) -> None:
    a = as_matrix(a)
    n, m = a.shape
    if row_labels is not None and len(row_labels) != n:
        raise ValueError(f"{len(row_labels)} row labels for {n} rows")
    if col_labels is not None and len(col_labels) != m:
        raise ValueError(f"{len(col_labels)} column labels for {m} columns")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if col_labels is not None:
            w.writerow(([""] if row_labels is not None else []) + list(col_labels))
        for i in range(n):
            cells = [format_float(v) for v in a[i]]
            w.writerow(([row_labels[i]] if row_labels is not None else []) + cells)


# --------------------------------------------------------------------------
# JSON results


@dataclass
class ResultDocument:
    matrix: list[list[float]]
    measure: str
    sense: str
    coordinated: bool
    engine: str
    solver: str
    status: str
    objective: float
    bound: float | None
    gap: float | None
    row_perm: list[int]  # 1-based: row_perm[i-1] = position of original row i
    col_perm: list[int]
    measures: dict
    original_measures: dict
    deviations: dict
    row_labels: list[str] | None = None
    col_labels: list[str] | None = None
    source: str | None = None
    config: dict = field(default_factory=dict)
    runtime: float | None = None
    schema: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        n, m = len(self.matrix), len(self.matrix[0])
        out = {
            "schema": self.schema,
            "instance": {
                "source": self.source,
                "n": n,
                "m": m,
                "row_labels": self.row_labels,
                "col_labels": self.col_labels,
                "matrix": self.matrix,
            },
            "config": self.config,
            "solver": {
                "engine": self.engine,
                "name": self.solver,
                "status": self.status,
                "gap": self.gap,
            },
            "measure": self.measure,
            "sense": self.sense,
            "coordinated": self.coordinated,
            "objective": self.objective,
            "bound": self.bound,
            "row_perm": self.row_perm,
            "col_perm": self.col_perm,
            "measures": self.measures,
            "original_measures": self.original_measures,
            "deviations": self.deviations,
        }
        if self.runtime is not None:
            out["solver"]["runtime"] = self.runtime
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ResultDocument":
        inst, solver = d["instance"], d["solver"]
        return cls(
            matrix=inst["matrix"],
            measure=d["measure"],
            sense=d["sense"],
            coordinated=d["coordinated"],
            engine=solver["engine"],
            solver=solver["name"],
            status=solver["status"],
            objective=d["objective"],
            bound=d["bound"],
            gap=solver["gap"],
            row_perm=d["row_perm"],
            col_perm=d["col_perm"],
            measures=d["measures"],
            original_measures=d["original_measures"],
            deviations=d["deviations"],
            row_labels=inst.get("row_labels"),
            col_labels=inst.get("col_labels"),
            source=inst.get("source"),
            config=d.get("config", {}),
            runtime=solver.get("runtime"),
            schema=d["schema"],
        )


def result_document(a, result, engine: str, coordinated: bool, measure: Measure, **extra) -> ResultDocument:
    """Package a SeriationResult together with its input matrix."""
    a = as_matrix(a)
    nan_to_none = lambda x: None if x is None or (isinstance(x, float) and math.isnan(x)) else float(x)  # noqa: E731
    return ResultDocument(
        matrix=a.tolist(),
        measure=measure.label(),
        sense=measure.sense,
        coordinated=coordinated,
        engine=engine,
        solver=result.solver_name,
        status=result.status.value,
        objective=float(result.objective),
        bound=nan_to_none(result.bound),
        gap=nan_to_none(result.gap),
        row_perm=result.row_perm.to_list(one_based=True),
        col_perm=result.col_perm.to_list(one_based=True),
        measures=dict(result.measures),
        original_measures=measure_block(a),
        deviations=dict(result.deviations),
        **extra,
    )


def _dump(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        text = format(x, ".17g")
        return text if any(ch in text for ch in ".e") else text + ".0"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_dump(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_dump(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + _dump(v, indent + 1) for v in obj) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_result(doc: ResultDocument) -> str:
    return _dump(doc.to_dict()) + "\n"


def write_result_json(doc: ResultDocument, path) -> None:
    text = dumps_result(doc)
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _check_perm(p, size, what):
    if not isinstance(p, list) or sorted(p) != list(range(1, size + 1)):
        raise IntegrityError(f"{what} is not a 1-based permutation of length {size}")


def load_result_json(path, verify: bool = True) -> ResultDocument:
    """Load a result document; with ``verify`` the measures are recomputed and compared."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if data.get("schema") != SCHEMA_VERSION:
        raise IntegrityError(f"unsupported schema {data.get('schema')!r}")
    doc = ResultDocument.from_dict(data)
    a = as_matrix(doc.matrix)
    n, m = a.shape
    _check_perm(doc.row_perm, n, "row_perm")
    _check_perm(doc.col_perm, m, "col_perm")
    if not verify:
        return doc
    rp = Permutation([k - 1 for k in doc.row_perm])
    cp = Permutation([k - 1 for k in doc.col_perm])
    b = apply_permutations(a, rp, cp)
    fresh = measure_block(b)
    for key, val in fresh.items():
        stored = doc.measures.get(key)
        if stored is None or abs(stored - val) > CHECK_TOL * max(1.0, abs(val)):
            raise IntegrityError(f"stored {key}={stored!r} but recomputed {val!r}")
    measure = _measure_from_label(doc.measure)
    if measure is not None:
        val = measure.evaluate(b)
        if abs(doc.objective - val) > CHECK_TOL * max(1.0, abs(val)):
            raise IntegrityError(f"stored objective {doc.objective!r} but recomputed {val!r}")
    return doc


def _measure_from_label(label: str) -> Measure | None:
    if label == "me":
        return Measure.me()
    kind, _, p = label.rpartition("_p")
    if kind in ("vn", "moore", "cross2"):
        return Measure(kind, float(p))
    if kind.startswith("eps(") and kind.endswith(")"):
        return Measure("eps", float(p), eps=float(kind[4:-1]))
    return None
