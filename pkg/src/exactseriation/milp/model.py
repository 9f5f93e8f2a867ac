"""Solver-independent MILP/MIQCP model and LP-format writer."""
from __future__ import annotations

import io
import math
import os
import re
from dataclasses import dataclass, field
from typing import Iterable

__all__ = ["Variable", "LinearConstraint", "QuadraticConstraint", "MilpModel", "emit_lp", "to_lp_string"]

_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
_KINDS = ("continuous", "binary", "integer")
_SENSES = ("<=", "=", ">=")
_WRAP = 200


@dataclass
class Variable:
    name: str
    lb: float = 0.0
    ub: float = math.inf
    kind: str = "continuous"


@dataclass
class LinearConstraint:
    name: str
    terms: dict[str, float]
    sense: str
    rhs: float


@dataclass
class QuadraticConstraint:
    name: str
    terms: dict[str, float]
    qterms: dict[tuple[str, str], float]
    sense: str
    rhs: float


@dataclass
class MilpModel:
    """Variables, constraints and objective of a mixed-integer program.

    ``meta`` carries what the seriation layer needs to decode a solution:
    the model family, matrix dimensions, the matrix the model was built on
    and the measure it optimizes.
    """

    name: str = "seriation"
    sense: str = "minimize"
    variables: dict[str, Variable] = field(default_factory=dict)
    constraints: list[LinearConstraint] = field(default_factory=list)
    quadratic_constraints: list[QuadraticConstraint] = field(default_factory=list)
    objective: dict[str, float] = field(default_factory=dict)
    objective_quadratic: dict[tuple[str, str], float] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def add_var(self, name: str, lb: float = 0.0, ub: float = math.inf, kind: str = "continuous") -> str:
        if not _NAME_RE.match(name) or len(name) > 255:
            raise ValueError(f"invalid variable name {name!r}")
        if name in self.variables:
            raise ValueError(f"duplicate variable {name!r}")
        if kind not in _KINDS:
            raise ValueError(f"unknown variable kind {kind!r}")
        if kind == "binary":
            lb, ub = 0.0, 1.0
        self.variables[name] = Variable(name, float(lb), float(ub), kind)
        return name

    def _check_terms(self, names: Iterable[str], where: str) -> None:
        for v in names:
            if v not in self.variables:
                raise ValueError(f"{where} references undeclared variable {v!r}")

    def add_constraint(self, name: str, terms, sense: str, rhs: float) -> None:
        if sense not in _SENSES:
            raise ValueError(f"bad relation {sense!r}")
        merged: dict[str, float] = {}
        for v, c in (terms.items() if isinstance(terms, dict) else terms):
            merged[v] = merged.get(v, 0.0) + float(c)
        self._check_terms(merged, f"constraint {name}")
        self.constraints.append(LinearConstraint(name, merged, sense, float(rhs)))

    def add_quadratic_constraint(self, name: str, terms, qterms, sense: str, rhs: float) -> None:
        if sense not in _SENSES:
            raise ValueError(f"bad relation {sense!r}")
        terms = dict(terms)
        qterms = dict(qterms)
        self._check_terms(terms, f"constraint {name}")
        self._check_terms([v for pair in qterms for v in pair], f"constraint {name}")
        self.quadratic_constraints.append(QuadraticConstraint(name, terms, qterms, sense, float(rhs)))

    def set_objective(self, sense: str, terms, qterms=None) -> None:
        if sense not in ("minimize", "maximize"):
            raise ValueError(f"bad objective sense {sense!r}")
        self.sense = sense
        obj: dict[str, float] = {}
        for v, c in (terms.items() if isinstance(terms, dict) else terms):
            obj[v] = obj.get(v, 0.0) + float(c)
        self._check_terms(obj, "objective")
        self.objective = obj
        self.objective_quadratic = dict(qterms or {})
        self._check_terms([v for pair in self.objective_quadratic for v in pair], "objective")

    def count(self, kind: str | None = None, prefix: str | None = None) -> int:
        return sum(
            1
            for v in self.variables.values()
            if (kind is None or v.kind == kind) and (prefix is None or v.name.split("_")[0] == prefix)
        )

    # evaluation against a full assignment -----------------------------------

    def objective_value(self, x: dict[str, float]) -> float:
        val = sum(c * x[v] for v, c in self.objective.items())
        val += sum(c * x[u] * x[v] for (u, v), c in self.objective_quadratic.items())
        return float(val)

    def violations(self, x: dict[str, float], tol: float = 1e-7) -> list[str]:
        """Names of bounds/integrality/constraints violated by assignment ``x``."""
        bad = []
        for v in self.variables.values():
            val = x.get(v.name)
            if val is None:
                bad.append(f"unassigned:{v.name}")
                continue
            if val < v.lb - tol or val > v.ub + tol:
                bad.append(f"bound:{v.name}")
            if v.kind != "continuous" and abs(val - round(val)) > tol:
                bad.append(f"integrality:{v.name}")
        for c in self.constraints:
            lhs = sum(coef * x[v] for v, coef in c.terms.items())
            if not _holds(lhs, c.sense, c.rhs, tol):
                bad.append(c.name)
        for c in self.quadratic_constraints:
            lhs = sum(coef * x[v] for v, coef in c.terms.items())
            lhs += sum(coef * x[u] * x[v] for (u, v), coef in c.qterms.items())
            if not _holds(lhs, c.sense, c.rhs, tol):
                bad.append(c.name)
        return bad


def _holds(lhs: float, sense: str, rhs: float, tol: float) -> bool:
    scale = tol * max(1.0, abs(rhs))
    if sense == "<=":
        return lhs <= rhs + scale
    if sense == ">=":
        return lhs >= rhs - scale
    return abs(lhs - rhs) <= scale


# --------------------------------------------------------------------------
# LP writer


def _num(c: float) -> str:
    return format(c, ".17g")


def _linear(terms: dict[str, float]) -> list[str]:
    out = []
    for v, c in terms.items():
        if c == 0:
            continue
        out.append(f"{'-' if c < 0 else '+'} {_num(abs(c))} {v}")
    return out


def _quadratic(qterms: dict[tuple[str, str], float]) -> list[str]:
    out = []
    for (u, v), c in qterms.items():
        if c == 0:
            continue
        body = f"{u} ^2" if u == v else f"{u} * {v}"
        out.append(f"{'-' if c < 0 else '+'} {_num(abs(c))} {body}")
    return out


def _write_expr(buf: io.StringIO, head: str, parts: list[str], tail: str = "") -> None:
    line = head
    for part in parts:
        if len(line) + len(part) + 1 > _WRAP:
            buf.write(line + "\n")
            line = "   "
        line += " " + part
    if tail:
        if len(line) + len(tail) + 1 > _WRAP:
            buf.write(line + "\n")
            line = "   "
        line += " " + tail
    buf.write(line + "\n")


def to_lp_string(model: MilpModel) -> str:
    buf = io.StringIO()
    buf.write(f"\\ model {model.name}\n")
    buf.write("Maximize\n" if model.sense == "maximize" else "Minimize\n")
    parts = _linear(model.objective)
    q = _quadratic({k: 2 * c for k, c in model.objective_quadratic.items()})
    if q:
        parts += ["+ ["] + q + ["] / 2"]
    if not parts:
        parts = ["0"]
    _write_expr(buf, " obj:", parts)
    buf.write("Subject To\n")
    for c in model.constraints:
        parts = _linear(c.terms) or [f"0 {next(iter(model.variables))}"]
        _write_expr(buf, f" {c.name}:", parts, f"{c.sense} {_num(c.rhs)}")
    for c in model.quadratic_constraints:
        parts = _linear(c.terms) + ["+ ["] + _quadratic(c.qterms) + ["]"]
        _write_expr(buf, f" {c.name}:", parts, f"{c.sense} {_num(c.rhs)}")
    bounds = []
    generals = []
    binaries = []
    for v in model.variables.values():
        if v.kind == "binary":
            binaries.append(v.name)
            continue
        if v.kind == "integer":
            generals.append(v.name)
        if v.lb == -math.inf and v.ub == math.inf:
            bounds.append(f" {v.name} free")
        elif v.lb == 0 and v.ub == math.inf:
            continue
        elif v.ub == math.inf:
            bounds.append(f" {v.name} >= {_num(v.lb)}")
        elif v.lb == -math.inf:
            bounds.append(f" -inf <= {v.name} <= {_num(v.ub)}")
        else:
            bounds.append(f" {_num(v.lb)} <= {v.name} <= {_num(v.ub)}")
    if bounds:
        buf.write("Bounds\n" + "\n".join(bounds) + "\n")
    for title, names in (("Generals", generals), ("Binaries", binaries)):
        if names:
            buf.write(title + "\n")
            _write_expr(buf, "", names)
    buf.write("End\n")
    return buf.getvalue()


def emit_lp(model: MilpModel, destination) -> str:
    """Write ``model`` in LP format to a path or text stream; returns the text."""
    text = to_lp_string(model)
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(os.fspath(destination), "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    return text
