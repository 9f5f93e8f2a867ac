"""Command-line interface.

Exit codes: 0 success (Optimal or FeasibleWithGap), 1 usage or configuration
error, 2 infeasible model, 3 limit reached without any incumbent.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import InfeasibleError, NoIncumbentError, SeriationError
from .exact import AUTO_BRUTE_LIMIT, HELD_KARP_MAX, SolveLimits, Status, choose_engine, seriate
from .fileio import (
    _dump,
    read_matrix_csv,
    result_document,
    write_matrix_csv,
    write_result_json,
)
from .instances import DENSITIES, GenSpec, generate_with_points, sidecar
from .matrix import Permutation, apply_permutations, normalize
from .measures import Measure, deviation_report, measure_block
from .neighborhoods import parse_offsets

log = logging.getLogger("exactseriation")

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_NO_INCUMBENT = 0, 1, 2, 3
ENGINES = ("auto", "brute", "heldkarp", "bnb", "milp", "alternating")
FORMULATION_CHOICES = ("pam-l1", "pam-l2", "hpm", "hpm-moore", "hpm-cross2")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    subcommand: str
    measure: str = "vn"
    p: float = 1
    eps: float | None = None
    offsets: str | None = None
    coordinated: bool = False
    engine: str = "auto"
    time_limit: float | None = None
    node_limit: int | None = None
    formulation: str | None = None
    solver_config: str | None = None
    input: str | None = None
    output: str | None = None
    seed: int | None = None
    extra: dict = field(default_factory=dict)


# --------------------------------------------------------------------------
# argument helpers


def _measure(args) -> Measure:
    if args.offsets:
        if args.measure not in ("vn", "custom"):
            raise UsageError("--offsets defines a custom neighborhood; do not combine with --measure " + args.measure)
        spec = parse_offsets(args.offsets)
        return Measure("custom", args.p, offsets=spec.offsets())
    if args.measure == "eps":
        if args.eps is None:
            raise UsageError("--measure eps needs --eps")
        return Measure("eps", args.p, eps=args.eps)
    if args.eps is not None:
        raise UsageError("--eps only applies to --measure eps")
    if args.measure == "me":
        return Measure.me()
    return Measure(args.measure, args.p)


def _index_list(text: str, what: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out or min(out) < 1:
        raise UsageError(f"{what}: expected 1-based indices, got {text!r}")
    return [i - 1 for i in out]


def _clusters(args) -> list:
    out = []
    for axis, items in (("row", args.cluster or []), ("col", args.col_cluster or [])):
        for item in items:
            members, sep, kappa = item.rpartition(":")
            if not sep:
                raise UsageError(f"cluster {item!r}: expected 'i,j,...:kappa'")
            out.append((axis, _index_list(members, "cluster"), int(kappa)))
    return out


def _pins(args) -> list:
    out = []
    for axis, items in (("row", args.pin or []), ("col", args.col_pin or [])):
        for item in items:
            obs, sep, pos = item.partition(":")
            if not sep:
                raise UsageError(f"pin {item!r}: expected 'i:pos-set'")
            out.append((axis, _index_list(obs, "pin"), _index_list(pos, "pin positions")))
    return out


def _solver_config(args):
    if not getattr(args, "solver_config", None):
        return None
    from .milp.external import ExternalSolverConfig

    return ExternalSolverConfig.from_file(args.solver_config)


def _read(path):
    if not path:
        raise UsageError("--in is required")
    return read_matrix_csv(path)


def _read_perm_file(path, n, m):
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".json"):
        data = json.loads(text)
        rows, cols = data["row_perm"], data["col_perm"]
    else:
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if len(lines) != 2:
            raise UsageError(f"{path}: expected two lines (row and column permutation)")
        rows, cols = ([int(t) for t in ln.replace(",", " ").split()] for ln in lines)
    if sorted(rows) != list(range(1, n + 1)) or sorted(cols) != list(range(1, m + 1)):
        raise UsageError(f"{path}: permutations must be 1-based of lengths {n} and {m}")
    return Permutation([r - 1 for r in rows]), Permutation([c - 1 for c in cols])


# --------------------------------------------------------------------------
# subcommands


def cmd_seriate(args) -> int:
    data = _read(args.input)
    a = data.values
    measure = _measure(args)
    if args.coordinated and a.shape[0] != a.shape[1]:
        raise UsageError(f"--coordinated needs a square matrix, got {a.shape[0]}x{a.shape[1]}")
    limits = None
    if args.time_limit is not None or args.node_limit is not None:
        limits = SolveLimits(args.time_limit, args.node_limit)
    engine = args.engine
    resolved = choose_engine(a.shape, measure.canonical(), args.coordinated) if engine == "auto" else engine
    clusters, pins = _clusters(args), _pins(args)
    if (clusters or pins or args.formulation or args.symmetry_breaking) and resolved != "milp":
        raise UsageError("--formulation, --cluster, --pin and --symmetry-breaking need --engine milp")
    if resolved == "milp":
        from .milp.external import solve_with_model

        result = solve_with_model(
            a,
            measure,
            args.formulation,
            coordinated=args.coordinated,
            config=_solver_config(args),
            limits=limits,
            symmetry_breaking=args.symmetry_breaking,
            clusters=clusters,
            pins=pins,
        )
    else:
        result = seriate(a, measure, args.coordinated, resolved, limits)
    if result.status == Status.LIMIT:
        return EXIT_NO_INCUMBENT
    cfg = RunConfig(
        "seriate",
        measure.kind,
        measure.p,
        measure.eps,
        args.offsets,
        args.coordinated,
        engine,
        args.time_limit,
        args.node_limit,
        args.formulation,
        args.solver_config,
        args.input,
        args.out,
        extra={"clusters": [[ax, [i + 1 for i in idx], k] for ax, idx, k in clusters],
               "pins": [[ax, [i + 1 for i in idx], [q + 1 for q in pos]] for ax, idx, pos in pins]},
    )
    doc = result_document(
        a,
        result,
        resolved,
        args.coordinated,
        measure.canonical(),
        row_labels=data.row_labels,
        col_labels=data.col_labels,
        source=args.input,
        config=asdict(cfg),
        runtime=result.runtime if args.record_runtime else None,
    )
    if args.out:
        write_result_json(doc, args.out)
    if args.heatmap:
        from .render import render_heatmap

        b = apply_permutations(a, result.row_perm, result.col_perm)
        rl = [data.row_labels[i] for i in result.row_perm.order()] if data.row_labels else None
        cl = [data.col_labels[j] for j in result.col_perm.order()] if data.col_labels else None
        render_heatmap(normalize(b)[0], args.heatmap, row_labels=rl, col_labels=cl)
    gap = "" if result.status == Status.OPTIMAL else f" gap={result.gap:.3g}"
    print(f"{measure.label()} {result.status.value} objective={result.objective:.17g}{gap} engine={resolved}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    data = _read(args.input)
    a = data.values
    n, m = a.shape
    if args.perm:
        rp, cp = _read_perm_file(args.perm, n, m)
    else:
        rp, cp = Permutation.identity(n), Permutation.identity(m)
    b = apply_permutations(a, rp, cp)
    report = {
        "n": n,
        "m": m,
        "p": args.p,
        "row_perm": rp.to_list(one_based=True),
        "col_perm": cp.to_list(one_based=True),
        "measures": measure_block(b, args.p),
        "original_measures": measure_block(a, args.p),
        "deviations": deviation_report(a, b, args.p).as_dict(),
    }
    text = _dump(report) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_generate(args) -> int:
    spec = GenSpec(args.family, args.n, args.m, args.density, args.seed)
    a, points = generate_with_points(spec)
    write_matrix_csv(args.out, a)
    side = args.sidecar or str(Path(args.out).with_suffix(".json"))
    Path(side).write_text(_dump(sidecar(spec, points)) + "\n", encoding="utf-8")
    print(f"wrote {args.out} ({spec.n}x{spec.m}) and {side}")
    return EXIT_OK


def cmd_emit_model(args) -> int:
    from .milp.external import build_model
    from .milp.formulations import add_cluster_constraint, add_position_constraint
    from .milp.model import emit_lp

    a = _read(args.input).values
    measure = _measure(args)
    if args.coordinated and a.shape[0] != a.shape[1]:
        raise UsageError(f"--coordinated needs a square matrix, got {a.shape[0]}x{a.shape[1]}")
    model = build_model(a, measure, args.formulation, args.coordinated, args.symmetry_breaking)
    for axis, idx, kappa in _clusters(args):
        add_cluster_constraint(model, idx, kappa, axis)
    for axis, idx, pos in _pins(args):
        add_position_constraint(model, idx, pos, axis)
    emit_lp(model, args.out)
    counts = {k: model.count(k) for k in ("binary", "integer", "continuous")}
    print(
        f"wrote {args.out}: {len(model.variables)} variables "
        f"({counts['binary']} binary, {counts['integer']} integer, {counts['continuous']} continuous), "
        f"{len(model.constraints) + len(model.quadratic_constraints)} constraints"
    )
    return EXIT_OK


def cmd_render(args) -> int:
    from .render import render_heatmap

    data = _read(args.input)
    a = data.values
    rl, cl = data.row_labels, data.col_labels
    if args.perm:
        rp, cp = _read_perm_file(args.perm, *a.shape)
        a = apply_permutations(a, rp, cp)
        rl = [rl[i] for i in rp.order()] if rl else None
        cl = [cl[j] for j in cp.order()] if cl else None
    if not args.raw:
        a = normalize(a)[0]
    render_heatmap(a, args.out, args.format, rl, cl)
    print(f"wrote {args.out}")
    return EXIT_OK


# --------------------------------------------------------------------------
# bench

_TYPE = {"easy": "eas", "sqr": "sqr", "nsq": "nsq", "bin_square": "bin", "bin_nonsquare": "bin"}
AGG_COLUMNS = [
    "n", "m", "type", "Dev_N", "Dev_Mo", "Dev_ME", "Dev_Hom", "runtime", "status", "gap",
    "family", "density", "seed", "measure", "coordinated", "engine", "objective", "original", "error",
]


def _bench_specs(families, sizes, densities, repeats, seed0):
    specs = []
    for fam in families:
        members = ["bin_square", "bin_nonsquare"] if fam == "bin" else [fam]
        for f in members:
            if f in ("nsq", "bin_nonsquare"):
                shapes = [(a, b) for a in sizes for b in sizes if a < b]
            else:
                shapes = [(s, s) for s in sizes]
            dens = densities if f.startswith("bin") else [None]
            for n, m in shapes:
                for d in dens:
                    for r in range(repeats):
                        specs.append(GenSpec(f, n, m, d, seed0 + r))
    return specs


def _bench_one(job):
    spec, measure, coordinated, engine, time_limit, out_dir = job
    a, _ = generate_with_points(spec)
    coord = coordinated and spec.n == spec.m
    row = {
        "n": spec.n, "m": spec.m, "type": _TYPE[spec.family], "family": spec.family,
        "density": "" if spec.density is None else spec.density, "seed": spec.seed,
        "measure": measure.label(), "coordinated": int(coord), "error": "",
    }
    t0 = time.perf_counter()
    try:
        limits = SolveLimits(time_limit) if time_limit else None
        resolved = choose_engine(a.shape, measure, coord) if engine == "auto" else engine
        res = seriate(a, measure, coord, resolved, limits)
        dev = res.deviations
        row.update(
            Dev_N=dev["Dev_N"], Dev_Mo=dev["Dev_Mo"], Dev_ME=dev["Dev_ME"], Dev_Hom=dev["Dev_Hom"],
            runtime=res.runtime, status=res.status.value, gap=res.gap, engine=resolved,
            objective=res.objective, original=measure.evaluate(a),
        )
        dens = "" if spec.density is None else f"_d{int(spec.density * 100)}"
        name = f"{spec.family}_{spec.n}x{spec.m}{dens}_s{spec.seed}_{measure.label()}{'_coord' if coord else ''}"
        # timings live in aggregate.csv so the per-instance JSON stays byte-stable
        doc = result_document(a, res, resolved, coord, measure, source=name, config={"spec": asdict(spec)})
        write_result_json(doc, Path(out_dir) / "instances" / f"{name}.json")
    except Exception as exc:  # recorded per instance; the harness keeps going
        row.update(runtime=time.perf_counter() - t0, status="Error", error=f"{type(exc).__name__}: {exc}")
    return row


def _profile(rows) -> list[dict]:
    out = []
    by_measure: dict[str, list[dict]] = {}
    for r in rows:
        by_measure.setdefault(r["measure"], []).append(r)
    for meas, items in sorted(by_measure.items()):
        solved = sorted(float(r["runtime"]) for r in items if r.get("status") == Status.OPTIMAL.value)
        total = len(items)
        for k, t in enumerate(solved, 1):
            out.append({"measure": meas, "time": t, "fraction_solved": k / total})
    return out


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    families = [f.strip() for f in args.families.split(",")]
    densities = [float(d) for d in args.densities.split(",")]
    for d in densities:
        if d not in DENSITIES:
            raise UsageError(f"density {d} not in {DENSITIES}")
    measures = []
    for label in args.measures.split(","):
        label = label.strip()
        measures.append(Measure.me() if label == "me" else Measure(label, args.p))
    specs = _bench_specs(families, sizes, densities, args.repeats, args.seed)
    out_dir = Path(args.out_dir)
    (out_dir / "instances").mkdir(parents=True, exist_ok=True)
    jobs = [(s, me, args.coordinated, args.engine, args.time_limit, str(out_dir)) for s in specs for me in measures]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    with open(out_dir / "aggregate.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=AGG_COLUMNS, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        w.writerows(rows)
    with open(out_dir / "performance_profile.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=["measure", "time", "fraction_solved"], lineterminator="\n")
        w.writeheader()
        w.writerows(_profile(rows))
    failed = sum(1 for r in rows if r["status"] == "Error")
    print(f"{len(rows)} runs ({failed} failed); results in {out_dir}")
    for meas in measures:
        vals = [r["Dev_N"] if meas.is_stress else r["Dev_ME"] for r in rows
                if r["measure"] == meas.label() and r["status"] != "Error"]
        if vals:
            key = "Dev_N" if meas.is_stress else "Dev_ME"
            print(f"  {meas.label()}: mean {key} = {100 * float(np.mean(vals)):.2f}%")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _add_measure_flags(p):
    p.add_argument("--measure", choices=("vn", "moore", "cross2", "eps", "me"), default="vn")
    p.add_argument("--p", type=float, choices=(1.0, 2.0), default=1.0, help="norm exponent for stress")
    p.add_argument("--eps", type=float, help="radius for --measure eps")
    p.add_argument("--offsets", help="custom neighborhood as 'dr,dc;dr,dc;...'")
    p.add_argument("--coordinated", action="store_true", help="same permutation for rows and columns")


def _add_milp_flags(p):
    p.add_argument("--formulation", choices=FORMULATION_CHOICES)
    p.add_argument("--symmetry-breaking", action="store_true", help="PAM: row 1 before row 2")
    p.add_argument("--cluster", action="append", metavar="I,J,...:KAPPA", help="HPM row cluster (1-based)")
    p.add_argument("--col-cluster", action="append", metavar="I,J,...:KAPPA", help="HPM column cluster")
    p.add_argument("--pin", action="append", metavar="I:POS-SET", help="PAM rows I into positions, e.g. 1:1-3")
    p.add_argument("--col-pin", action="append", metavar="J:POS-SET", help="PAM columns into positions")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(
        prog="exactseriation",
        description="Exact matrix seriation toolkit.",
        epilog="exit codes: 0 ok, 1 usage/configuration error, 2 infeasible, 3 limit reached without incumbent",
    )
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser(
        "seriate",
        help="optimally reorder a matrix",
        description=(
            "Engine 'auto': brute force when the reordering space is at most "
            f"{AUTO_BRUTE_LIMIT} (5!*5!), else heldkarp up to {HELD_KARP_MAX} nodes per axis, "
            "else bnb; Moore stress uses alternating descent, cross2 heldkarp; other neighborhoods milp."
        ),
    )
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", help="result JSON")
    p.add_argument("--heatmap", help="SVG or PGM heatmap of the reordered, normalized matrix")
    _add_measure_flags(p)
    p.add_argument("--engine", choices=ENGINES, default="auto")
    p.add_argument("--time-limit", type=float)
    p.add_argument("--node-limit", type=int)
    p.add_argument("--solver-config", help="JSON with solver_command and timeout_seconds")
    p.add_argument("--record-runtime", action="store_true", help="store wall time in the JSON (not byte-stable)")
    _add_milp_flags(p)
    p.set_defaults(func=cmd_seriate)

    p = sub.add_parser("evaluate", help="measures and deviations of a (reordered) matrix")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--perm", help="result JSON or two lines of 1-based row/column permutations")
    p.add_argument("--p", type=float, choices=(1.0, 2.0), default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("generate", help="synthetic instance")
    p.add_argument("--family", choices=("easy", "sqr", "nsq", "bin_square", "bin_nonsquare"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--density", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--sidecar", help="generator settings and points as JSON (default: OUT with .json suffix)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("emit-model", help="write an LP model")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    _add_measure_flags(p)
    _add_milp_flags(p)
    p.set_defaults(func=cmd_emit_model)

    p = sub.add_parser("render", help="grayscale heatmap (1 black, 0 white)")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("svg", "pgm"))
    p.add_argument("--perm")
    p.add_argument("--raw", action="store_true", help="skip min-max normalization (values are clamped)")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("bench", help="synthetic benchmark suite")
    p.add_argument("--sizes", default="10,15,20")
    p.add_argument("--families", default="easy,sqr,nsq,bin")
    p.add_argument("--densities", default="0.25,0.5,0.75")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--measures", default="vn,moore,me")
    p.add_argument("--p", type=float, choices=(1.0, 2.0), default=1.0)
    p.add_argument("--coordinated", action="store_true", help="coordinate square instances")
    p.add_argument("--engine", choices=ENGINES, default="auto")
    p.add_argument("--time-limit", type=float, default=60.0)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out-dir", default="bench_out")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if hasattr(args, "p") and float(args.p).is_integer():
        args.p = int(args.p)
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NoIncumbentError as exc:
        print(f"no incumbent: {exc}", file=sys.stderr)
        return EXIT_NO_INCUMBENT
    except (UsageError, SeriationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
