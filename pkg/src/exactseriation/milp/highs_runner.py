"""Reference solver adapter: ``python -m exactseriation.milp.highs_runner MODEL SOLUTION``.

Reads an LP file with HiGHS and writes a solution file in the package's
dialect::

    # comment
    status optimal|time_limit|infeasible|...
    objective <value>
    bound <value>
    <variable> <value>
    ...

Exit codes: 0 solution file written (possibly without values when the run
ended without an incumbent), 3 model rejected by the reader (e.g. quadratic
constraints), 4 highspy missing, 5 solver error.
"""
from __future__ import annotations

import argparse
import sys

from exactseriation.milp.protocol import EXIT_ERROR, EXIT_MISSING, EXIT_REJECTED


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="highs_runner", description=__doc__.splitlines()[0])
    ap.add_argument("model")
    ap.add_argument("solution")
    ap.add_argument("--time-limit", type=float, default=None)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args(argv)
    try:
        import highspy
    except ImportError:
        print("highspy is not installed", file=sys.stderr)
        return EXIT_MISSING

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("threads", args.threads)
    h.setOptionValue("random_seed", 0)
    # the default relative gap (1e-4) would stop short of proven optimality
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 1e-9)
    # with default tolerances presolve occasionally certifies a suboptimal PAM incumbent
    h.setOptionValue("mip_feasibility_tolerance", 1e-9)
    h.setOptionValue("primal_feasibility_tolerance", 1e-9)
    if args.time_limit is not None:
        h.setOptionValue("time_limit", float(args.time_limit))
    if h.readModel(args.model) == highspy.HighsStatus.kError:
        print(f"HiGHS could not read {args.model} (unsupported model features?)", file=sys.stderr)
        return EXIT_REJECTED
    if h.run() == highspy.HighsStatus.kError:
        print("HiGHS run failed", file=sys.stderr)
        return EXIT_ERROR

    status = h.getModelStatus()
    S = highspy.HighsModelStatus
    label = {
        S.kOptimal: "optimal",
        S.kInfeasible: "infeasible",
        S.kTimeLimit: "time_limit",
        S.kIterationLimit: "limit",
        S.kSolutionLimit: "limit",
        S.kUnbounded: "unbounded",
        S.kUnboundedOrInfeasible: "infeasible",
    }.get(status, "unknown")
    info = h.getInfo()
    has_sol = info.primal_solution_status == 2  # feasible
    with open(args.solution, "w", encoding="ascii") as fh:
        fh.write(f"# HiGHS {h.modelStatusToString(status)}\n")
        fh.write(f"status {label}\n")
        if has_sol:
            fh.write(f"objective {info.objective_function_value!r}\n")
            if info.mip_dual_bound == info.mip_dual_bound:  # not NaN
                fh.write(f"bound {info.mip_dual_bound!r}\n")
            names = h.getLp().col_names_
            for name, value in zip(names, h.getSolution().col_value):
                fh.write(f"{name} {value!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
