"""Command line entry point: ``rpsched generate | solve | bench``.

Exit status is 0 on success, 2 when the instance is infeasible under its
speed cap, 1 on any other error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .baselines import OracleBudget, brute_force_opt, lfj, lfm
from .core import InfeasibleError, SchedulingError, check_feasibility, require_valid
from .harness import ALGOS, GenParams, generate, run_sweep, write_report
from .io import assignment_to_dict, fractional_to_dict, parse_instance, write_instance
from .relax import solve_relaxation
from .rounding import fdr
from .uniform import ecsemrpp

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2

DEFAULT_SWEEPS = {"C": "1,2,3,4,5", "eta": "1,2,3,4", "eligibility": "random,inclusive"}


def _csv_list(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rpsched", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random instance file")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--w-lo", type=int, default=1)
    g.add_argument("--w-hi", type=int, default=10000)
    g.add_argument("--eligibility", choices=["random", "inclusive"], default="random")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--alpha", type=float, default=2.0)
    g.add_argument("--C", type=float, default=1.0)
    g.add_argument("--s-max", type=float, default=None,
                   help="speed cap (default: just enough for rounding to stay feasible)")
    g.add_argument("--out", required=True)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("--algo", choices=["frac", "opt", "fdr", "lfj", "lfm", "ecsemrpp"], required=True)
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out", default="-", help="assignment JSON (default: stdout)")
    s.add_argument("--tol", type=float, default=1e-7)
    s.add_argument("--trace", default=None, help="fdr only: write the rounding trace here")
    s.add_argument("--budget", type=int, default=OracleBudget().max_states)

    b = sub.add_parser("bench", help="run a comparison sweep and write a CSV report")
    b.add_argument("--sweep", choices=["C", "eta", "eligibility"], required=True)
    b.add_argument("--values", default=None, help="comma-separated sweep values")
    b.add_argument("--m", type=int, default=10)
    b.add_argument("--n", type=int, default=27)
    b.add_argument("--w-lo", type=int, default=1)
    b.add_argument("--w-hi", type=int, default=10000)
    b.add_argument("--eligibility", choices=["random", "inclusive"], default="random")
    b.add_argument("--alpha", type=float, default=2.0)
    b.add_argument("--C", type=float, default=1.0)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--budget", type=int, default=OracleBudget().max_states)
    b.add_argument("--algos", default="frac,opt,fdr,lfj,lfm")
    b.add_argument("--tol", type=float, default=1e-7)
    b.add_argument("--no-timing", action="store_true", help="write runtime_ms as 0 (reproducible output)")
    b.add_argument("--out-csv", required=True)
    return ap


def _emit(doc, path):
    text = json.dumps(doc, indent=1) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_generate(args) -> int:
    p = GenParams(args.m, args.n, args.w_lo, args.w_hi, args.eligibility, args.seed,
                  args.alpha, args.C, args.s_max)
    write_instance(generate(p), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = parse_instance(args.inp)
    require_valid(inst)
    if args.trace and args.algo != "fdr":
        raise SchedulingError("--trace is only available with --algo fdr")
    if args.algo == "frac":
        x, report = solve_relaxation(inst, args.tol)
        doc = fractional_to_dict(inst, x)
        doc["iterations"] = report.iterations
        doc["max_stationarity_residual"] = report.max_stationarity_residual
        _emit(doc, args.out)
        return EXIT_OK

    trace = None
    if args.algo == "fdr":
        a, trace, _ = fdr(inst, args.tol)
    elif args.algo == "opt":
        a = brute_force_opt(inst, OracleBudget(args.budget))
    elif args.algo == "lfj":
        a = lfj(inst)
    elif args.algo == "lfm":
        a = lfm(inst)
    else:
        a = ecsemrpp(inst)
    doc = assignment_to_dict(inst, a)
    violations = check_feasibility(inst, a)
    doc["violations"] = [v.message for v in violations]
    _emit(doc, args.out)
    if trace is not None and args.trace:
        _emit(trace.to_dict(), args.trace)
    if violations:
        print(f"infeasible: {len(violations)} constraint violation(s)", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_bench(args) -> int:
    algos = _csv_list(args.algos)
    bad = set(algos) - set(ALGOS)
    if bad:
        raise SchedulingError(f"unknown algorithms {sorted(bad)}")
    values = _csv_list(args.values or DEFAULT_SWEEPS[args.sweep])
    p = GenParams(args.m, args.n, args.w_lo, args.w_hi, args.eligibility, args.seed, args.alpha, args.C)
    reports = run_sweep(args.sweep, p, values, algos, args.repeats, OracleBudget(args.budget),
                        timing=not args.no_timing, tol=args.tol)
    write_report(reports, args.out_csv)
    for rep in reports:
        summary = "  ".join(f"{a}={rep.mean_ratio(a):.4f}" for a in rep.algos())
        print(f"{rep.cell}: {summary}")
        for flag in dict.fromkeys(rep.flags):
            print(f"  flag: {flag}", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; 2 is reserved for infeasibility here
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"generate": cmd_generate, "solve": cmd_solve, "bench": cmd_bench}[args.command]
    try:
        return handler(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (SchedulingError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
