"""Command-line front end.

Subcommands: ``gen`` (simulate an instance file), ``plan`` (print attack
parameters), ``table`` (parameter/complexity overview for a list of sample
budgets), ``solve`` (run the attack on an instance file), ``pileup``
(empirical piling-up experiment), ``bench`` (stage scaling measurements).

Exit codes: 0 success, 2 bad input or file, 3 infeasible plan, 4 attack ran
but did not recover a verifying key, 5 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

from . import bench as bench_mod
from . import files, planner, report
from .core import generate_instance, pileup_experiment
from .errors import InfeasiblePlanError, ResourceBudgetError
from .solver import solve

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_NO_RECOVERY = 4
EXIT_RESOURCE = 5


def _parse_eps(text: str) -> Fraction:
    num, sep, den = text.partition("/")
    if not sep:
        raise ValueError(f"bias must be given as NUM/DEN, got {text!r}")
    eps = Fraction(int(num), int(den))
    if not 0 < eps <= Fraction(1, 2):
        raise ValueError(f"bias must lie in (0, 1/2], got {text}")
    return eps


def _parse_logns(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _parse_decimation(text: str):
    if text == "auto":
        return "auto"
    return int(text)


def cmd_gen(args) -> int:
    eps = _parse_eps(args.eps)
    instance = generate_instance(args.n, eps, args.N, args.seed)
    files.write_instance(args.out, instance, include_key=args.include_key)
    if args.include_key:
        files.write_key_file(args.out + ".key", instance.key)
        print(f"wrote {args.out} ({args.N} records) and {args.out}.key")
    else:
        print(f"wrote {args.out} ({args.N} records, attack-only)")
    return EXIT_OK


def _plan_from_args(n, eps, log_n, args) -> planner.Plan:
    l_prime = args.l
    if l_prime == "auto":
        l_prime = planner.decimation_plan(n, log_n, eps)
    return planner.make_plan(
        n, eps, log_n, w_int=args.w, b_int=args.b, l_prime=l_prime
    )


def cmd_plan(args) -> int:
    eps = _parse_eps(args.eps)
    plan = _plan_from_args(args.n, eps, args.logN, args)
    sys.stdout.write(files.plan_to_text(plan))
    return EXIT_OK


def cmd_table(args) -> int:
    eps = _parse_eps(args.eps)
    logns = _parse_logns(args.logN)
    rows = []
    cells = [list(planner.TABLE_HEADER)]
    for log_n in logns:
        try:
            row = planner.emit_table(args.n, eps, [log_n])[0]
            rows.append(row)
            cells.append(planner.format_row_cells(row))
        except InfeasiblePlanError as exc:
            cells.append([planner._fmt(log_n, 2), f"infeasible: {exc}"] + [""] * 6)
    widths = [
        max(len(c[i]) if i < len(c) else 0 for c in cells)
        for i in range(len(planner.TABLE_HEADER))
    ]
    for c in cells:
        print("  ".join(v.rjust(widths[i]) for i, v in enumerate(c)).rstrip())
    if args.report_dir:
        for path in report.write_table_report(rows, args.report_dir):
            print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def cmd_solve(args) -> int:
    instance = files.read_instance(getattr(args, "in"))
    log_n = args.logN if args.logN is not None else math.log2(len(instance.samples))
    plan = _plan_from_args(instance.n, instance.eps, log_n, args)
    result = solve(instance, plan, sample_seed=args.seed)
    exact = None
    if instance.key is not None:
        exact = result.key_hat == instance.key
    text = files.result_to_text(result, exact_match=exact)
    sys.stdout.write(text)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    if args.report_dir:
        for path in report.write_solve_report(result, text, args.report_dir):
            print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK if result.success else EXIT_NO_RECOVERY


def cmd_pileup(args) -> int:
    eps = _parse_eps(args.eps)
    rep = pileup_experiment(eps, args.w, args.trials, args.seed)
    print(f"predicted_bias = {rep.predicted!r}")
    print(f"empirical_bias = {rep.empirical!r}")
    print(f"trials = {rep.trials}")
    print(f"sigma = {rep.sigma!r}")
    print(f"z_score = {rep.z_score!r}")
    if args.report_dir:
        for path in report.write_pileup_report(rep, args.report_dir):
            print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def cmd_bench(args) -> int:
    eps = _parse_eps(args.eps)
    ms = tuple(int(x) for x in args.walsh_ms.split(","))
    rep = bench_mod.run_bench(args.n, eps, args.logN, args.reps, walsh_ms=ms)
    print("stage      size        seconds     predicted_log  delta")
    for p in rep.combiner:
        measured_log = math.log2(p.seconds) if p.seconds > 0 else float("-inf")
        delta = measured_log - p.predicted_log_cost
        print(
            f"combine    2^{p.log_n:<9.0f} {p.seconds:<11.4f} "
            f"{p.predicted_log_cost:<14.2f} {delta:+.2f}"
        )
    for p in rep.walsh:
        predicted = math.log2(p.m * (1 << p.m))
        delta = math.log2(p.seconds) - predicted
        print(
            f"walsh      2^{p.m:<9d} {p.seconds:<11.4f} {predicted:<14.2f} {delta:+.2f}"
        )
    print(f"combiner_loglog_slope = {rep.combiner_slope:.3f} (model: 2)")
    print(f"walsh_normalized_spread = x{rep.walsh_spread:.2f} (model: flat)")
    if args.report_dir:
        for path in report.write_bench_report(rep, args.report_dir):
            print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpnkit",
        description="Learning Parity with Noise solver toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="simulate an instance file")
    p.add_argument("--n", type=int, required=True, help="dimension")
    p.add_argument("--eps", required=True, help="bias as NUM/DEN in (0, 1/2]")
    p.add_argument("--N", type=int, required=True, help="number of samples")
    p.add_argument("--seed", type=int, default=0, help="64-bit stream seed")
    p.add_argument("--out", required=True, help="output path")
    p.add_argument(
        "--include-key",
        action="store_true",
        help="embed the planted key and write it to OUT.key (default: attack-only)",
    )
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("plan", help="print attack parameters")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--logN", type=float, required=True, help="log2 of sample budget")
    p.add_argument("--w", type=int, default=None, help="pin the combination weight")
    p.add_argument("--b", type=int, default=None, help="pin the block width")
    p.add_argument(
        "--l",
        type=_parse_decimation,
        default=0,
        help="decimation amount, or 'auto' to take the surplus-driven value",
    )
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("table", help="parameter/complexity overview table")
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--eps", default="1/8")
    p.add_argument("--logN", default="10,20,30,40,47,50", help="comma list")
    p.add_argument("--report-dir", default=None)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("solve", help="run the attack on an instance file")
    p.add_argument("--in", required=True, help="instance file path")
    p.add_argument("--w", type=int, default=None)
    p.add_argument("--b", type=int, default=None)
    p.add_argument("--l", type=_parse_decimation, default=0)
    p.add_argument("--logN", type=float, default=None, help="sample budget override")
    p.add_argument(
        "--seed",
        type=int,
        default=None,
        help="subsample the instance pseudorandomly instead of taking the head",
    )
    p.add_argument("--report", default=None, help="write the result document here")
    p.add_argument("--report-dir", default=None, help="write document, tsv and figures")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("pileup", help="empirical piling-up experiment")
    p.add_argument("--eps", required=True)
    p.add_argument("--w", type=int, required=True, help="number of bits XORed")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report-dir", default=None)
    p.set_defaults(func=cmd_pileup)

    p = sub.add_parser("bench", help="stage scaling measurements")
    p.add_argument("--n", type=int, default=24)
    p.add_argument("--eps", default="1/8")
    p.add_argument("--logN", type=float, default=13)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--walsh-ms", default="16,20,24", help="spectrum dims, comma list")
    p.add_argument("--report-dir", default=None)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasiblePlanError as exc:
        print(f"infeasible plan: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ResourceBudgetError as exc:
        print(f"resource budget exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
