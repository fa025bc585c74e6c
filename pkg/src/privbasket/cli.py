"""Command-line front end.

Exit codes: 0 success, 1 usage or parameter validation, 2 domain errors
(for example p + q = 1), 3 I/O and file-format errors. Every randomized
stage takes an explicit --seed; given identical flags and seed, output
files are byte-identical (timing-derived report fields excepted).
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .corpus import (
    GenParams,
    compute_stats,
    generate_synthetic,
    load_any,
    save_bitmatrix,
    save_itemlist,
)
from .distortion import DistortionParams, distort_database, expected_row_length
from .errors import ConfigError, DomainError, FormatError
from .evaluation import run_experiment
from .planner import PlanThresholds, candidate_grid, plan_report
from .privacy import privacy_grid
from .recon import mine_distorted
from . import apriori


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; this tool reserves 2 for domain errors
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _add_threads(sub):
    sub.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker cap for counting passes; never changes the output",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="privbasket", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = subs.add_parser("gen", help="generate a synthetic database")
    gen.add_argument("--d", type=int, required=True, help="number of rows")
    gen.add_argument("--t", type=float, required=True, help="mean row length")
    gen.add_argument("--n", type=int, required=True, help="item universe size")
    gen.add_argument("--i", type=float, default=4.0, help="mean pattern length")
    gen.add_argument("--l", type=int, default=2000, help="number of base patterns")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("-o", "--output", required=True)
    gen.add_argument("--format", choices=("itemlist", "bitmatrix"), default="itemlist")
    gen.set_defaults(func=cmd_gen)

    dis = subs.add_parser("distort", help="randomly distort a database")
    dis.add_argument("input")
    dis.add_argument("--p", type=float, required=True, help="P(1 stays 1)")
    dis.add_argument("--q", type=float, required=True, help="P(0 stays 0)")
    dis.add_argument("--seed", type=int, required=True)
    dis.add_argument("-o", "--output", required=True, help="bit-matrix output path")
    dis.set_defaults(func=cmd_distort)

    mine = subs.add_parser("mine", help="exact frequent itemset mining")
    mine.add_argument("input")
    mine.add_argument("--minsup", type=float, required=True)
    mine.add_argument("-o", "--output", required=True, help="lattice TSV path")
    _add_threads(mine)
    mine.set_defaults(func=cmd_mine)

    emine = subs.add_parser(
        "emine", help="mine a distorted database with support reconstruction"
    )
    emine.add_argument("input")
    emine.add_argument("--p", type=float, required=True)
    emine.add_argument("--q", type=float, required=True)
    emine.add_argument("--minsup", type=float, required=True)
    emine.add_argument(
        "--seed", type=int, default=None, help="distortion seed, recorded in the header"
    )
    emine.add_argument("-o", "--output", required=True)
    _add_threads(emine)
    emine.set_defaults(func=cmd_emine)

    plan = subs.add_parser("plan", help="screen (p, q) settings before distorting")
    plan.add_argument("--s0", type=float, required=True, help="expected average support")
    plan.add_argument("--dbsize", type=int, required=True)
    plan.add_argument("--bp-min", type=float, default=90.0)
    plan.add_argument("--slack", type=float, default=1.05)
    plan.add_argument("--q-min", type=float, default=0.95)
    plan.add_argument(
        "--mode", choices=("paper_printed", "exact"), default="paper_printed"
    )
    plan.add_argument("-o", "--output", default=None, help="full grid CSV path")
    plan.set_defaults(func=cmd_plan)

    ev = subs.add_parser("evaluate", help="end-to-end accuracy/privacy experiment")
    ev.add_argument("--original", required=True, help="undistorted input database")
    ev.add_argument("--p", type=float, required=True)
    ev.add_argument("--q", type=float, required=True)
    ev.add_argument("--seed", type=int, required=True)
    ev.add_argument("--minsup", type=float, required=True)
    ev.add_argument("--repeats", type=int, default=3, help="timing repeats (median)")
    ev.add_argument("-o", "--output-prefix", required=True)
    ev.set_defaults(func=cmd_evaluate)

    pg = subs.add_parser("privacy-grid", help="basic privacy over a (p, q) grid")
    pg.add_argument("--s0", type=float, required=True)
    pg.add_argument("--p-min", type=float, default=0.05)
    pg.add_argument("--p-max", type=float, default=0.95)
    pg.add_argument("--p-step", type=float, default=0.05)
    pg.add_argument("--q-min", type=float, default=0.05)
    pg.add_argument("--q-max", type=float, default=0.95)
    pg.add_argument("--q-step", type=float, default=0.05)
    pg.add_argument("-o", "--output", default=None, help="CSV path (default stdout)")
    pg.set_defaults(func=cmd_privacy_grid)

    return parser


def _frange(lo: float, hi: float, step: float) -> list[float]:
    if step <= 0:
        raise ConfigError("step must be positive")
    out = []
    k = 0
    while True:
        v = round(lo + k * step, 10)
        if v > hi + 1e-9:
            break
        out.append(v)
        k += 1
    return out


def cmd_gen(args) -> int:
    params = GenParams(
        dbsize=args.d,
        avg_len=args.t,
        num_items=args.n,
        pattern_len=args.i,
        num_patterns=args.l,
        seed=args.seed,
    )
    db = generate_synthetic(params)
    if args.format == "bitmatrix":
        save_bitmatrix(db, args.output)
    else:
        save_itemlist(db, args.output)
    stats = compute_stats(db)
    print(f"wrote {db.dbsize} rows x {db.num_items} items to {args.output}")
    print(
        f"avg row length {stats.avg_row_length:.3f}, avg support {stats.avg_support:.6f}"
    )
    return 0


def cmd_distort(args) -> int:
    db = load_any(args.input)
    params = DistortionParams(p=args.p, q=args.q, seed=args.seed)
    out = distort_database(db, params)
    save_bitmatrix(out, args.output)
    in_stats = compute_stats(db)
    out_stats = compute_stats(out)
    expected = expected_row_length(
        in_stats.avg_row_length, db.num_items, args.p, args.q
    )
    print(f"wrote distorted bit-matrix to {args.output}")
    print(
        f"avg row length: measured {out_stats.avg_row_length:.3f}, "
        f"expected {expected:.3f}"
    )
    return 0


def _print_level_summary(lattice) -> None:
    for level in sorted(lattice.levels):
        print(f"level {level}: {len(lattice.levels[level])} frequent itemsets")
    print(f"total {len(lattice)} itemsets")


def cmd_mine(args) -> int:
    db = load_any(args.input)
    lattice = apriori.mine(db, args.minsup, threads=args.threads)
    lattice.to_tsv(args.output)
    _print_level_summary(lattice)
    return 0


def cmd_emine(args) -> int:
    db = load_any(args.input)
    lattice = mine_distorted(
        db, args.p, args.q, args.minsup, threads=args.threads
    )
    meta = {
        "p": f"{args.p:g}",
        "q": f"{args.q:g}",
        "seed": "-" if args.seed is None else str(args.seed),
        "sup_min": f"{args.minsup:.8f}",
    }
    lattice.to_tsv(args.output, meta=meta)
    _print_level_summary(lattice)
    return 0


def cmd_plan(args) -> int:
    thresholds = PlanThresholds(
        bp_min=args.bp_min,
        error_slack=args.slack,
        q_min=args.q_min,
        normalization=args.mode,
    )
    rows = plan_report(args.s0, args.dbsize, thresholds)
    cands = candidate_grid(args.s0, args.dbsize, thresholds)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("p,q,bp,error,priv_ok,acc_ok\n")
            for r in rows:
                fh.write(
                    f"{r.p:g},{r.q:g},{r.bp:.4f},{r.error:.6f},"
                    f"{int(r.priv_ok)},{int(r.acc_ok)}\n"
                )
        print(f"wrote grid to {args.output}")
    if cands:
        print("recommended (p, q), most protective first:")
        for p, q in cands:
            print(f"  p={p:g} q={q:g}")
    else:
        print("no (p, q) setting meets the thresholds")
    return 0


def cmd_evaluate(args) -> int:
    db = load_any(args.original)
    params = DistortionParams(p=args.p, q=args.q, seed=args.seed)
    report = run_experiment(
        db, params, args.minsup, timing_repeats=args.repeats
    )
    prefix = args.output_prefix
    report.write_flat(f"{prefix}_report.txt")
    report.write_summary_csv(f"{prefix}_summary.csv")
    report.write_levels_csv(f"{prefix}_levels.csv")
    print(
        f"bp={report.bp:.2f} rp={report.rp:.2f} delta={report.delta:.2f} "
        f"sigma+={_opt(report.sigma_plus)} sigma-={_opt(report.sigma_minus)} "
        f"rho={_opt(report.rho)}"
    )
    print(f"wrote {prefix}_report.txt, {prefix}_summary.csv, {prefix}_levels.csv")
    return 0


def _opt(x) -> str:
    return "absent" if x is None else f"{x:.2f}"


def cmd_privacy_grid(args) -> int:
    ps = _frange(args.p_min, args.p_max, args.p_step)
    qs = _frange(args.q_min, args.q_max, args.q_step)
    rows = privacy_grid(ps, qs, args.s0)
    lines = ["p,q,bp"] + [f"{p:g},{q:g},{bp:.4f}" for p, q, bp in rows]
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"wrote {len(rows)} grid points to {args.output}")
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"privbasket: invalid parameters: {exc}\n")
        return 1
    except (FormatError, OSError) as exc:
        sys.stderr.write(f"privbasket: i/o error: {exc}\n")
        return 3
    except DomainError as exc:
        sys.stderr.write(f"privbasket: domain error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
