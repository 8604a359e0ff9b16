"""Command-line driver: synthesize, verify, simulate, report and export.

Exit codes:
  0   success
  1   verification found a violation
  2   search exhausted without a certified solution
  3   resource budget exceeded
  64  malformed input file
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from collections.abc import Sequence
from pathlib import Path

from .circuits import metrics
from .errors import CircuitError, FormatError, ResourceError
from .fixtures import load_fixtures
from .ftcheck import oracle_check
from .search.synth import ENGINES
from .search import SearchConfig, Solution, SynthesisFailure, synthesize
from .sim import NoiseModel, estimate, report_csv

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_EXHAUSTED = 2
EXIT_RESOURCE = 3
EXIT_FORMAT = 64

ENV_HELP = """\
exit codes:
  0   success
  1   verification found a violation (witness printed)
  2   search exhausted without a certified solution
  3   resource budget exceeded
  64  malformed input file

environment overrides (flags take precedence):
  CATPREP_FAULT_BUDGET       max fault-set size before a resource error
  CATPREP_CEGAR_REFINEMENTS  CEGAR refinement rounds per ancilla width
  CATPREP_SAT_CONFLICTS      SAT conflict budget per CEGAR call
"""


def _env_int(name: str) -> int | None:
    raw = os.environ.get(name)
    return int(raw) if raw else None


def _load_solution(path: str) -> Solution:
    try:
        return Solution.load(path)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def cmd_synthesize(args: argparse.Namespace) -> int:
    kw: dict = {"seed": args.seed, "fault_budget": args.budget or _env_int("CATPREP_FAULT_BUDGET")}
    if args.w_prime is not None:
        kw["w_prime_range"] = (args.w_prime, args.w_prime)
    if args.engine != "auto":
        kw["engines"] = (args.engine,)
    if (n := _env_int("CATPREP_CEGAR_REFINEMENTS")) is not None:
        kw["cegar_refinements"] = n
    if (n := _env_int("CATPREP_SAT_CONFLICTS")) is not None:
        kw["cegar_conflicts"] = n
    result = synthesize(args.w, args.t, SearchConfig(t=args.t, w=args.w, **kw))
    if isinstance(result, SynthesisFailure):
        print(result.report())
        if result.proven_unsat:
            print(f"UNSAT for w' in {result.proven_unsat}")
        return EXIT_EXHAUSTED
    text = result.to_text()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"w={result.w} t={result.t} w_prime={result.w_prime} engine={result.engine}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    sol = _load_solution(args.solution)
    t = args.t if args.t is not None else sol.t
    try:
        c = sol.circuit()
    except CircuitError as exc:
        raise FormatError(str(exc)) from exc
    v = oracle_check(c.data, c.ancilla, c.wiring, t, budget=_env_int("CATPREP_FAULT_BUDGET"))
    if v is not None:
        print(v.to_record())
        return EXIT_VIOLATION
    print(f"pass w={sol.w} w_prime={sol.w_prime} t={t}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    sol = _load_solution(args.solution)
    c = sol.circuit()
    reports = [
        (sol.t, estimate(c, NoiseModel(p, args.init_error), args.shots, args.seed, workers=args.workers)) for p in args.p
    ]
    text = report_csv(reports)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.plot:
        Path(args.plot).write_text(_profile_csv(reports))
    return EXIT_OK


def _profile_csv(reports) -> str:
    """Long-format error profile: one row per (p, k)."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["w", "t", "p", "k", "P_k", "stderr"])
    for t, r in reports:
        for k, q in enumerate(r.P):
            wr.writerow([r.w, t, repr(r.p), k, f"{q:.8g}", f"{r.P_stderr(k):.8g}"])
    return buf.getvalue()


REPORT_HEADER = [
    "t", "w", "w_prime", "d", "cx", "q", "ra_ours",
    "fx_d", "fx_cx", "fx_q", "fx_ra_ours", "mismatch",
    "ra_rec", "d_rec", "cx_rec", "q_rec", "delta_ra", "delta_d", "delta_cx", "delta_q",
]  # fmt: skip


def cmd_report(args: argparse.Namespace) -> int:
    fixtures = load_fixtures(args.fixtures)
    sols = []
    for path in sorted(Path(args.solutions).glob("*")):
        if path.is_file():
            try:
                sols.append(Solution.load(path))
            except FormatError as exc:
                print(f"skipping {path.name}: {exc}", file=sys.stderr)
    sols.sort(key=lambda s: (s.t, s.w))
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(REPORT_HEADER)
    mismatches = 0
    for sol in sols:
        c = sol.circuit()
        m = metrics(c)
        ra = ""
        if args.shots:
            ra = round(100 * estimate(c, NoiseModel(args.p, args.init_error), args.shots, args.seed).R_acc, 2)
        row = next((r for r in fixtures.get(sol.t, []) if r.w == sol.w), None)
        ours = [sol.t, sol.w, sol.w_prime, m.depth_report, m.cx_count, m.qubit_count, ra]
        if row is None:
            print(f"no fixture row for t={sol.t} w={sol.w}", file=sys.stderr)
            wr.writerow(ours + ["missing"] + [""] * (len(REPORT_HEADER) - len(ours) - 1))
            continue
        bad = (m.depth_report, m.cx_count, m.qubit_count) != (row.d_ours, row.cx_ours, row.q_ours)
        mismatches += bad
        d_ra = "" if ra == "" else round(ra - row.ra_rec, 2)
        wr.writerow(
            ours
            + [row.d_ours, row.cx_ours, row.q_ours, row.ra_ours, "yes" if bad else "no"]
            + [row.ra_rec, row.d_rec, row.cx_rec, row.q_rec, d_ra]
            + [m.depth_report - row.d_rec, m.cx_count - row.cx_rec, m.qubit_count - row.q_rec]
        )
    Path(args.out).write_text(buf.getvalue())
    print(f"{len(sols)} solutions, {mismatches} metric mismatches", file=sys.stderr)
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    sol = _load_solution(args.solution)
    text = sol.circuit().to_text()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catprep",
        description="Synthesize and check verified cat-state preparation circuits.",
        epilog=ENV_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log search progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="find a certified wiring with the smallest ancilla")
    p.add_argument("--w", type=int, required=True, help="data cat-state width")
    p.add_argument("--t", type=int, required=True, help="fault-tolerance order")
    p.add_argument("--w-prime", type=int, help="fix the ancilla width instead of sweeping")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--engine", choices=("auto",) + ENGINES, default="auto")
    p.add_argument("--budget", type=int, help="fault-set size budget")
    p.add_argument("--out", help="solution file (default: stdout)")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("verify", help="check a solution file exhaustively")
    p.add_argument("--solution", required=True)
    p.add_argument("--t", type=int, help="order to check (default: the file's t)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Monte Carlo acceptance rate and error profile")
    p.add_argument("--solution", required=True)
    p.add_argument("--p", type=float, nargs="+", required=True, help="one or more noise strengths")
    p.add_argument("--shots", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--init-error", choices=("flip", "phase"), default="flip", help="Pauli applied by preparation faults")
    p.add_argument("--out", help="CSV report (default: stdout)")
    p.add_argument("--plot", help="also write the long-format error profile CSV here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="compare solutions against the reference tables")
    p.add_argument("--fixtures", help="fixture directory (default: packaged tables)")
    p.add_argument("--solutions", required=True, help="directory of solution files")
    p.add_argument("--out", required=True)
    p.add_argument("--shots", type=int, default=0, help="simulate each solution (0 skips)")
    p.add_argument("--p", type=float, default=0.001)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init-error", choices=("flip", "phase"), default="flip")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("export", help="write the assembled circuit in text form")
    p.add_argument("--solution", required=True)
    p.add_argument("--out", help="circuit file (default: stdout)")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
