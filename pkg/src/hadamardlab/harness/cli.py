"""Command line entry point.

Exit codes: 0 all checks passed, 1 at least one numeric check failed,
2 the scenario file could not be parsed or fails the schema.
"""

from __future__ import annotations

import argparse
import sys

from ..exceptions import HadamardLabError
from .report import render_text, write_csv, write_report
from .scenario import ScenarioError, load_scenario
from .tasks import FUZZ_SPACES, run_fuzz, run_scenario

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_SCENARIO = 2


def _parse_tol(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ScenarioError(f"--tol expects key=value, got {pair!r}")
        key, _, value = pair.partition("=")
        try:
            out[key.strip()] = float(value)
        except ValueError as exc:
            raise ScenarioError(f"--tol {pair!r}: not a number") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hadamard-lab",
        description="Run property-check scenarios on nonpositively curved "
                    "model spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario file")
    run_p.add_argument("scenario", help="path to a scenario JSON file")
    run_p.add_argument("--out", help="write the JSON report here")
    run_p.add_argument("--csv", help="write the defect table here as CSV")
    run_p.add_argument("--seed", type=int, help="override the scenario seed")
    run_p.add_argument("--trials", type=int, help="override the trial count")
    run_p.add_argument("--tol", action="append", default=[], metavar="KEY=VAL",
                       help="override one named tolerance (repeatable)")

    fuzz_p = sub.add_parser("fuzz", help="run the invariant sweep")
    fuzz_p.add_argument("--spaces", default=",".join(FUZZ_SPACES),
                        help="comma-separated builtin space names")
    fuzz_p.add_argument("--trials", type=int, default=100)
    fuzz_p.add_argument("--seed", type=int, default=0)
    fuzz_p.add_argument("--out", help="write the JSON report here")
    fuzz_p.add_argument("--csv", help="write the defect table here as CSV")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            scenario = load_scenario(args.scenario)
            report = run_scenario(
                scenario,
                trials_override=args.trials,
                seed_override=args.seed,
                tol_overrides=_parse_tol(args.tol),
            )
        else:
            names = [s.strip() for s in args.spaces.split(",") if s.strip()]
            report = run_fuzz(names, trials=args.trials, seed=args.seed)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_BAD_SCENARIO
    except HadamardLabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED

    if args.out:
        write_report(report, args.out)
    if args.csv:
        write_csv(report.records, args.csv)
    print(render_text(report))
    for record in report.failed:
        print(f"failed: {record.name} defect {record.defect:.6g} "
              f"tolerance {record.tolerance:.6g}", file=sys.stderr)
    return EXIT_OK if not report.failed else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
