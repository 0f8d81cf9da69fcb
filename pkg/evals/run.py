#!/usr/bin/env python
"""Golden set runner.

    python -m evals.run                        # every case
    python -m evals.run --category walls       # one category
    python -m evals.run --case AC-05a          # one case
    python -m evals.run --list                 # ids and categories, nothing run
    python -m evals.run --output evals/results/

Exits 0 when every selected case passes, 1 otherwise (or when nothing is selected),
2 when the golden set itself cannot be read.
"""

import argparse
import logging
import sys
from datetime import datetime
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from dotenv import load_dotenv

from evals.evaluator import AcceptanceEvaluator, print_report, save_report
from src.errors import BoxSpaceError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Run the box-space acceptance cases")
    parser.add_argument("--golden-set", default="evals/golden_set.yaml", help="Golden set YAML")
    parser.add_argument("--category", help="Only cases in this category")
    parser.add_argument("--case", help="Only this case id")
    parser.add_argument("--list", action="store_true", help="Print the selected cases and exit")
    parser.add_argument("--output", help="Directory (timestamped file) or JSON path for the report")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    return parser


def report_path(output: str) -> Path:
    path = Path(output)
    if path.suffix != ".json":
        path = path / f"eval_results_{datetime.now():%Y%m%d_%H%M%S}.json"
    return path


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    load_dotenv()
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        evaluator = AcceptanceEvaluator(args.golden_set)
    except BoxSpaceError as e:
        print(f"Cannot load {args.golden_set}: {e.message}", file=sys.stderr)
        return 2

    cases = evaluator.select(category=args.category, case_id=args.case)
    if not cases:
        print(f"No cases match category={args.category!r} case={args.case!r}", file=sys.stderr)
        return 1

    if args.list:
        for case in cases:
            print(f"{case['id']:8} {case['category']:14} {case['description']}")
        return 0

    report = evaluator.run_all()
    print_report(report)

    if args.output:
        written = save_report(report, report_path(args.output))
        print(f"\nReport written to {written}")

    return 0 if report.passed_cases == report.total_cases else 1


if __name__ == "__main__":
    sys.exit(main())
