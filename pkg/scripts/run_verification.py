#!/usr/bin/env python3
"""Run the Monte-Carlo / brute-force verification suites and print the table.

Equivalent to ``chainwishart verify`` but convenient as a repo script:

    python3 scripts/run_verification.py --suite all --seed 20260810
"""

import argparse
import sys

from chainwishart.verification import SUITES, format_report, report_json, run_suites


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--suite", choices=["all", *SUITES], default="all")
    parser.add_argument("--seed", type=int, default=20260810)
    parser.add_argument("--json", default=None, help="also write the report as JSON")
    args = parser.parse_args()
    results, ok = run_suites(args.suite, args.seed)
    print(format_report(results))
    if args.json:
        with open(args.json, "w", encoding="utf-8") as f:
            f.write(report_json(results))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
