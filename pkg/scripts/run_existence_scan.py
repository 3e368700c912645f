#!/usr/bin/env python3
"""Scan the closed-form AME existence conditions over an (n, d) grid.

Example:
    python scripts/run_existence_scan.py --n-max 12 --d-max 9 --jobs 4 --out scan.tsv

Prints a compact verdict table to stderr and writes the full TSV report.
"""

import argparse
import sys

from qmarginal import ame


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-min", type=int, default=2)
    ap.add_argument("--n-max", type=int, default=12)
    ap.add_argument("--d-min", type=int, default=2)
    ap.add_argument("--d-max", type=int, default=9)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default=None, help="TSV output path (default: stdout)")
    args = ap.parse_args()

    n_vals = range(args.n_min, args.n_max + 1)
    d_vals = range(args.d_min, args.d_max + 1)
    reports = ame.scan(n_vals, d_vals, jobs=args.jobs)

    by_pair = {(r.n, r.d): r for r in reports}
    header = "n\\d " + " ".join(f"{d:>2}" for d in d_vals)
    print(header, file=sys.stderr)
    for n in n_vals:
        cells = []
        for d in d_vals:
            r = by_pair[(n, d)]
            cells.append(" x" if r.verdict == "infeasible" else " ?")
        print(f"{n:>3} " + " ".join(cells), file=sys.stderr)
    print("x = ruled out by positivity/PPT, ? = inconclusive", file=sys.stderr)

    text = ame.reports_to_tsv(reports)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
