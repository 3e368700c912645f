#!/usr/bin/env python3
"""Climb the hierarchy for one (n, d): dual witness optimum per level.

Example:
    python scripts/witness_ladder.py --n 4 --d 6 --max-copies 3

A strictly negative exact optimum at any level certifies that no
AME(n, d) state exists; a zero optimum means the level is passed.
"""

import argparse
import json
import sys
import time

from qmarginal import hierarchy


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, required=True)
    ap.add_argument("--d", type=int, required=True)
    ap.add_argument("--min-copies", type=int, default=2)
    ap.add_argument("--max-copies", type=int, default=3)
    ap.add_argument("--cap", type=int, default=512, help="largest irrep block side to assemble")
    args = ap.parse_args()

    for copies in range(args.min_copies, args.max_copies + 1):
        t0 = time.perf_counter()
        rep = hierarchy.level_check(args.n, args.d, copies, cap=args.cap)
        dt = time.perf_counter() - t0
        print(
            f"N={copies}: feasible={rep.feasible} optimum={rep.optimum if rep.optimum is not None else rep.optimum_float}"
            f" exact={rep.exact} ({dt:.2f}s)",
            file=sys.stderr,
        )
        print(json.dumps(rep.to_dict()))
        if not rep.feasible:
            break
    return 0


if __name__ == "__main__":
    sys.exit(main())
