#!/usr/bin/env python3
"""Exact validation sweep of the u(n) tables for a range of n.

Checks closure, antisymmetry, the Jacobi identity, basis orthogonality,
positive definiteness of the trace form, and its ad-invariance, all in
exact rational arithmetic.

    python scripts/validate_un.py --max-n 5
"""

import argparse
import sys
import time

from go_metric_lab import lie_core


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=5)
    args = ap.parse_args()
    failures = 0
    for n in range(1, args.max_n + 1):
        t0 = time.time()
        g = lie_core.build_un(n)
        report = lie_core.validate_algebra(g)
        status = "ok" if report.ok else "FAIL"
        print(f"u({n}): dim {g.dim:3d}  {status}  ({time.time() - t0:.2f}s)")
        for check in report.checks:
            if not check.passed:
                failures += 1
                print(f"    {check.name}: {check.detail}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
