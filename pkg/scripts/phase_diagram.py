#!/usr/bin/env python3
"""Emit the certified critical-death-rate curve across the coexistence window.

Writes CSV rows (lambda, lo, hi, status) suitable for plotting the phase
diagram for a given branching factor: the threshold is 0 outside the
window, rises from the lower edge, and pinches back to 0 at the upper
edge.  Grid points just outside both edges are included so the zero
plateau is visible.

    python scripts/phase_diagram.py --d 2 --points 33 --tol 1/64 > curve.csv
"""

import argparse
import csv
import sys
from fractions import Fraction

from ced.decision import rho_c_curve
from ced.params import lambda_interval


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--points", type=int, default=33, help="total grid size incl. 2 outside points")
    ap.add_argument("--tol", type=Fraction, default=Fraction(1, 64))
    ap.add_argument("--max-m", type=int, default=4096)
    ap.add_argument("--margin", type=Fraction, default=Fraction(1, 100),
                    help="offset of the innermost grid points from the window edges")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    iv = lambda_interval(args.d)
    lo_edge = iv.lower.hi.limit_denominator(10**6)
    hi_edge = iv.upper.lo.limit_denominator(10**6)
    inner_lo = lo_edge + args.margin
    inner_hi = hi_edge - args.margin
    n_inner = args.points - 2
    step = (inner_hi - inner_lo) / (n_inner - 1)
    grid = [lo_edge / 2] + [inner_lo + i * step for i in range(n_inner)] + [hi_edge + 1]

    rows = rho_c_curve(args.d, grid, args.tol, args.max_m, threads=args.threads)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["lambda", "lo", "hi", "status"])
    for r in rows:
        writer.writerow([str(r.lam), str(r.lo), str(r.hi), r.status])
        print(f"lambda={float(r.lam):8.4f}  rho_c in [{float(r.lo):.5f}, {float(r.hi):.5f}]  {r.status}",
              file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
