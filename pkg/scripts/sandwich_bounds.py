"""Show the alternating two-sided bounds tightening around the true energy.

Anchoring the recursion at the origin makes consecutive energies
alternate around the limit: odd iterates are upper bounds, even ones
lower bounds. The script prints the running bracket against an
independent finite-difference eigenvalue and optionally dumps the rows
as CSV for plotting.

Usage:
    python scripts/sandwich_bounds.py [--g 2] [--density 1200] [--out rows.csv]
"""

from __future__ import annotations

import argparse
import csv
import math
import sys

import wellsolver as ws


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--g", type=float, default=2.0)
    ap.add_argument("--density", type=float, default=1200.0)
    ap.add_argument("--iterations", type=int, default=7)
    ap.add_argument("--out", default=None, help="optional CSV path")
    args = ap.parse_args()

    trial = ws.build_symmetric_quartic_trial(
        args.g, ws.quartic_grid(args.g, args.density)
    )
    opts = ws.IterateOptions(max_iter=args.iterations, tol_e=0.0, tol_f=0.0)
    trace = ws.iterate(trial, "B", opts)
    reference = float(ws.fd_levels(trial.V, 1, mirror_even=True)[0])

    rows = []
    lo, hi = -math.inf, math.inf
    print(f"reference eigenvalue (independent grid solve): {reference:.12f}\n")
    print(f"{'n':>3} {'energy':>20} {'bound':>6} {'bracket width':>16}")
    for st in trace.states[1:]:
        if st.n % 2:
            hi = min(hi, st.E_n)
            side = "upper"
        else:
            lo = max(lo, st.E_n)
            side = "lower"
        width = hi - lo if math.isfinite(lo) else float("nan")
        print(f"{st.n:>3} {st.E_n:>20.12f} {side:>6} {width:>16.3e}")
        rows.append({"n": st.n, "energy": st.E_n, "bound": side,
                     "width": width})

    inside = lo < reference < hi
    print(f"\nfinal bracket [{lo:.12f}, {hi:.12f}]")
    print(f"reference {'inside' if inside else 'OUTSIDE'}; "
          f"margins {reference - lo:.3e} / {hi - reference:.3e}")

    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["n", "energy", "bound", "width"])
            w.writeheader()
            w.writerows(rows)
        print(f"rows written to {args.out}")

    if not inside:
        sys.exit(1)


if __name__ == "__main__":
    main()
