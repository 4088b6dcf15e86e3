#!/usr/bin/env python3
"""Tabulate the reduction inequality margin over a sweep of levels.

Usage: python3 scripts/verify_reduction.py [--kmax N] [--samples N]

For each admissible level the script prints the two sides of the
inequality and the margin, then cross-checks the half-space description
of the domain against the prism-complement description on random points.
Exits nonzero if any margin fails or any sampled point disagrees.
"""

import argparse
import sys

from lorentzdomains.reduction import check_reduction_bound, sample_equivalence


def main(argv=None) -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--kmax", type=int, default=20)
    ap.add_argument("--samples", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    failures = 0
    print(f"{'case':>8}  {'ell^-(sec)':>12}  {'rhs':>12}  {'margin':>10}  premise")
    for series in ("E", "Z"):
        for k in range(1, args.kmax + 1):
            if k % 3 == 0:
                continue
            rep = check_reduction_bound(series, k)
            mark = "ok" if rep.holds else "FAIL"
            if not rep.holds:
                failures += 1
            print(
                f"{series} k={k:>3}  {rep.ell_minus_at_sec:12.8f}  "
                f"{rep.rhs:12.8f}  {rep.margin:10.6f}  "
                f"{rep.orbit_premise_ok}  {mark}"
            )
    for series in ("E", "Z"):
        for k in (1, 2, 4, 5):
            st = sample_equivalence(series, k, n_samples=args.samples, seed=args.seed)
            agree = st.n_agree == st.n_evaluated
            if not agree:
                failures += 1
            print(
                f"equivalence {series} k={k}: {st.n_agree}/{st.n_evaluated} agree "
                f"({'ok' if agree else 'FAIL'})"
            )
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
