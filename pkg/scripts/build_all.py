#!/usr/bin/env python3
"""Build artifacts for a range of levels in both series.

Usage: python3 scripts/build_all.py [--out DIR] [--kmax N] [--formats LIST]

Levels divisible by 3 are skipped (no lift exists there).  Prints one
summary line per case and a totals line at the end.
"""

import argparse
import sys
import time

from lorentzdomains.domain import (
    build_polyhedron,
    detect_symmetry,
    edge_cycle_check,
    enumerate_vertices,
    find_pairings,
    series_constraints,
)
from lorentzdomains.export import report_dict, write_artifacts
from lorentzdomains.reduction import check_reduction_bound


def main(argv=None) -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="artifacts")
    ap.add_argument("--kmax", type=int, default=5)
    ap.add_argument("--formats", default="off,obj,json,svg")
    args = ap.parse_args(argv)
    formats = tuple(f.strip() for f in args.formats.split(",") if f.strip())

    t0 = time.time()
    built = 0
    for series in ("E", "Z"):
        for k in range(1, args.kmax + 1):
            if k % 3 == 0:
                continue
            t1 = time.time()
            cs = series_constraints(series, k)
            poly = build_polyhedron(cs, enumerate_vertices(cs))
            rep = find_pairings(poly, cs)
            sym = detect_symmetry(poly, cs)
            cycles = edge_cycle_check(poly, rep)
            reduction = check_reduction_bound(series, k)
            report = report_dict(
                cs, poly, rep,
                symmetry_angle=sym, edge_cycles=cycles, reduction=reduction,
            )
            write_artifacts(args.out, series, k, poly, report, formats)
            built += 1
            print(
                f"{series} k={k}: V={len(poly.vertices)} E={len(poly.edges)} "
                f"F={len(poly.faces)} unpaired={len(rep.unpaired)} "
                f"margin={reduction.margin:.4f} [{time.time() - t1:.1f}s]"
            )
    print(f"built {built} cases into {args.out}/ in {time.time() - t0:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
