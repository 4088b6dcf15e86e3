"""Command-line interface: build, verify, and inspect fundamental domains.

Exit codes: 0 success, 2 invalid request (bad series/level), 1 internal
verification failure.  Errors are reported as a single JSON object on
stdout so callers never have to parse prose.
"""

import argparse
import json
import os
import sys

from .domain import (
    build_polyhedron,
    detect_symmetry,
    edge_cycle_check,
    enumerate_vertices,
    find_pairings,
    series_constraints,
)
from .export import (
    json_text,
    report_dict,
    singularity_label,
    write_artifacts,
)
from .reduction import check_reduction_bound, sample_equivalence, series_signature

DEFAULT_FORMATS = "off,obj,json,svg"


def _out_dir(value):
    if value:
        return value
    return os.environ.get("LORENTZDOMAINS_OUT", "artifacts")


def _fail(payload: dict, code: int = 2) -> int:
    print(json.dumps(payload, sort_keys=True))
    return code


def cmd_info(args) -> int:
    try:
        p, q, r = series_signature(args.series, args.k)
        cs = series_constraints(args.series, args.k, args.p_reading)
    except ValueError as exc:
        return _fail({"error": str(exc), "series": args.series, "k": args.k})
    info = {
        "series": args.series,
        "k": args.k,
        "signature": [p, q, r],
        "singularity": singularity_label(args.series, args.k),
        "p_reading": cs.p_reading,
        "p_lcm": cs.config.p_lcm,
        "lam": cs.config.lam,
        "central_corrections": list(cs.config.central_corrections),
        "wall_groups": len(cs.groups),
        "period": cs.period,
    }
    print(json.dumps(info, indent=2, sort_keys=True))
    return 0


def cmd_build(args) -> int:
    try:
        cs = series_constraints(args.series, args.k, args.p_reading)
    except ValueError as exc:
        return _fail({"error": str(exc), "series": args.series, "k": args.k})
    poly = build_polyhedron(cs, enumerate_vertices(cs))
    rep = find_pairings(poly, cs, max_word_len=args.word_budget)
    sym = detect_symmetry(poly, cs)
    cycles = edge_cycle_check(poly, rep)
    reduction = check_reduction_bound(args.series, args.k)
    report = report_dict(
        cs, poly, rep,
        symmetry_angle=sym,
        edge_cycles=cycles,
        reduction=reduction,
    )
    formats = tuple(f.strip() for f in args.formats.split(",") if f.strip())
    out_dir = _out_dir(args.out)
    try:
        written = write_artifacts(out_dir, args.series, args.k, poly, report, formats)
    except ValueError as exc:
        return _fail({"error": str(exc), "series": args.series, "k": args.k})
    summary = {
        "series": args.series,
        "k": args.k,
        "singularity": report["singularity"],
        "counts": report["counts"],
        "unpaired": report["unpaired"],
        "reduction_holds": reduction.holds,
        "artifacts": {fmt: written[fmt] for fmt in sorted(written)},
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0 if not report["unpaired"] else 1


def cmd_verify(args) -> int:
    try:
        reduction = check_reduction_bound(args.series, args.k)
        stats = sample_equivalence(
            args.series, args.k, n_samples=args.samples, seed=args.seed
        )
    except ValueError as exc:
        return _fail({"error": str(exc), "series": args.series, "k": args.k})
    result = {
        "series": args.series,
        "k": args.k,
        "reduction": {
            "holds": reduction.holds,
            "margin": reduction.margin,
            "ell_minus_at_sec": reduction.ell_minus_at_sec,
            "rhs": reduction.rhs,
            "orbit_premise_ok": reduction.orbit_premise_ok,
        },
        "equivalence": {
            "n_samples": stats.n_samples,
            "n_evaluated": stats.n_evaluated,
            "n_agree": stats.n_agree,
            "agreement": stats.agreement,
            "seed": stats.seed,
        },
    }
    print(json.dumps(result, indent=2, sort_keys=True))
    ok = reduction.holds and stats.n_agree == stats.n_evaluated
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lorentzdomains",
        description="Polyhedral fundamental domains for Lorentz bi-quotients.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--series", required=True, choices=("E", "Z"))
        p.add_argument("--k", required=True, type=int, help="level (3 must not divide k)")
        p.add_argument(
            "--p-reading", default="tri", choices=("tri", "lcm"),
            help="which rotation order the series parameter names",
        )

    p_info = sub.add_parser("info", help="signature and level data, no geometry")
    common(p_info)
    p_info.set_defaults(func=cmd_info)

    p_build = sub.add_parser("build", help="construct the domain and write artifacts")
    common(p_build)
    p_build.add_argument("--word-budget", type=int, default=8)
    p_build.add_argument(
        "--out", default=None,
        help="output directory (default: $LORENTZDOMAINS_OUT or ./artifacts)",
    )
    p_build.add_argument("--formats", default=DEFAULT_FORMATS)
    p_build.set_defaults(func=cmd_build)

    p_verify = sub.add_parser("verify", help="reduction bound and sampling check")
    common(p_verify)
    p_verify.add_argument("--samples", type=int, default=20_000)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
