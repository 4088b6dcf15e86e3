"""Deterministic artifact writers for computed fundamental domains.

Identical inputs must give byte-identical files, so none of the writers
embed timestamps or environment data, floats are printed with %.17g
(value-faithful for doubles), and every file is written atomically via a
temporary file in the target directory followed by os.replace.
"""

import json
import math
import os
import tempfile

import numpy as np

from .domain import Polyhedron, PairingReport, ConstraintSet

SCHEMA_VERSION = 1

SVG_SIZE = 512
SVG_MARGIN = 16.0

_FACE_STROKE = {"a": "#b03030", "b": "#3050b0", "c": "#30a050"}


def singularity_label(series: str, k: int) -> str:
    """Arnold normal-form label of the quotient singularity the link bounds."""
    if series == "E":
        return f"E_{4 * k + 10}"
    if series == "Z":
        return f"Z_{4 * k + 9}"
    raise ValueError(f"unknown series {series!r}")


def artifact_basename(series: str, k: int) -> str:
    return f"fund_{series}_k{k}"


def _fmt(x: float) -> str:
    # +0.0 folds negative zero so reruns cannot differ in sign of zero
    return "%.17g" % (float(x) + 0.0)


def _write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def off_text(poly: Polyhedron) -> str:
    """OFF with outward-oriented faces; slab faces carry a trailing comment."""
    lines = ["OFF", f"{len(poly.vertices)} {len(poly.faces)} {len(poly.edges)}"]
    for v in poly.vertices:
        lines.append(" ".join(_fmt(c) for c in v))
    for face in poly.faces:
        row = f"{len(face.loop)} " + " ".join(str(i) for i in face.loop)
        if face.is_slab:
            row += "  # slab"
        lines.append(row)
    return "\n".join(lines) + "\n"


def obj_text(poly: Polyhedron) -> str:
    lines = []
    for v in poly.vertices:
        lines.append("v " + " ".join(_fmt(c) for c in v))
    for face in poly.faces:
        lines.append("g " + face.label)
        lines.append("f " + " ".join(str(i + 1) for i in face.loop))
    return "\n".join(lines) + "\n"


def _element_tuple(g) -> list:
    return [
        float(g.z.real),
        float(g.z.imag),
        float(g.w.real),
        float(g.w.imag),
        float(g.phi),
    ]


def report_dict(
    cs: ConstraintSet,
    poly: Polyhedron,
    pairing_report: PairingReport,
    symmetry_angle=None,
    edge_cycles=None,
    reduction=None,
    equivalence=None,
) -> dict:
    """Full run record; every group element is (Re z, Im z, Re w, Im w, phi)."""
    report = {
        "schema_version": SCHEMA_VERSION,
        "series": cs.series,
        "k": cs.k,
        "singularity": singularity_label(cs.series, cs.k),
        "p_reading": cs.p_reading,
        "signature": [cs.tri.p, cs.tri.q, cs.tri.r],
        "level": {
            "k": cs.config.k,
            "p_tri": cs.config.p_tri,
            "p_lcm": cs.config.p_lcm,
            "lam": cs.config.lam,
            "central_corrections": list(cs.config.central_corrections),
        },
        "counts": {
            "vertices": len(poly.vertices),
            "edges": len(poly.edges),
            "faces": len(poly.faces),
            "euler_characteristic": poly.euler_characteristic,
        },
        "symmetry_angle": None if symmetry_angle is None else float(symmetry_angle),
        "vertices": [[float(c) for c in v] for v in poly.vertices],
        "faces": [
            {"label": f.label, "loop": list(f.loop), "slab": f.is_slab}
            for f in poly.faces
        ],
        "pairings": [
            {
                "face_i": p.face_i,
                "face_j": p.face_j,
                "g1": _element_tuple(p.g1),
                "g2": _element_tuple(p.g2),
                "vertex_map": [list(ab) for ab in p.vertex_map],
                "syllables": p.syllables,
                "word": p.word,
            }
            for p in pairing_report.pairings
        ],
        "unpaired": list(pairing_report.unpaired),
    }
    if edge_cycles is not None:
        report["edge_cycles"] = {
            "count": len(edge_cycles),
            "exponents": sorted(set(n for n, _ in edge_cycles)),
            "lengths": sorted(set(steps for _, steps in edge_cycles)),
        }
    if reduction is not None:
        report["reduction"] = {
            "alpha": reduction.alpha,
            "R": reduction.R,
            "ell_minus_at_sec": reduction.ell_minus_at_sec,
            "rhs": reduction.rhs,
            "holds": reduction.holds,
            "margin": reduction.margin,
            "orbit_premise_ok": reduction.orbit_premise_ok,
        }
    if equivalence is not None:
        report["equivalence"] = {
            "n_samples": equivalence.n_samples,
            "n_evaluated": equivalence.n_evaluated,
            "n_agree": equivalence.n_agree,
            "n_in_both": equivalence.n_in_both,
            "n_in_neither": equivalence.n_in_neither,
            "agreement": equivalence.agreement,
            "seed": equivalence.seed,
        }
    return report


def json_text(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _svg_map(x: float, y: float) -> tuple:
    half = SVG_SIZE / 2.0
    scale = (half - SVG_MARGIN)
    return half + scale * x, half - scale * y


def svg_text(poly: Polyhedron) -> str:
    """Disc-projection render: side faces only, drawn over the unit circle."""
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" '
        f'height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
        f'<rect width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white"/>',
    ]
    cx, cy = _svg_map(0.0, 0.0)
    r_unit = (SVG_SIZE / 2.0) - SVG_MARGIN
    lines.append(
        f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="{r_unit:.3f}" '
        'fill="none" stroke="#888888" stroke-width="1"/>'
    )
    for face in poly.faces:
        if face.is_slab:
            continue
        pts = []
        for i in face.loop:
            px, py = _svg_map(poly.vertices[i][0], poly.vertices[i][1])
            pts.append(f"{px:.3f},{py:.3f}")
        stroke = _FACE_STROKE.get(face.label[0], "#000000")
        lines.append(
            f'<polygon points="{" ".join(pts)}" fill="none" '
            f'stroke="{stroke}" stroke-width="1.2"/>'
        )
    for v in poly.vertices:
        px, py = _svg_map(v[0], v[1])
        lines.append(f'<circle cx="{px:.3f}" cy="{py:.3f}" r="2" fill="#202020"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


WRITERS = {
    "off": lambda poly, report: off_text(poly),
    "obj": lambda poly, report: obj_text(poly),
    "json": lambda poly, report: json_text(report),
    "svg": lambda poly, report: svg_text(poly),
}


def write_artifacts(out_dir, series, k, poly, report, formats=("off", "obj", "json", "svg")):
    """Write the requested artifact files; returns {format: path}."""
    base = artifact_basename(series, k)
    written = {}
    for fmt in formats:
        if fmt not in WRITERS:
            raise ValueError(f"unknown format {fmt!r}")
        path = os.path.join(out_dir, f"{base}.{fmt}")
        _write_text(path, WRITERS[fmt](poly, report))
        written[fmt] = path
    return written
