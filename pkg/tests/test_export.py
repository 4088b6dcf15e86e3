import json
import math
import os

import numpy as np
import pytest

from lorentzdomains.cli import main
from lorentzdomains.domain import (
    Face,
    Polyhedron,
    build_polyhedron,
    detect_symmetry,
    edge_cycle_check,
    enumerate_vertices,
    find_pairings,
    series_constraints,
)
from lorentzdomains.export import (
    artifact_basename,
    json_text,
    obj_text,
    off_text,
    report_dict,
    singularity_label,
    svg_text,
    write_artifacts,
)


def _tetrahedron() -> Polyhedron:
    verts = np.array(
        [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ]
    )
    loops = [(0, 2, 1), (0, 1, 3), (1, 2, 3), (0, 3, 2)]
    faces = tuple(
        Face(label=f"a[{i}]", wall=None, loop=loop, normal=np.zeros(3), offset=0.0)
        for i, loop in enumerate(loops)
    )
    edges = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
    return Polyhedron(vertices=verts, faces=faces, edges=edges)


@pytest.fixture(scope="module")
def e1_run():
    cs = series_constraints("E", 1)
    poly = build_polyhedron(cs, enumerate_vertices(cs))
    rep = find_pairings(poly, cs)
    sym = detect_symmetry(poly, cs)
    cycles = edge_cycle_check(poly, rep)
    return cs, poly, rep, sym, cycles


def test_singularity_labels():
    assert singularity_label("E", 2) == "E_18"
    assert singularity_label("E", 1) == "E_14"
    assert singularity_label("Z", 1) == "Z_13"
    assert singularity_label("Z", 5) == "Z_29"
    with pytest.raises(ValueError):
        singularity_label("Q", 1)


def test_artifact_basename():
    assert artifact_basename("E", 2) == "fund_E_k2"
    assert artifact_basename("Z", 10) == "fund_Z_k10"


def test_off_tetrahedron():
    text = off_text(_tetrahedron())
    lines = text.splitlines()
    assert lines[0] == "OFF"
    assert lines[1] == "4 4 6"
    assert len(lines) == 2 + 4 + 4
    # faces parse back to the same loops
    for want, got in zip([(0, 2, 1), (0, 1, 3), (1, 2, 3), (0, 3, 2)], lines[6:]):
        parts = got.split()
        assert int(parts[0]) == 3
        assert tuple(int(x) for x in parts[1:4]) == want


def test_obj_matches_off_combinatorics():
    poly = _tetrahedron()
    off_lines = off_text(poly).splitlines()
    obj_lines = obj_text(poly).splitlines()
    off_faces = [
        tuple(int(x) for x in line.split()[1:4])
        for line in off_lines[2 + len(poly.vertices):]
    ]
    obj_faces = [
        tuple(int(x) - 1 for x in line.split()[1:])
        for line in obj_lines
        if line.startswith("f ")
    ]
    assert off_faces == obj_faces
    off_verts = [
        tuple(float(x) for x in line.split())
        for line in off_lines[2: 2 + len(poly.vertices)]
    ]
    obj_verts = [
        tuple(float(x) for x in line.split()[1:])
        for line in obj_lines
        if line.startswith("v ")
    ]
    assert off_verts == obj_verts


def test_slab_comment_only_on_slab_faces(e1_run):
    _, poly, _, _, _ = e1_run
    lines = off_text(poly).splitlines()[2 + len(poly.vertices):]
    flagged = [line.endswith("# slab") for line in lines]
    assert sum(flagged) == 2
    assert flagged[-2:] == [True, True]


def test_json_report_round_trip(e1_run):
    cs, poly, rep, sym, cycles = e1_run
    report = report_dict(cs, poly, rep, symmetry_angle=sym, edge_cycles=cycles)
    text = json_text(report)
    back = json.loads(text)
    assert back == json.loads(json_text(back))
    assert back["schema_version"] == 1
    assert back["series"] == "E" and back["k"] == 1
    assert back["singularity"] == "E_14"
    assert back["counts"]["vertices"] == len(poly.vertices)
    assert len(back["pairings"]) == len(poly.faces)
    assert back["unpaired"] == []
    assert all(len(p["g1"]) == 5 and len(p["g2"]) == 5 for p in back["pairings"])
    assert abs(back["symmetry_angle"] - math.pi / 4.0) < 1e-12
    assert "timestamp" not in text and "date" not in text


def test_svg_render(e1_run):
    _, poly, _, _, _ = e1_run
    text = svg_text(poly)
    assert text.startswith("<svg ")
    assert text.rstrip().endswith("</svg>")
    side = sum(1 for f in poly.faces if not f.is_slab)
    assert text.count("<polygon") == side
    assert text.count("<circle") == 1 + len(poly.vertices)


def test_write_artifacts_deterministic(tmp_path, e1_run):
    cs, poly, rep, sym, cycles = e1_run
    report = report_dict(cs, poly, rep, symmetry_angle=sym, edge_cycles=cycles)
    a = write_artifacts(tmp_path / "a", "E", 1, poly, report)
    b = write_artifacts(tmp_path / "b", "E", 1, poly, report)
    assert sorted(a) == ["json", "obj", "off", "svg"]
    for fmt in a:
        with open(a[fmt], "rb") as fa, open(b[fmt], "rb") as fb:
            assert fa.read() == fb.read(), fmt


def test_write_artifacts_rejects_unknown_format(tmp_path, e1_run):
    cs, poly, rep, _, _ = e1_run
    report = report_dict(cs, poly, rep)
    with pytest.raises(ValueError):
        write_artifacts(tmp_path, "E", 1, poly, report, formats=("stl",))


def test_cli_info(capsys):
    assert main(["info", "--series", "Z", "--k", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["signature"] == [5, 3, 3]
    assert out["singularity"] == "Z_13"


def test_cli_rejects_divisible_level(capsys):
    code = main(["info", "--series", "E", "--k", "6"])
    assert code == 2
    out = json.loads(capsys.readouterr().out)
    assert "error" in out and out["k"] == 6


def test_cli_build(tmp_path, capsys):
    code = main(
        [
            "build", "--series", "E", "--k", "1",
            "--out", str(tmp_path), "--formats", "off,json",
        ]
    )
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["counts"]["euler_characteristic"] == 2
    assert out["unpaired"] == []
    assert out["reduction_holds"] is True
    for fmt in ("off", "json"):
        assert os.path.exists(tmp_path / f"fund_E_k1.{fmt}")
    assert not os.path.exists(tmp_path / "fund_E_k1.svg")


def test_cli_verify(capsys):
    code = main(
        ["verify", "--series", "E", "--k", "1", "--samples", "2000", "--seed", "3"]
    )
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["reduction"]["holds"] is True
    assert out["equivalence"]["agreement"] == 1.0


def test_cli_out_dir_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("LORENTZDOMAINS_OUT", str(tmp_path / "envout"))
    code = main(["build", "--series", "E", "--k", "1", "--formats", "off"])
    assert code == 0
    capsys.readouterr()
    assert os.path.exists(tmp_path / "envout" / "fund_E_k1.off")
