"""Fundamental polyhedron construction in the slab chart.

The chart identifies the affine tangent hyperplane at the identity with
coordinates (x1, x2, s) <-> (z, w) = (x1 + i x2, 1 + i s).  Every wall of
the domain restricts to an affine functional there, so the domain is cut
out by finitely many planes (two slab planes plus one plane per group
element of the indexed families), with the subtlety that family members
enter through unions, not intersections: a point belongs to the domain
when every indexed union captures it.

The construction pipeline is

    series_constraints -> enumerate_vertices -> build_polyhedron
        -> find_pairings / detect_symmetry / lie_project

with honesty checks at each stage: the linear functionals are validated
against the exact sheet-aware membership predicate, the face complex must
close up to a manifold sphere, and every claimed pairing carries both a
geometric vertex-matching certificate and a word certificate placing the
left factor in the acting group.
"""

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .cover import (
    CENTRAL_Z_TOL,
    CoverElement,
    as_central_power,
    axis_rotation,
    central,
    cover_inv,
    cover_mul,
    cover_pow,
    lift_level,
    lifted_generators,
    R_param,
)
from .disc import GroupElement, TriangleGroupData, build_triangle_group, mobius_apply
from .halfspaces import HalfSpaceConstraint, batch_wall

VERTEX_MERGE_TOL = 1e-8
PLANE_INCIDENCE_TOL = 1e-9
MEMBERSHIP_TOL = 1e-9
EDGE_PROBE_TOL = 1e-7
PAIRING_MATCH_TOL = 1e-7
PAIRING_QUICK_TOL = 1e-6
WINDOW_GUARD = 1e-9
_DET_FLOOR = 1e-12
_COND_LIMIT = 1e8
_EDGE_PROBE_TS = (0.25, 0.5, 0.75)
_WORD_TARGET_TOL = 1e-9
_STAB_TURN_TOL = 1e-6

_LABEL_ORDER = {"a": 0, "b": 1, "c": 2, "slab": 3}

COVER_ID = CoverElement(0j, 1.0 + 0j, 0.0, Fraction(0))


@dataclass(frozen=True)
class AffineFunctional:
    """value(x) = normal . (x1, x2, s) + constant; wall sits at value == -1."""

    normal: np.ndarray
    constant: float

    def value(self, pts: np.ndarray) -> np.ndarray:
        return pts @ self.normal + self.constant


def linearize(c: HalfSpaceConstraint, config) -> AffineFunctional:
    """Restrict the wall functional of `c` to the slab chart.

    <pi(g), p> = Re(z_g) x1 + Im(z_g) x2 - Im(w_g) s - Re(w_g) on points
    p = (x1 + i x2, 1 + i s).  Side I keeps value <= -1, side H keeps
    value >= -1.  The sheet window of the exact membership predicate must
    stay inactive throughout the I-side region of the slab; that is probed
    on a grid and on the wall plane itself, and any activation is a hard
    error, because it would mean the linear picture misrepresents the set.
    """
    g = c.g
    fn = AffineFunctional(
        normal=np.array([g.z.real, g.z.imag, -g.w.imag]),
        constant=-g.w.real,
    )
    _assert_window_inactive(g, fn, config)
    return fn


def _slab_half_width(config) -> float:
    return math.tan(math.pi * config.k / (2 * config.p_lcm))


def _chart_parts(pts: np.ndarray):
    Z = pts[:, 0] + 1j * pts[:, 1]
    W = 1.0 + 1j * pts[:, 2]
    PHI = np.arctan(pts[:, 2])
    return Z, W, PHI


def _window_probe_points(fn: AffineFunctional, config) -> np.ndarray:
    """Grid over the slab plus a sampling of the wall plane inside it."""
    h = _slab_half_width(config)
    rho = math.sqrt(1.0 + h * h)
    xs = np.linspace(-rho, rho, 21)
    ss = np.linspace(-h, h, 9)
    g1, g2, g3 = np.meshgrid(xs, xs, ss, indexing="ij")
    pts = [np.column_stack([g1.ravel(), g2.ravel(), g3.ravel()])]
    n = fn.normal
    # parametrize the wall plane n.x = -1 - constant by its two best axes
    rhs = -1.0 - fn.constant
    j = int(np.argmax(np.abs(n)))
    if abs(n[j]) > 1e-12:
        u_axis, v_axis = [i for i in range(3) if i != j]
        uu, vv = np.meshgrid(np.linspace(-rho, rho, 25), np.linspace(-rho, rho, 25))
        plane = np.zeros((uu.size, 3))
        plane[:, u_axis] = uu.ravel()
        plane[:, v_axis] = vv.ravel()
        plane[:, j] = (rhs - plane @ n) / n[j]
        pts.append(plane)
    out = np.vstack(pts)
    keep = np.abs(out[:, 2]) <= h + 1e-12
    out = out[keep]
    inside_cone = out[:, 0] ** 2 + out[:, 1] ** 2 < (1.0 + out[:, 2] ** 2) * (
        1.0 - 1e-12
    )
    return out[inside_cone]


def _assert_window_inactive(g: CoverElement, fn: AffineFunctional, config) -> None:
    pts = _window_probe_points(fn, config)
    if len(pts) == 0:
        return
    Z, W, PHI = _chart_parts(pts)
    val, phi = batch_wall(g, Z, W, PHI)
    active = val <= -1.0 + 1e-6
    if not np.any(active):
        return
    worst = np.max(np.abs(phi[active]))
    if worst >= math.pi / 2.0 - WINDOW_GUARD:
        raise RuntimeError(
            "sheet window activates inside the slab for wall "
            f"(z={g.z:.6g}, w={g.w:.6g}, phi={g.phi:.6g}): max |phi| = {worst:.6g}"
        )


@dataclass(frozen=True)
class Wall:
    label: str
    g: CoverElement
    side: str  # "I" or "H"
    functional: AffineFunctional
    # unit-normal form of the wall plane, normal_hat . x = offset
    normal_hat: np.ndarray = field(init=False)
    offset: float = field(init=False)

    def __post_init__(self):
        n = self.functional.normal
        scale = float(np.linalg.norm(n))
        if scale < 1e-12:
            raise ValueError(f"degenerate wall functional for {self.label}")
        object.__setattr__(self, "normal_hat", n / scale)
        object.__setattr__(self, "offset", (-1.0 - self.functional.constant) / scale)


@dataclass(frozen=True)
class ConstraintSet:
    series: str
    k: int
    p_reading: str
    p_hat: int
    period: int
    config: object
    tri: TriangleGroupData
    D: CoverElement
    a0: CoverElement
    groups: tuple  # tuple of tuples of Wall, one tuple per union index m
    slab: tuple  # the two H-side Walls
    dropped_members: tuple
    dropped_groups: tuple

    def union_groups(self):
        return [[w.g for w in grp] for grp in self.groups]

    def slab_walls(self):
        return [w.g for w in self.slab]

    def all_walls(self):
        out = [w for grp in self.groups for w in grp]
        out.extend(self.slab)
        return out


def _wall_range_on_slab(fn: AffineFunctional, config) -> tuple[float, float]:
    """Range of the wall functional over the closed slab cylinder."""
    h = _slab_half_width(config)
    rho = math.sqrt(1.0 + h * h)
    n = fn.normal
    radial = math.hypot(n[0], n[1]) * rho
    axial = abs(n[2]) * h
    return fn.constant - radial - axial, fn.constant + radial + axial


def series_constraints(series: str, k: int, p_reading: str = "tri") -> ConstraintSet:
    """Constraint families of the fundamental domain for one series level.

    The base element is a0 = R_v(8 pi / 3) D^(2 lam p - 1) C^(-2(lam k + 2)/3)
    for series E, with D-exponent 2 lam p - 2 for series Z, where p follows
    p_reading: the triangle order itself ("tri") or its lcm with 3 ("lcm").
    The indexed family comes from conjugation by half-step rotations about
    the origin, b by a trailing D (and c by one more for series Z); the
    family is exactly periodic with period 2 p_hat because the full-turn
    conjugator is central, so only one period of indices is kept, further
    pruned to members whose wall plane meets the closed slab.
    """
    from .reduction import series_signature

    p_tri, q, r = series_signature(series, k)
    config = lift_level(p_tri, q, r, k)
    tri = build_triangle_group(p_tri, q, r)
    gens = lifted_generators(config)
    D = gens["D"]
    if p_reading == "tri":
        p_hat = p_tri
    elif p_reading == "lcm":
        p_hat = config.p_lcm
    else:
        raise ValueError(f"unknown p_reading {p_reading!r}")
    lam = config.lam
    exp_d = 2 * lam * p_hat - (1 if series == "E" else 2)
    num = 2 * (lam * k + 2)
    if num % 3 != 0:
        raise AssertionError("central exponent must be integral for admissible k")
    exp_c = -(num // 3)
    a0 = cover_mul(
        cover_mul(R_param(tri.v, 8.0 * math.pi / 3.0), cover_pow(D, exp_d)),
        central(exp_c),
    )

    step = axis_rotation(Fraction(1, 2 * p_hat))
    period = 2 * p_hat
    full_turn = cover_pow(step, period)
    if as_central_power(full_turn) != 1:
        raise AssertionError("conjugator full turn is not the central generator")

    letters = "ab" if series == "E" else "abc"
    groups = []
    dropped_members = []
    dropped_groups = []
    for m in range(period):
        conj = cover_pow(step, m)
        conj_inv = cover_pow(step, -m)
        a_m = cover_mul(cover_mul(conj, a0), conj_inv)
        members = [a_m]
        for _ in letters[1:]:
            members.append(cover_mul(members[-1], D))
        walls = []
        group_auto_true = False
        for letter, g in zip(letters, members):
            c = HalfSpaceConstraint(g, "I", f"{letter}[{m}]")
            fn = linearize(c, config)
            lo, hi = _wall_range_on_slab(fn, config)
            if hi < -1.0:
                # member holds on the whole slab; the union imposes nothing
                group_auto_true = True
                break
            if lo > -1.0:
                dropped_members.append(c.label)
                continue
            walls.append(Wall(c.label, g, "I", fn))
        if group_auto_true or not walls:
            dropped_groups.append(m)
            continue
        groups.append(tuple(walls))
    if not groups:
        raise ValueError(f"empty constraint set for series {series}, k={k}")

    slab_walls = []
    for g, name in ((D, "slab[D]"), (cover_inv(D), "slab[D^-1]")):
        c = HalfSpaceConstraint(g, "H", name)
        fn = linearize(c, config)
        slab_walls.append(Wall(name, g, "H", fn))

    return ConstraintSet(
        series=series,
        k=k,
        p_reading=p_reading,
        p_hat=p_hat,
        period=period,
        config=config,
        tri=tri,
        D=D,
        a0=a0,
        groups=tuple(groups),
        slab=tuple(slab_walls),
        dropped_members=tuple(dropped_members),
        dropped_groups=tuple(dropped_groups),
    )


def _wall_index(cs: ConstraintSet):
    """Wall indices in all_walls() order: (per-group index lists, slab list)."""
    idx = 0
    groups_idx = []
    for grp in cs.groups:
        groups_idx.append(list(range(idx, idx + len(grp))))
        idx += len(grp)
    return groups_idx, [idx, idx + 1]


def _wall_tables(cs: ConstraintSet, pts: np.ndarray):
    """Exact wall values and sheet windows, one row per wall of all_walls()."""
    Z, W, PHI = _chart_parts(pts)
    vals = np.empty((len(cs.all_walls()), len(pts)))
    windows = np.empty_like(vals, dtype=bool)
    for i, wall in enumerate(cs.all_walls()):
        val, phi = batch_wall(wall.g, Z, W, PHI)
        vals[i] = val
        windows[i] = np.abs(phi) < math.pi / 2.0
    return vals, windows


def _masks_from_tables(cs, pts, vals, windows, tol):
    groups_idx, slab_idx = _wall_index(cs)
    walls = cs.all_walls()
    in_exact = np.ones(len(pts), dtype=bool)
    in_linear = np.ones(len(pts), dtype=bool)
    for i in slab_idx:
        in_exact &= ~((vals[i] < -1.0 - tol) & windows[i])
        in_linear &= ~(walls[i].functional.value(pts) < -1.0 - tol)
    for members in groups_idx:
        cap_exact = np.zeros(len(pts), dtype=bool)
        cap_linear = np.zeros(len(pts), dtype=bool)
        for i in members:
            cap_exact |= (vals[i] <= -1.0 + tol) & windows[i]
            cap_linear |= walls[i].functional.value(pts) <= -1.0 + tol
        in_exact &= cap_exact
        in_linear &= cap_linear
    return in_exact, in_linear


def _active_from_tables(cs, vals, windows, tol):
    """Which wall planes carry boundary at each point.

    Intersection-type walls (slab) are active where the functional sits at
    the wall value.  A union member is active only when additionally no
    sibling of its group holds strictly: if a sibling is strictly inside,
    the whole group is slack there and the member's plane, even if the
    point lies on it, is invisible to the region's boundary.
    """
    groups_idx, slab_idx = _wall_index(cs)
    active = np.zeros_like(vals, dtype=bool)
    for i in slab_idx:
        active[i] = (np.abs(vals[i] + 1.0) <= tol) & windows[i]
    for members in groups_idx:
        strict = np.zeros(vals.shape[1], dtype=bool)
        for i in members:
            strict |= (vals[i] < -1.0 - tol) & windows[i]
        for i in members:
            active[i] = (np.abs(vals[i] + 1.0) <= tol) & windows[i] & ~strict
    return active


def membership_mask(cs: ConstraintSet, pts: np.ndarray, tol: float = MEMBERSHIP_TOL):
    """Exact sheet-aware membership of chart points in the domain."""
    pts = np.asarray(pts, dtype=float)
    cone_ok = pts[:, 0] ** 2 + pts[:, 1] ** 2 < (1.0 + pts[:, 2] ** 2) * (1.0 - 1e-12)
    out = np.zeros(len(pts), dtype=bool)
    if np.any(cone_ok):
        sub = pts[cone_ok]
        vals, windows = _wall_tables(cs, sub)
        exact, linear = _masks_from_tables(cs, sub, vals, windows, tol)
        if np.any(exact != linear):
            bad = sub[exact != linear]
            raise RuntimeError(
                "linear chart model disagrees with the sheet-aware predicate "
                f"at {bad[0]}; the phi window is active inside the slab"
            )
        out[cone_ok] = exact
    return out


def active_walls(cs: ConstraintSet, pts: np.ndarray, tol: float = PLANE_INCIDENCE_TOL):
    """Boolean matrix (walls x points) of active boundary incidences."""
    pts = np.asarray(pts, dtype=float)
    vals, windows = _wall_tables(cs, pts)
    return _active_from_tables(cs, vals, windows, tol)


def enumerate_vertices(
    cs: ConstraintSet,
    extra_planes=None,
    allow_empty: bool = False,
) -> np.ndarray:
    """Vertices of the domain: all valid triple-plane intersections.

    Planes are the wall planes of every family member, the two slab planes,
    and any caller-supplied (normal, offset) extras.  Triples are solved in
    batch; ill-conditioned triples are discarded, candidate points outside
    the cone or failing the membership predicate are dropped, survivors are
    merged at VERTEX_MERGE_TOL and returned in a deterministic order.
    """
    planes = [(w.normal_hat, w.offset) for w in cs.all_walls()]
    if extra_planes:
        for n, b in extra_planes:
            n = np.asarray(n, dtype=float)
            scale = float(np.linalg.norm(n))
            planes.append((n / scale, b / scale))
    normals = np.array([p[0] for p in planes])
    offsets = np.array([p[1] for p in planes])

    triples = np.array(
        list(itertools.combinations(range(len(planes)), 3)), dtype=int
    )
    A = normals[triples]
    b = offsets[triples]
    dets = np.abs(np.linalg.det(A))
    keep = dets > _DET_FLOOR
    A, b = A[keep], b[keep]
    if len(A):
        conds = np.linalg.cond(A)
        good = conds < _COND_LIMIT
        A, b = A[good], b[good]
    candidates = (
        np.linalg.solve(A, b[..., None])[..., 0] if len(A) else np.zeros((0, 3))
    )

    if len(candidates):
        inside = membership_mask(cs, candidates)
        candidates = candidates[inside]

    # keep only candidates pinned by rank-3 many active boundary planes
    # (extra caller planes count as always-active)
    if len(candidates):
        act = active_walls(cs, candidates)
        wall_normals = np.array([w.normal_hat for w in cs.all_walls()])
        n_extra = len(planes) - len(wall_normals)
        extra_n = normals[len(wall_normals):]
        extra_b = offsets[len(wall_normals):]
        keep = []
        for col in range(len(candidates)):
            rows = [wall_normals[i] for i in np.flatnonzero(act[:, col])]
            if n_extra:
                hit = np.abs(extra_n @ candidates[col] - extra_b) <= PLANE_INCIDENCE_TOL
                rows.extend(extra_n[hit])
            if len(rows) < 3:
                continue
            if np.linalg.matrix_rank(np.array(rows), tol=1e-8) == 3:
                keep.append(col)
        candidates = candidates[keep]

    merged: list[np.ndarray] = []
    order = np.lexsort(
        (
            np.round(candidates[:, 1], 10),
            np.round(candidates[:, 0], 10),
            np.round(candidates[:, 2], 10),
        )
    ) if len(candidates) else []
    for idx in order:
        p = candidates[idx]
        if any(np.linalg.norm(p - q) <= VERTEX_MERGE_TOL for q in merged):
            continue
        merged.append(p)
    if not merged:
        if allow_empty:
            return np.zeros((0, 3))
        raise ValueError("no vertices found; the constraint set is degenerate")
    verts = np.array(merged)

    order = np.lexsort(
        (
            np.round(verts[:, 1], 9),
            np.round(verts[:, 0], 9),
            np.round(verts[:, 2], 9),
        )
    )
    return verts[order]


@dataclass(frozen=True)
class Face:
    label: str
    wall: Wall
    loop: tuple
    normal: np.ndarray
    offset: float

    @property
    def is_slab(self) -> bool:
        return self.label.startswith("slab")


@dataclass
class Polyhedron:
    vertices: np.ndarray
    faces: tuple
    edges: tuple
    pairings: Optional[object] = None

    @property
    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.faces)


def _newell_normal(verts: np.ndarray, loop) -> np.ndarray:
    n = np.zeros(3)
    for i, j in zip(loop, loop[1:] + loop[:1]):
        a, c = verts[i], verts[j]
        n[0] += (a[1] - c[1]) * (a[2] + c[2])
        n[1] += (a[2] - c[2]) * (a[0] + c[0])
        n[2] += (a[0] - c[0]) * (a[1] + c[1])
    return n


def build_polyhedron(cs: ConstraintSet, vertices: np.ndarray) -> Polyhedron:
    """Assemble the face complex and validate that it is a closed surface.

    Faces are extracted per wall by walking the 1-skeleton: two vertices
    are adjacent when they share two walls and the open segment between
    them stays in the domain (probed at quartile points).  Every vertex of
    a wall's skeleton must have degree exactly two there, every edge must
    lie in exactly two faces with opposite orientations, and the Euler
    characteristic must be 2; violations are hard errors, not warnings.
    """
    if len(vertices) == 0:
        raise ValueError("cannot build a polyhedron without vertices")
    walls = cs.all_walls()
    nv = len(vertices)
    incidence = active_walls(cs, vertices)

    pair_shared: dict[tuple[int, int], tuple] = {}
    probe_pts = []
    probe_owner = []
    for i, j in itertools.combinations(range(nv), 2):
        shared = np.flatnonzero(incidence[:, i] & incidence[:, j])
        if len(shared) < 2:
            continue
        span = np.array([walls[w].normal_hat for w in shared])
        if np.linalg.matrix_rank(span, tol=1e-8) < 2:
            continue
        pair_shared[(i, j)] = tuple(shared)
        for t in _EDGE_PROBE_TS:
            probe_pts.append(vertices[i] + t * (vertices[j] - vertices[i]))
            probe_owner.append((i, j))
    # an edge is a segment along which at least two independent walls stay
    # active and the segment stays in the domain; its tag set is exactly
    # the walls active on the open segment, not merely at the endpoints
    seg_walls: dict[tuple[int, int], tuple] = {}
    if probe_pts:
        probe_pts = np.array(probe_pts)
        ok = membership_mask(cs, probe_pts, tol=EDGE_PROBE_TOL)
        probe_act = active_walls(cs, probe_pts, tol=EDGE_PROBE_TOL)
        rows_of: dict[tuple[int, int], list[int]] = {}
        for row, owner in enumerate(probe_owner):
            rows_of.setdefault(owner, []).append(row)
        for owner, rows in rows_of.items():
            if not all(ok[r] for r in rows):
                continue
            alive = [
                w for w in pair_shared[owner]
                if all(probe_act[w, r] for r in rows)
            ]
            if len(alive) < 2:
                continue
            span = np.array([walls[w].normal_hat for w in alive])
            if np.linalg.matrix_rank(span, tol=1e-8) < 2:
                continue
            seg_walls[owner] = tuple(alive)
    edges = set(seg_walls)

    faces = []
    for wi, wall in enumerate(walls):
        adj: dict[int, list[int]] = {}
        for (i, j) in edges:
            if wi in seg_walls[(i, j)]:
                adj.setdefault(i, []).append(j)
                adj.setdefault(j, []).append(i)
        if not adj:
            continue
        bad = {v: ns for v, ns in adj.items() if len(ns) != 2}
        if bad:
            raise RuntimeError(
                f"wall {wall.label}: 1-skeleton vertex degrees {sorted(bad)} != 2"
            )
        seen = set()
        loops = []
        for start in sorted(adj):
            if start in seen:
                continue
            loop = [start]
            seen.add(start)
            prev, cur = None, start
            while True:
                nxt = [v for v in adj[cur] if v != prev]
                nxt = nxt[0] if nxt else adj[cur][0]
                if nxt == start:
                    break
                loop.append(nxt)
                seen.add(nxt)
                prev, cur = cur, nxt
            if len(loop) < 3:
                raise RuntimeError(f"wall {wall.label}: degenerate loop {loop}")
            loops.append(loop)
        outward = wall.normal_hat if wall.side == "I" else -wall.normal_hat
        for li, loop in enumerate(loops):
            newell = _newell_normal(vertices, loop)
            sense = float(newell @ outward)
            if abs(sense) < 1e-12:
                raise RuntimeError(f"wall {wall.label}: flat degenerate loop")
            if sense < 0:
                loop = loop[::-1]
            pivot = loop.index(min(loop))
            loop = loop[pivot:] + loop[:pivot]
            label = wall.label if len(loops) == 1 else f"{wall.label}#{li}"
            faces.append(
                Face(
                    label=label,
                    wall=wall,
                    loop=tuple(loop),
                    normal=outward,
                    offset=float(outward @ vertices[loop[0]]),
                )
            )

    faces.sort(
        key=lambda f: (
            _LABEL_ORDER.get(f.label.split("[")[0], 9),
            f.label,
        )
    )

    directed = {}
    for fi, face in enumerate(faces):
        for i, j in zip(face.loop, face.loop[1:] + face.loop[:1]):
            if (i, j) in directed:
                raise RuntimeError(
                    f"directed edge {(i, j)} traversed twice; not orientable"
                )
            directed[(i, j)] = fi
    used_edges = set()
    for (i, j) in directed:
        if (j, i) not in directed:
            raise RuntimeError(f"edge {(i, j)} lacks its reversed twin; not closed")
        used_edges.add((min(i, j), max(i, j)))

    face_count_per_edge: dict[tuple[int, int], int] = {}
    for (i, j) in directed:
        e = (min(i, j), max(i, j))
        face_count_per_edge[e] = face_count_per_edge.get(e, 0) + 1
    if any(c != 2 for c in face_count_per_edge.values()):
        raise RuntimeError("non-manifold edge: wrong number of incident faces")

    touched = {v for f in faces for v in f.loop}
    if touched != set(range(nv)):
        raise RuntimeError("stray vertices not used by any face")

    poly = Polyhedron(
        vertices=vertices,
        faces=tuple(faces),
        edges=tuple(sorted(used_edges)),
    )
    if poly.euler_characteristic != 2:
        raise RuntimeError(
            f"Euler characteristic {poly.euler_characteristic} != 2"
        )
    return poly


def detect_symmetry(poly: Polyhedron, cs: ConstraintSet) -> Optional[float]:
    """Smallest chart rotation about the s-axis mapping vertices to vertices."""
    for psi in (math.pi / cs.p_hat, 2.0 * math.pi / cs.p_hat):
        c, s = math.cos(psi), math.sin(psi)
        rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        image = poly.vertices @ rot.T
        ok = True
        for p in image:
            if np.min(np.linalg.norm(poly.vertices - p, axis=1)) > 1e-8:
                ok = False
                break
        if ok:
            return psi
    return None


# ---------------------------------------------------------------------------
# pairings


@dataclass(frozen=True)
class Pairing:
    face_i: int
    face_j: int
    g1: CoverElement
    g2: CoverElement
    vertex_map: tuple  # (vertex index on face_i, vertex index on face_j) pairs
    syllables: int
    word: str


@dataclass(frozen=True)
class PairingReport:
    pairings: tuple
    unpaired: tuple

    def partner_of(self):
        return {p.face_i: p for p in self.pairings}


def _disc_pow(g: GroupElement, n: int) -> GroupElement:
    from .disc import group_mul

    out = GroupElement(0j, 1.0 + 0j)
    for _ in range(n):
        out = group_mul(out, g)
    return out


def _schreier_syllables(tri: TriangleGroupData, target: complex, depth: int = 8):
    """Generator word carrying the base point to `target` in the disc.

    Breadth-first search over the orbit graph whose moves are whole
    generator powers rot_u^t, rot_v^t (each a single syllable), so the
    search depth is counted in syllables directly.  Returns the syllable
    list, or None when the point is not reached within the depth bound.
    """
    if abs(target) < 1e-7:
        return []
    moves = []
    for t in range(1, tri.p):
        power = t if 2 * t <= tri.p else t - tri.p
        moves.append(("u", power, _disc_pow(tri.gen_u, t)))
    for t in range(1, tri.q):
        power = t if 2 * t <= tri.q else t - tri.q
        moves.append(("v", power, _disc_pow(tri.gen_v, t)))
    frontier = [(0j, ())]
    seen = {(0.0, 0.0)}
    for _ in range(depth):
        nxt = []
        for x, path in frontier:
            for letter, power, g in moves:
                if path and path[-1][0] == letter:
                    continue
                y = mobius_apply(g, x)
                key = (round(y.real, 6), round(y.imag, 6))
                if key in seen:
                    continue
                seen.add(key)
                path2 = path + ((letter, power),)
                if abs(y - target) < 1e-7:
                    # moves compose as functions, so the group word reads
                    # right to left; return it in product order
                    return [lp for lp in reversed(path2)]
                if len(seen) < 100_000:
                    nxt.append((y, path2))
        frontier = nxt
        if not frontier:
            break
    return None


def _gamma1_certificate(g1: CoverElement, cs: ConstraintSet, budget: int):
    """Express g1 as a word in the acting group's generators, or None.

    The disc image of the base point is pulled back by a Schreier word in
    the lifted u/v generators; the residue must be a power of the lifted
    stabilizer generator D^3 times a central element C^(k j).  Syllable
    count (each generator power is one syllable) must fit the budget.
    """
    gens = lifted_generators(cs.config)
    p_tri = cs.tri.p
    k = cs.k
    target = mobius_apply(GroupElement(g1.z, g1.w), 0j)
    syllables = _schreier_syllables(cs.tri, target)
    if syllables is None:
        return None
    word = COVER_ID
    for letter, power in syllables:
        word = cover_mul(word, cover_pow(gens[letter], power))
    resid = cover_mul(cover_inv(word), g1)
    if abs(resid.z) > 1e-7 * max(1.0, abs(resid.w)):
        return None
    turns = -resid.phi / math.pi
    scaled = turns * p_tri
    n_near = round(scaled)
    if abs(scaled - n_near) > _STAB_TURN_TOL:
        return None
    if n_near % k != 0:
        return None
    m_total = n_near // k
    t = m_total % p_tri
    j = (m_total - t) // p_tri
    check = cover_mul(word, cover_mul(cover_pow(gens["D"], 3 * t), central(k * j)))
    if abs(check.z - g1.z) > 1e-6 * max(1.0, abs(g1.w)) or abs(
        check.phi - g1.phi
    ) > 1e-6:
        return None
    count = len(syllables) + (1 if t else 0) + (1 if j else 0)
    if count > budget:
        return None
    parts = [f"{letter}^{power}" if power != 1 else letter for letter, power in syllables]
    if t:
        parts.append(f"(D^3)^{t}" if t != 1 else "D^3")
    if j:
        parts.append(f"(C^{k})^{j}" if j != 1 else f"C^{k}")
    return count, " ".join(parts) if parts else "e"


def _chart_image(g1: CoverElement, g2_inv: CoverElement, pts: np.ndarray):
    """Chart coordinates of g1 . p . g2^{-1} for chart points, or None.

    The image of a chart point is a cone point on some ray; it projects
    back to the chart by scaling to Re w = 1, which is admissible only if
    Re w stays positive and the lifted argument stays on the principal
    sheet — otherwise the image left the slab's sheet and the candidate
    pairing is geometric nonsense.
    """
    out = np.zeros_like(pts)
    for row, (x1, x2, s) in enumerate(pts):
        p = CoverElement(complex(x1, x2), complex(1.0, s), math.atan(s))
        q = cover_mul(cover_mul(g1, p), g2_inv)
        if q.w.real <= 1e-9 or abs(q.phi) >= math.pi / 2.0:
            return None
        out[row, 0] = q.z.real / q.w.real
        out[row, 1] = q.z.imag / q.w.real
        out[row, 2] = q.w.imag / q.w.real
    return out


def _match_vertices(image: np.ndarray, vertices: np.ndarray):
    """Injective map image row -> nearest vertex index, at PAIRING_MATCH_TOL."""
    mapping = []
    for row in image:
        dists = np.linalg.norm(vertices - row, axis=1)
        best = int(np.argmin(dists))
        if dists[best] > PAIRING_MATCH_TOL:
            return None
        mapping.append(best)
    if len(set(mapping)) != len(mapping):
        return None
    return mapping


def _cyclic_adjacent(loop_i, loop_j, mapping: dict) -> bool:
    """The vertex bijection must carry the boundary cycle to the boundary cycle."""
    n = len(loop_i)
    img = [mapping[v] for v in loop_i]
    pos = {v: i for i, v in enumerate(loop_j)}
    idx = [pos[v] for v in img]
    deltas = {(idx[(i + 1) % n] - idx[i]) % n for i in range(n)}
    return deltas == {1} or deltas == {n - 1}


def find_pairings(poly: Polyhedron, cs: ConstraintSet, max_word_len: int = 8):
    """Discover the side-face identifications of the domain.

    Every side face lies on a wall of the prism over one orbit point; the
    identification carrying it into the domain again must send that prism
    onto the central one, so its left factor has the form (wall-rotation
    power) * (wall element inverse), while the right factor ranges over
    small powers of the second acting group's generator.  Candidates are
    scanned in that two-parameter family; one is accepted when the chart
    image of the face's vertex loop is another face's loop (bijectively,
    respecting the cycle) and the left factor admits a word certificate in
    the acting group within the syllable budget.  The partner face is then
    assigned the inverse map, and faces left unpaired are reported, never
    silently dropped.

    The two slab faces fall out of the same scan: their wall elements are
    the axis steps D and D^-1, so the family degenerates to pure axis
    powers, and the certificate only accepts the ones lying in the acting
    groups.  That is the top-to-bottom gluing.
    """
    h_gen = cover_pow(cs.D, cs.tri.p)
    order = [i for i, f in enumerate(poly.faces) if not f.is_slab]
    order += [i for i, f in enumerate(poly.faces) if f.is_slab]
    loop_lookup = {frozenset(f.loop): i for i, f in enumerate(poly.faces)}
    t_range = range(-2 * cs.config.p_lcm, 2 * cs.config.p_lcm + 1)
    paired: dict[int, Pairing] = {}
    for fi in order:
        if fi in paired:
            continue
        face_i = poly.faces[fi]
        loop_i = list(face_i.loop)
        verts_i = poly.vertices[loop_i]
        w_inv = cover_inv(face_i.wall.g)
        found = None
        for t in t_range:
            g1 = cover_mul(cover_pow(cs.D, t), w_inv)
            for u in range(-4, 5):
                g2 = cover_pow(h_gen, u)
                g2_inv = cover_inv(g2)
                quick = _chart_image(g1, g2_inv, verts_i[:1])
                if quick is None:
                    continue
                if np.min(
                    np.linalg.norm(poly.vertices - quick[0], axis=1)
                ) > PAIRING_QUICK_TOL:
                    continue
                image = _chart_image(g1, g2_inv, verts_i)
                if image is None:
                    continue
                matched = _match_vertices(image, poly.vertices)
                if matched is None:
                    continue
                fj = loop_lookup.get(frozenset(matched))
                if fj is None or fj in paired:
                    continue
                if poly.faces[fj].is_slab != face_i.is_slab:
                    continue
                vmap = dict(zip(loop_i, matched))
                if fj == fi and all(a == b for a, b in vmap.items()):
                    continue
                if not _cyclic_adjacent(loop_i, list(poly.faces[fj].loop), vmap):
                    continue
                cert = _gamma1_certificate(g1, cs, max_word_len)
                if cert is None:
                    continue
                found = (fj, g1, g2, vmap, cert)
                break
            if found:
                break
        if not found:
            continue
        fj, g1, g2, vmap, (count, word) = found
        paired[fi] = Pairing(fi, fj, g1, g2, tuple(sorted(vmap.items())), count, word)
        if fj != fi:
            g1_inv, g2_inv = cover_inv(g1), cover_inv(g2)
            back = _chart_image(g1_inv, g2, poly.vertices[list(poly.faces[fj].loop)])
            if back is None:
                raise RuntimeError("pairing inverse left the chart sheet")
            back_match = _match_vertices(back, poly.vertices)
            rmap = {b: a for a, b in vmap.items()}
            if back_match is None or any(
                rmap[v] != m
                for v, m in zip(poly.faces[fj].loop, back_match)
            ):
                raise RuntimeError("pairing inverse does not invert the vertex map")
            cert_back = _gamma1_certificate(g1_inv, cs, max_word_len)
            if cert_back is None:
                raise RuntimeError("pairing inverse fails the word certificate")
            paired[fj] = Pairing(
                fj, fi, g1_inv, g2_inv,
                tuple(sorted(rmap.items())),
                cert_back[0], cert_back[1],
            )
    unpaired = tuple(
        poly.faces[i].label for i in range(len(poly.faces)) if i not in paired
    )
    pairings = tuple(paired[i] for i in sorted(paired))
    return PairingReport(pairings=pairings, unpaired=unpaired)


def _try_central(g: CoverElement) -> Optional[int]:
    """The central exponent of g, or None if g is not central."""
    if abs(g.z) > CENTRAL_Z_TOL:
        return None
    n = round(-g.phi / math.pi)
    if abs(g.phi + n * math.pi) > CENTRAL_Z_TOL:
        return None
    if abs(g.w - (-1.0) ** (n % 2)) > 10.0 * CENTRAL_Z_TOL:
        return None
    return n


def edge_cycle_check(poly: Polyhedron, report: PairingReport):
    """Develop the domain around every edge class; each cycle must close.

    An identification can carry the shared edge of two glued faces to
    itself, so the combinatorial state repeats long before the development
    has wrapped all the way around the edge.  The walk therefore composes
    pairings until the accumulated pair is central; that composite is the
    holonomy of one full turn and its two factors must be equal central
    powers, else the identifications do not define a quotient.  Chains that
    reach an unpaired face are skipped as boundary chains; with a complete
    pairing report there are none.  Returns one (central exponent, cycle
    length) record per edge class.
    """
    partner = report.partner_of()
    edge_faces: dict[tuple[int, int], list[int]] = {}
    for fi, face in enumerate(poly.faces):
        for i, j in zip(face.loop, face.loop[1:] + face.loop[:1]):
            edge_faces.setdefault((min(i, j), max(i, j)), []).append(fi)

    visited = set()
    records = []
    for edge, inc in edge_faces.items():
        for f0 in inc:
            if (f0, edge) in visited:
                continue
            g_tot1, g_tot2 = COVER_ID, COVER_ID
            f, e = f0, edge
            steps = 0
            boundary = False
            while True:
                visited.add((f, e))
                pr = partner.get(f)
                if pr is None:
                    boundary = True
                    break
                vmap = dict(pr.vertex_map)
                e2 = (min(vmap[e[0]], vmap[e[1]]), max(vmap[e[0]], vmap[e[1]]))
                g_tot1 = cover_mul(pr.g1, g_tot1)
                g_tot2 = cover_mul(pr.g2, g_tot2)
                others = [x for x in edge_faces[e2] if x != pr.face_j]
                if len(others) != 1:
                    raise RuntimeError(f"edge {e2} has ambiguous continuation")
                steps += 1
                f, e = others[0], e2
                n1 = _try_central(g_tot1)
                n2 = _try_central(g_tot2)
                if n1 is not None and n2 is not None:
                    break
                if steps > 200:
                    raise RuntimeError("edge cycle failed to close")
            if boundary:
                continue
            if (f, e) != (f0, edge):
                raise RuntimeError(
                    "central edge holonomy did not return to its start state"
                )
            if n1 != n2:
                raise RuntimeError(
                    f"edge cycle composition ({n1}, {n2}) is not a diagonal centre"
                )
            records.append((n1, steps))
    return records


@dataclass(frozen=True)
class LieMesh:
    """Euclidean mesh of the domain in tangent-space coordinates.

    The chart coordinates (x1, x2, s) are reused verbatim; the ambient
    quadratic form restricted to the chart is x1^2 + x2^2 - s^2, and the
    mesh is meant to be drawn with the flat Euclidean metric instead (the
    sign of the distinguished vertical axis direction is flipped).  Slab
    faces are flagged removable.
    """

    vertices: np.ndarray
    faces: tuple
    labels: tuple
    removable: tuple


def lie_project(poly: Polyhedron) -> LieMesh:
    return LieMesh(
        vertices=poly.vertices.copy(),
        faces=tuple(f.loop for f in poly.faces),
        labels=tuple(f.label for f in poly.faces),
        removable=tuple(f.is_slab for f in poly.faces),
    )
