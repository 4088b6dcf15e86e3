"""Polyhedral fundamental domains for Lorentz bi-quotients.

The group G is the universal cover of SU(1,1).  For two infinite series of
pairs (Gamma_1, Gamma_2) of discrete subgroups, built from level-k lifts of
hyperbolic triangle groups (p,3,3) and of a cyclic group of order 3, this
package constructs an explicit compact polyhedral fundamental domain for the
two-sided action (g1, g2).x = g1 x g2^{-1}, verifies the numeric inequalities
that reduce the construction to an edge-corona computation in the hyperbolic
disc, and exports the resulting polyhedra as meshes and reports.
"""

from .disc import (
    GroupElement,
    TriangleGroupData,
    build_triangle_group,
    dirichlet_corona_oracle,
    edge_corona,
    mobius_apply,
    orbit,
    rotation_about,
)
from .cover import (
    CoverElement,
    LevelConfig,
    axis_rotation,
    central,
    cover_inv,
    cover_mul,
    cover_pow,
    lift_level,
    lift_word,
    product_defect,
    R_param,
)
from .halfspaces import (
    HalfSpaceConstraint,
    cylinder_bounds,
    membership,
    pairing_form,
    prism_membership,
    slab_membership,
)
from .reduction import (
    ReductionReport,
    check_reduction_bound,
    ell,
    f_bound,
    sample_equivalence,
)
from .domain import (
    ConstraintSet,
    PairingReport,
    Polyhedron,
    build_polyhedron,
    detect_symmetry,
    edge_cycle_check,
    enumerate_vertices,
    find_pairings,
    lie_project,
    linearize,
    membership_mask,
    series_constraints,
)
from .export import (
    report_dict,
    singularity_label,
    write_artifacts,
)

__version__ = "0.1.0"

__all__ = [
    "GroupElement",
    "TriangleGroupData",
    "build_triangle_group",
    "dirichlet_corona_oracle",
    "edge_corona",
    "mobius_apply",
    "orbit",
    "rotation_about",
    "CoverElement",
    "LevelConfig",
    "axis_rotation",
    "central",
    "cover_inv",
    "cover_mul",
    "cover_pow",
    "lift_level",
    "lift_word",
    "product_defect",
    "R_param",
    "HalfSpaceConstraint",
    "cylinder_bounds",
    "membership",
    "pairing_form",
    "prism_membership",
    "slab_membership",
    "ReductionReport",
    "check_reduction_bound",
    "ell",
    "f_bound",
    "sample_equivalence",
    "ConstraintSet",
    "PairingReport",
    "Polyhedron",
    "build_polyhedron",
    "detect_symmetry",
    "edge_cycle_check",
    "enumerate_vertices",
    "find_pairings",
    "lie_project",
    "linearize",
    "membership_mask",
    "series_constraints",
    "report_dict",
    "singularity_label",
    "write_artifacts",
]
