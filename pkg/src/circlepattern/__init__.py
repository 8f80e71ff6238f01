"""Circle patterns with prescribed exterior intersection angles.

Validates combinatorial angle conditions on sphere triangulations, solves
for planar and spherical circle patterns (obtuse angles included),
verifies them independently, and builds the dual compact convex
hyperbolic polyhedron in the Klein model.
"""
from .conditions import (
    AngleAssignment,
    ConditionReport,
    Violation,
    audit_circuit_sums,
    check_andreev,
    check_c1,
    check_c2,
    check_c3_c4,
    classify,
    detect_whitehead,
)
from .configurations import (
    CurvatureReport,
    EuclideanConfiguration,
    SphericalConfiguration,
)
from .degeneration import (
    DegenerationFunctional,
    connected_subsets,
    degeneration_functional,
    rank_collapse_suspects,
)
from .euclidean import layout_euclidean, pick_marked_face, solve_euclidean
from .options import SolveOptions
from .polyhedron import (
    HalfSpace,
    HyperbolicPolyhedron,
    build_polyhedron,
    check_polyhedron,
    export_obj,
)
from .spherical import lift_to_sphere, solve_spherical
from .triangulation import (
    Circuit,
    Triangulation,
    VertexSubsetGeometry,
    build_triangulation,
    dual_of_trivalent,
    enumerate_simple_cycles,
    enumerate_two_arcs,
    polyhedron_from_triangulation,
    subset_geometry,
)
from .triples import (
    TripleGeometry,
    TripleSpec,
    containment_angle_check,
    edge_length,
    edge_lengths,
    feasibility,
    feasibility_margin,
    inner_angles,
    inversive_distance,
    limit_profile,
    place_triple,
    triple_geometry,
    triple_intersection_empty,
)
from .verify import CirclePattern, VerificationReport, contact_graph, flower_check, verify_pattern

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
