"""Spherical Laguerre Voronoi diagrams: construction, recognition, recovery."""

from .diagram import (
    ForwardDiagram,
    GeneratorSet,
    brute_force_assign,
    circle_plane,
    construct_slvd,
    parse_gen,
    plane_circle,
    random_generators,
    serialize_gen,
)
from .errors import GeometryError, InvalidTessellation, ParseError
from .polyhedra import (
    ConvexPolyhedron,
    Line3,
    Plane,
    ProjectiveMap,
    apply_map,
    central_projection,
    halfspace_intersection,
    plane_intersection_line,
    three_planes_point,
)
from .recognition import (
    PlaneAssignment,
    RecognitionResult,
    SeedChoice,
    algorithm1_seed,
    algorithm2_propagate,
    algorithm3_verify,
    consistency_residual,
    default_seed_choice,
    dof_probe,
    recognize,
    recover_generators,
)
from .sphere import (
    GeodesicArc,
    GreatCircle,
    SphericalCircle,
    geodesic_distance,
    is_convex_spherical_polygon,
    laguerre_bisector,
    laguerre_proximity,
    point_in_spherical_polygon,
)
from .tessellation import Tessellation, parse_tes, perturb_vertex, serialize_tes
from .tolerances import DEFAULT_TOL, Tolerances

__all__ = [
    "ConvexPolyhedron",
    "DEFAULT_TOL",
    "ForwardDiagram",
    "GeneratorSet",
    "GeodesicArc",
    "GeometryError",
    "GreatCircle",
    "InvalidTessellation",
    "Line3",
    "ParseError",
    "Plane",
    "PlaneAssignment",
    "ProjectiveMap",
    "RecognitionResult",
    "SeedChoice",
    "SphericalCircle",
    "Tessellation",
    "Tolerances",
    "algorithm1_seed",
    "algorithm2_propagate",
    "algorithm3_verify",
    "apply_map",
    "brute_force_assign",
    "central_projection",
    "circle_plane",
    "consistency_residual",
    "construct_slvd",
    "default_seed_choice",
    "dof_probe",
    "geodesic_distance",
    "halfspace_intersection",
    "is_convex_spherical_polygon",
    "laguerre_bisector",
    "laguerre_proximity",
    "parse_gen",
    "parse_tes",
    "perturb_vertex",
    "plane_circle",
    "plane_intersection_line",
    "point_in_spherical_polygon",
    "random_generators",
    "recognize",
    "recover_generators",
    "serialize_gen",
    "serialize_tes",
    "three_planes_point",
]

__version__ = "0.1.0"
