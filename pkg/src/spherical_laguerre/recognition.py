"""Deciding whether a tessellation is a spherical Laguerre Voronoi diagram.

The pipeline builds a candidate polyhedron face by face:

1. seed: pick one degree-3 vertex and construct planes for its three
   polygons from four free parameters (center, radius, one point on a
   perpendicular arc);
2. propagate: repeatedly pick a vertex with exactly two of its three face
   planes built (max-priority queue keyed by that count) and construct the
   third plane through the two existing intersection lines;
3. verify: every vertex left unmarked by propagation must have its three
   face planes meeting in a single point on the ray from the origin through
   the vertex.

On success the face planes are shrunk until they all cut the sphere and
returned as a witness generator set. Witnesses are not unique: any two
polyhedra projecting to the same tessellation differ by a ray-preserving
projective transform with four degrees of freedom.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .diagram import GeneratorSet, circle_plane, construct_slvd
from .errors import (
    ArcMissesPolygon,
    DegeneratePropagation,
    DegenerateSeed,
    DisconnectedPropagation,
    GeometryError,
    InvalidTessellation,
    NonPositiveOffset,
    ParallelPlanes,
    SeedOutOfFace,
)
from .polyhedra import (
    Line3,
    Plane,
    ProjectiveMap,
    fit_projection_preserving_map,
    intersect_plane_pair,
    solve_plane_triples,
)
from .sphere import (
    SphericalCircle,
    Vec3,
    distance_to_polygon_boundary,
    normalize,
    point_strictly_in_spherical_polygon,
    polygon_edge_normals,
    unit_vector,
)
from .tessellation import Tessellation, VertexStar, match_tessellations
from .tolerances import DEFAULT_TOL, Tolerances

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SeedChoice:
    """The four free parameters of the seed construction.

    ``p_i`` (two parameters) and ``r_i`` define the first circle inside the
    seed vertex's first polygon; ``q_j_param`` in (0, 1) locates the point
    q_j along the admissible piece, inside the second polygon, of the arc
    through p_i perpendicular to the shared edge.
    """

    seed_vertex: int
    p_i: Vec3
    r_i: float
    q_j_param: float = 0.5


@dataclass(eq=False)
class PlaneAssignment:
    """Per-face planes plus the per-vertex marks left by propagation.

    A marked vertex was consumed while building planes (its three planes meet
    on its ray by construction); unmarked vertices carry the actual
    recognition evidence and are checked afterwards.
    """

    planes: list[Plane | None]
    marks: np.ndarray
    seed_vertex: int
    order: list[tuple[int, int]] = field(default_factory=list)  # (vertex, face) per step

    @property
    def complete(self) -> bool:
        return all(p is not None for p in self.planes)


@dataclass(frozen=True)
class Witness:
    vertex: int
    residual: float


@dataclass(eq=False)
class RecognitionResult:
    verdict: bool
    planes: PlaneAssignment | None = None
    witness: Witness | None = None
    generators: GeneratorSet | None = None
    max_residual: float | None = None


@dataclass(frozen=True)
class PropagationStats:
    accepted_pops: int
    stale_pops: int
    full_pops: int  # popped with all three planes already built


# -- seed construction ---------------------------------------------------------


def _edge_plane_normal(t: Tessellation, v: int, edge: tuple[int, int]) -> Vec3:
    """Unit normal of the plane through the origin and a tessellation edge.

    Oriented by the cross product from vertex ``v`` to the edge's other
    endpoint, which keeps the derived line directions deterministic.
    """
    w = edge[1] if edge[0] == v else edge[0]
    return normalize(np.cross(t.vertices[v], t.vertices[w]))


def _plane_from_line_and_point(line: Line3, point: Vec3, tol: Tolerances) -> Plane:
    rel = np.asarray(point, dtype=float) - line.point
    n = np.cross(line.direction, rel)
    nn = float(np.linalg.norm(n))
    if nn <= tol.eps_par * max(1.0, float(np.linalg.norm(rel))):
        raise GeometryError("point lies on the line; plane undefined")
    n = n / nn
    d = float(np.dot(n, line.point))
    if d < 0:
        n, d = -n, -d
    if d <= tol.eps_offset:
        raise GeometryError("plane through the origin cannot be a face plane")
    return Plane(n, d)


def _plane_ray_point(plane: Plane, ray: Vec3, tol: Tolerances) -> Vec3:
    """Intersection of a plane with the line through the origin along ``ray``."""
    denom = float(np.dot(plane.normal, ray))
    if abs(denom) <= tol.eps_par:
        raise GeometryError("ray is parallel to the plane")
    return (plane.offset / denom) * np.asarray(ray, dtype=float)


def _circle_polygon_interval(
    circle_normal: Vec3, anchor: Vec3, poly: np.ndarray, tol: Tolerances
) -> tuple[float, float, Vec3, Vec3]:
    """Angular interval of the great circle lying inside a convex polygon.

    The circle is parametrized as x(theta) = cos(theta) u + sin(theta) w with
    u = anchor (a point on the circle). Feasibility against each edge plane
    is a half-turn interval whose endpoints are analytic, so the feasible set
    is located by evaluating the minimum edge margin between consecutive
    candidate angles. Returns (theta1, theta2, u, w) with theta2 > theta1.
    """
    u = np.asarray(anchor, dtype=float)
    w = np.cross(circle_normal, u)
    normals = polygon_edge_normals(poly, tol)
    a = normals @ u
    b = normals @ w

    cands: list[float] = []
    for ai, bi in zip(a, b):
        phi = math.atan2(bi, ai)
        cands.append((phi - math.pi / 2) % TWO_PI)
        cands.append((phi + math.pi / 2) % TWO_PI)
    cands = sorted(set(cands))
    if len(cands) < 2:
        raise ArcMissesPolygon("degenerate edge constraints")

    def margin(theta: float) -> float:
        return float(np.min(a * math.cos(theta) + b * math.sin(theta)))

    spans = []
    for idx, lo in enumerate(cands):
        hi = cands[(idx + 1) % len(cands)]
        if idx + 1 == len(cands):
            hi += TWO_PI
        spans.append((lo, hi, margin(0.5 * (lo + hi)) > tol.boundary_slack))

    if not any(ok for (_, _, ok) in spans):
        raise ArcMissesPolygon("the arc never enters the polygon's interior")
    if all(ok for (_, _, ok) in spans):
        raise ArcMissesPolygon("circle unexpectedly inside the polygon everywhere")

    # Rotate the span list so it starts with an infeasible span, then collect
    # maximal feasible runs; a convex polygon admits exactly one, but pick the
    # longest deterministically if rounding ever splits it.
    start = next(i for i, (_, _, ok) in enumerate(spans) if not ok)
    ordered = spans[start:] + spans[:start]
    runs: list[tuple[float, float]] = []
    current: tuple[float, float] | None = None
    for lo, hi, ok in ordered:
        if ok:
            current = (lo, hi) if current is None else (current[0], current[1] + (hi - lo))
        elif current is not None:
            runs.append(current)
            current = None
    if current is not None:
        runs.append(current)
    theta1, theta2 = max(runs, key=lambda r: r[1] - r[0])
    return theta1, theta2, u, w


def default_seed_choice(
    t: Tessellation,
    seed_vertex: int = 0,
    q_j_param: float = 0.5,
    tol: Tolerances = DEFAULT_TOL,
) -> SeedChoice:
    """Deterministic valid choice: polygon centroid, half the clearance radius.

    Interiority of p_i is the only hard requirement, so the normalized vertex
    centroid of the first incident polygon is used, nudged toward the
    polygon's first vertex in the rare case it is not strictly interior.

    The perpendicular arc from the centroid can miss the adjacent polygon
    entirely on skewed cells; the choice then falls back to a center on the
    perpendicular great circle through the shared edge's midpoint, which
    always crosses into the neighbor.
    """
    star = t.vertex_stars()[seed_vertex]
    fi, fj, _fk = star.faces
    poly = t.face_polygon(fi)
    p = normalize(poly.sum(axis=0))
    for _ in range(64):
        if point_strictly_in_spherical_polygon(p, poly, margin=tol.boundary_slack, tol=tol):
            break
        p = normalize(p + poly[0])
    else:
        raise SeedOutOfFace(f"no interior point found for face {fi}")

    m_ij = _edge_plane_normal(t, seed_vertex, star.edge_between(fi, fj))
    poly_j = t.face_polygon(fj)

    def arc_reaches_neighbor(center: Vec3) -> bool:
        perp = np.cross(m_ij, center)
        if float(np.linalg.norm(perp)) <= tol.eps_par:
            return False
        try:
            _circle_polygon_interval(normalize(perp), center, poly_j, tol)
        except ArcMissesPolygon:
            return False
        return True

    if not arc_reaches_neighbor(p):
        a, b = star.edge_between(fi, fj)
        mid = normalize(t.vertices[a] + t.vertices[b])
        perp_mid = normalize(np.cross(m_ij, mid))
        theta1, theta2, u, w = _circle_polygon_interval(perp_mid, mid, poly, tol)
        theta = 0.5 * (theta1 + theta2)
        p = normalize(math.cos(theta) * u + math.sin(theta) * w)
        if not point_strictly_in_spherical_polygon(p, poly, margin=tol.boundary_slack, tol=tol):
            raise SeedOutOfFace(f"no workable interior point found for face {fi}")

    r = 0.5 * distance_to_polygon_boundary(p, poly, tol)
    return SeedChoice(seed_vertex, p, r, q_j_param)


def random_seed_choice(
    t: Tessellation, rng: np.random.Generator, tol: Tolerances = DEFAULT_TOL
) -> SeedChoice:
    """Random valid choice, for probing the four degrees of freedom.

    The radius is drawn below the chosen center's clearance from the polygon
    boundary, keeping the whole circle inside its polygon; circles far larger
    than that can push the witness polyhedron's vertices through infinity,
    which the positive-ray test then rejects.
    """
    for _ in range(256):
        v = int(rng.integers(t.n_vertices))
        star = t.vertex_stars()[v]
        poly = t.face_polygon(star.faces[0])
        weights = rng.dirichlet(np.ones(len(poly)))
        p = normalize(weights @ poly)
        if not point_strictly_in_spherical_polygon(p, poly, margin=1e-9, tol=tol):
            continue
        clearance = distance_to_polygon_boundary(p, poly, tol)
        if clearance <= 1e-6:
            continue
        r = float(rng.uniform(0.1, 0.9)) * clearance
        q = float(rng.uniform(0.1, 0.9))
        return SeedChoice(v, p, r, q)
    raise SeedOutOfFace("could not sample an interior seed point")


def algorithm1_seed(
    t: Tessellation, choice: SeedChoice, tol: Tolerances = DEFAULT_TOL
) -> tuple[Plane, Plane, Plane]:
    """Construct the three planes for the faces (i, j, k) at the seed vertex.

    The first plane is the plane through the chosen circle. The second is
    pinned by the first plane's intersection line with the edge plane of the
    shared edge plus the point q_j. The third must contain the two remaining
    intersection lines, which are co-planar whenever the input data is
    consistent; that co-planarity is asserted before building it.
    """
    star = t.vertex_stars()[choice.seed_vertex]
    fi, fj, fk = star.faces
    x_v = t.vertices[choice.seed_vertex]

    poly_i = t.face_polygon(fi)
    p_i = unit_vector(choice.p_i, tol)
    if not point_strictly_in_spherical_polygon(p_i, poly_i, margin=tol.boundary_slack, tol=tol):
        raise SeedOutOfFace(f"p_i is not strictly inside face {fi}")
    if not 0.0 < choice.q_j_param < 1.0:
        raise ValueError(f"q_j_param {choice.q_j_param} outside (0, 1)")

    plane_i = circle_plane(SphericalCircle(p_i, choice.r_i))

    m_ij = _edge_plane_normal(t, choice.seed_vertex, star.edge_between(fi, fj))
    m_ik = _edge_plane_normal(t, choice.seed_vertex, star.edge_between(fi, fk))
    m_jk = _edge_plane_normal(t, choice.seed_vertex, star.edge_between(fj, fk))

    try:
        line_ij = intersect_plane_pair(plane_i.normal, plane_i.offset, m_ij, 0.0, tol)
        line_ik = intersect_plane_pair(plane_i.normal, plane_i.offset, m_ik, 0.0, tol)
    except ParallelPlanes as exc:
        raise DegenerateSeed(f"first plane is parallel to an edge plane: {exc}") from exc

    # Arc through p_i perpendicular to the edge between faces i and j: its
    # plane normal is orthogonal to both the edge-plane normal and p_i.
    perp = np.cross(m_ij, p_i)
    if float(np.linalg.norm(perp)) <= tol.eps_par:
        raise DegenerateSeed("p_i is a pole of the shared edge's great circle")
    perp = normalize(perp)

    theta1, theta2, u, w = _circle_polygon_interval(perp, p_i, t.face_polygon(fj), tol)
    theta_q = theta1 + choice.q_j_param * (theta2 - theta1)
    q_j = math.cos(theta_q) * u + math.sin(theta_q) * w

    try:
        plane_j = _plane_from_line_and_point(line_ij, q_j, tol)
    except GeometryError as exc:
        raise DegenerateSeed(f"q_j does not pin the second plane: {exc}") from exc

    try:
        line_jk = intersect_plane_pair(plane_j.normal, plane_j.offset, m_jk, 0.0, tol)
    except ParallelPlanes as exc:
        raise DegenerateSeed(f"second plane is parallel to an edge plane: {exc}") from exc

    gap = line_jk.point - line_ik.point
    coplanarity = abs(float(np.dot(np.cross(line_ik.direction, line_jk.direction), gap)))
    if coplanarity > tol.eps_det * max(1.0, float(np.linalg.norm(gap))):
        raise DegenerateSeed(
            f"intersection lines are not co-planar (residual {coplanarity:.3g})")

    n_k = np.cross(line_ik.direction, line_jk.direction)
    nn = float(np.linalg.norm(n_k))
    if nn <= tol.eps_par:
        raise DegenerateSeed("intersection lines are parallel; third plane undefined")
    n_k = n_k / nn
    try:
        v_seed = _plane_ray_point(plane_i, x_v, tol)
    except GeometryError as exc:
        raise DegenerateSeed(str(exc)) from exc
    d_k = float(np.dot(n_k, v_seed))
    if d_k < 0:
        n_k, d_k = -n_k, -d_k
    if d_k <= tol.eps_offset:
        raise DegenerateSeed("third plane would pass through the origin")
    plane_k = Plane(n_k, d_k)

    return plane_i, plane_j, plane_k


# -- propagation ---------------------------------------------------------------


def _run_propagation(
    t: Tessellation, seed_vertex: int, seed_values, build, values=None,
    blocked: frozenset[int] = frozenset(),
):
    """Priority-queue engine behind the plane propagation.

    ``build(vertex, p, q, l)`` returns the object to assign to face l and may
    read the live assignment through ``values`` (pass a shared list for
    that). Vertices in ``blocked`` are never used as construction sites; the
    witness localization relies on that to keep a suspect vertex and its
    neighbors out of every geometric computation.
    """
    stars = t.vertex_stars()
    n = t.n_faces
    nv = t.n_vertices
    if values is None:
        values = [None] * n
    key = [0] * nv
    marks = np.zeros(nv, dtype=bool)
    heap: list[tuple[int, int]] = []
    assigned = 0
    accepted = stale = full = 0

    def assign(face: int, value) -> None:
        nonlocal assigned
        values[face] = value
        assigned += 1
        for v in t.faces[face]:
            key[v] += 1
            if not marks[v] and key[v] <= 2 and v not in blocked:
                heapq.heappush(heap, (-key[v], v))

    star0 = stars[seed_vertex]
    for face, value in zip(star0.faces, seed_values):
        assign(face, value)
    marks[seed_vertex] = True

    order: list[tuple[int, int]] = []
    while assigned < n:
        if not heap:
            raise DisconnectedPropagation(
                "queue drained before every face had a plane")
        negk, v = heapq.heappop(heap)
        if marks[v] or -negk != key[v]:
            stale += 1
            continue
        if key[v] == 3:
            full += 1
            continue
        if key[v] < 2:
            raise DisconnectedPropagation(
                "no vertex with exactly two planes remains")
        fs = stars[v].faces
        missing = [f for f in fs if values[f] is None]
        if len(missing) != 1:
            stale += 1
            continue
        l = missing[0]
        p, q = sorted(f for f in fs if f != l)
        value = build(v, p, q, l)
        accepted += 1
        assign(l, value)
        marks[v] = True
        order.append((v, l))

    stats = PropagationStats(accepted_pops=accepted, stale_pops=stale, full_pops=full)
    return values, marks, order, stats


def _build_plane(
    t: Tessellation,
    stars: list[VertexStar],
    values: list[Plane | None],
    v: int,
    p: int,
    q: int,
    l: int,
    vprime_param: float,
    tol: Tolerances,
) -> Plane:
    """One propagation step: the plane of face l from the planes of p and q.

    The two edge planes through the vertex meet in the ray through it, so the
    anchor point is the first plane's intersection with that ray; the plane
    is spanned by the line (plane p, edge plane p-l) and a point taken on the
    line (plane q, edge plane q-l) one unit along its direction. On Laguerre
    input the anchor already lies on both lines, making the parameter choice
    irrelevant.
    """
    star = stars[v]
    x_v = t.vertices[v]
    plane_p: Plane = values[p]  # type: ignore[assignment]
    plane_q: Plane = values[q]  # type: ignore[assignment]

    m_pl = _edge_plane_normal(t, v, star.edge_between(p, l))
    m_ql = _edge_plane_normal(t, v, star.edge_between(q, l))
    try:
        line_pl = intersect_plane_pair(plane_p.normal, plane_p.offset, m_pl, 0.0, tol)
        line_ql = intersect_plane_pair(plane_q.normal, plane_q.offset, m_ql, 0.0, tol)
        anchor = _plane_ray_point(plane_p, x_v, tol)
    except (ParallelPlanes, GeometryError) as exc:
        raise DegeneratePropagation(v, str(exc)) from exc

    s0 = float(np.dot(line_ql.direction, anchor - line_ql.point))
    v_prime = line_ql.at(s0 + vprime_param)

    rel = v_prime - anchor
    n_l = np.cross(line_pl.direction, rel)
    nn = float(np.linalg.norm(n_l))
    if nn <= tol.eps_par * max(1.0, float(np.linalg.norm(rel))):
        raise DegeneratePropagation(v, "support point degenerate with the line")
    n_l = n_l / nn
    d_l = float(np.dot(n_l, anchor))
    if d_l < 0:
        n_l, d_l = -n_l, -d_l
    if d_l <= tol.eps_offset:
        raise DegeneratePropagation(v, "constructed plane passes through the origin")
    return Plane(n_l, d_l)


def algorithm2_propagate(
    t: Tessellation,
    seed_vertex: int,
    seed_planes: tuple[Plane, Plane, Plane],
    vprime_param: float = 1.0,
    tol: Tolerances = DEFAULT_TOL,
    with_stats: bool = False,
    blocked: frozenset[int] = frozenset(),
):
    """Extend the three seed planes to a plane on every face.

    ``vprime_param`` moves the support point along its line; it is exposed
    only so tests can confirm the construction does not depend on it for
    Laguerre input. Returns the PlaneAssignment (and the queue statistics
    when ``with_stats`` is set).
    """
    stars = t.vertex_stars()
    values_ref: list[Plane | None] = [None] * t.n_faces

    def build(v: int, p: int, q: int, l: int) -> Plane:
        return _build_plane(t, stars, values_ref, v, p, q, l, vprime_param, tol)

    values, marks, order, stats = _run_propagation(
        t, seed_vertex, seed_planes, build, values=values_ref, blocked=blocked)
    pa = PlaneAssignment(planes=values, marks=marks, seed_vertex=seed_vertex, order=order)
    if with_stats:
        return pa, stats
    return pa


# -- verification ---------------------------------------------------------------


def radial_residuals(
    t: Tessellation, pa: PlaneAssignment, tol: Tolerances = DEFAULT_TOL
) -> np.ndarray:
    """Angle between each vertex and its three-plane intersection point.

    The angle is measured through atan2 of the cross and dot products, so
    sub-1e-8 residuals are meaningful; an intersection behind the origin
    shows up as an angle above pi/2 and a degenerate triple as infinity.
    """
    if not pa.complete:
        raise ValueError("plane assignment is incomplete")
    normals = np.array([p.normal for p in pa.planes])  # type: ignore[union-attr]
    offsets = np.array([p.offset for p in pa.planes])  # type: ignore[union-attr]
    vf = np.array(t.vertex_faces)
    pts, ok = solve_plane_triples(normals[vf], offsets[vf], tol)
    norms = np.linalg.norm(pts, axis=1)
    ok &= norms > tol.eps_norm
    safe = np.where(ok[:, None], pts, np.array([1.0, 0.0, 0.0]))
    unit = safe / np.linalg.norm(safe, axis=1)[:, None]
    dots = np.sum(unit * t.vertices, axis=1)
    crosses = np.linalg.norm(np.cross(unit, t.vertices), axis=1)
    angles = np.arctan2(crosses, dots)
    angles[~ok] = np.inf
    return angles


def algorithm3_verify(
    t: Tessellation,
    pa: PlaneAssignment,
    eps_rec: float = 1e-6,
    tol: Tolerances = DEFAULT_TOL,
) -> RecognitionResult:
    """Radial consistency check of every unmarked vertex.

    The intersection point must exist (non-degenerate plane triple) and lie
    on the positive ray through the vertex within ``eps_rec`` radians. The
    first failing vertex in index order becomes the witness.
    """
    residuals = radial_residuals(t, pa, tol)
    unmarked = np.flatnonzero(~pa.marks)
    for v in unmarked:
        if not residuals[v] <= eps_rec:
            return RecognitionResult(
                verdict=False,
                planes=pa,
                witness=Witness(int(v), float(residuals[v])),
            )
    marks = pa.marks.copy()
    marks[unmarked] = True
    checked_max = float(residuals[unmarked].max()) if len(unmarked) else 0.0
    return RecognitionResult(
        verdict=True,
        planes=PlaneAssignment(pa.planes, marks, pa.seed_vertex, list(pa.order)),
        max_residual=checked_max,
    )


def consistency_residual(
    t: Tessellation, pa: PlaneAssignment, tol: Tolerances = DEFAULT_TOL
) -> float:
    """Max radial residual over ALL vertices; a diagnostic, not a verdict."""
    return float(np.max(radial_residuals(t, pa, tol)))


# -- generator recovery ----------------------------------------------------------


def recover_generators(pa: PlaneAssignment, tol: Tolerances = DEFAULT_TOL) -> GeneratorSet:
    """Shrink the plane family until every plane cuts the sphere, then read circles.

    The shrink is uniform (offsets scaled by 0.9 / max offset when any offset
    reaches 1), which leaves the central projection untouched. The result is
    one member of the non-unique witness family.
    """
    if not pa.complete:
        raise ValueError("plane assignment is incomplete")
    offsets = np.array([p.offset for p in pa.planes])  # type: ignore[union-attr]
    if np.any(offsets <= 0):
        raise NonPositiveOffset("a face plane does not enclose the origin")
    d_max = float(offsets.max())
    scale = 0.9 / d_max if d_max >= 1.0 else 1.0
    circles = [
        SphericalCircle(p.normal, math.acos(min(1.0, p.offset * scale)))  # type: ignore[union-attr]
        for p in pa.planes
    ]
    return GeneratorSet(circles)


# -- full pipeline ----------------------------------------------------------------


def _renormalize_assignment(
    t: Tessellation, pa: PlaneAssignment, tol: Tolerances,
    far_vertex_bound: float = 1e4,
) -> PlaneAssignment | None:
    """Recenter a plane family whose polyhedron misses or barely encloses O.

    Seed choices far from the generating configuration can land on a family
    member whose vertices sit on the correct rays but with some behind the
    origin or nearly at infinity (the member's polyhedron does not properly
    contain O). The family acts on the dual points n/d as scale plus
    translation, so subtracting an interior point of the dual point cloud
    yields an equivalent member whose polyhedron encloses O again. Vertex
    rays are preserved exactly, so this can never change which vertices are
    radially consistent; it only repairs the sign and the conditioning.

    Returns the recentered assignment, or None when no vertex is behind the
    origin or suspiciously far out (nothing to repair).
    """
    normals = np.array([p.normal for p in pa.planes])  # type: ignore[union-attr]
    offsets = np.array([p.offset for p in pa.planes])  # type: ignore[union-attr]
    vf = np.array(t.vertex_faces)
    pts, ok = solve_plane_triples(normals[vf], offsets[vf], tol)
    behind = np.sum(pts * t.vertices, axis=1) <= 0
    far = np.linalg.norm(pts, axis=1) > far_vertex_bound
    if not bool(np.any(behind | far | ~ok)):
        return None
    duals = normals / offsets[:, None]
    center = duals.mean(axis=0)
    for shrink in (1.0, 0.9, 0.5, 0.25):
        shifted = duals - shrink * center
        norms = np.linalg.norm(shifted, axis=1)
        if float(norms.min()) > 1e-6:
            planes = [Plane(shifted[i] / norms[i], 1.0 / norms[i])
                      for i in range(len(shifted))]
            return PlaneAssignment(planes, pa.marks.copy(), pa.seed_vertex, list(pa.order))
    return None


def _propagate_normalized(
    t: Tessellation,
    seed_vertex: int,
    seed_planes: tuple[Plane, Plane, Plane],
    tol: Tolerances,
    blocked: frozenset[int] = frozenset(),
) -> PlaneAssignment:
    """Propagate, then recenter and re-propagate if the member came out extreme.

    A flip can hide at a marked vertex (never checked by the radial pass),
    so recentering is decided on all vertices before any verdict is read.
    Planes constructed while the member was extreme carry its poor
    conditioning, so propagation is rerun from the recentered seed trio,
    which rebuilds the same family member cleanly.
    """
    pa = algorithm2_propagate(t, seed_vertex, seed_planes, tol=tol, blocked=blocked)
    recentered = _renormalize_assignment(t, pa, tol)
    if recentered is not None:
        star = t.vertex_stars()[seed_vertex]
        seed_trio = tuple(recentered.planes[f] for f in star.faces)
        pa = algorithm2_propagate(t, seed_vertex, seed_trio, tol=tol, blocked=blocked)
    return pa


def recognize(
    t: Tessellation,
    choice: SeedChoice | None = None,
    eps_rec: float = 1e-6,
    tol: Tolerances = DEFAULT_TOL,
    localize: bool = True,
) -> RecognitionResult:
    """Seed, propagate and verify; recover a witness generator set on success.

    A tessellation failing structural validation raises InvalidTessellation
    rather than returning a false verdict. On a true verdict the recovered
    generators are re-fed through the forward construction and the projected
    tessellation is required to match the input within ``eps_rec`` per
    vertex. On a false verdict the witness is, when possible, localized to
    the single vertex whose displacement explains every failure.
    """
    report = t.validate(tol)
    if not report.ok:
        raise InvalidTessellation(report.issues[0].message)
    if choice is None:
        choice = default_seed_choice(t, tol=tol)

    seed_planes = algorithm1_seed(t, choice, tol)
    pa = _propagate_normalized(t, choice.seed_vertex, seed_planes, tol)
    result = algorithm3_verify(t, pa, eps_rec, tol)

    if not result.verdict:
        if localize:
            refined = _localize_witness(t, pa, eps_rec, tol)
            if refined is not None:
                result = replace(result, witness=refined)
        return result

    generators = recover_generators(pa, tol)
    forward = construct_slvd(generators, tol)
    if forward.active != tuple(range(t.n_faces)):
        raise RuntimeError(
            "recovered generators lost a face on reprojection; verification "
            "and reconstruction disagree")
    deviation = match_tessellations(t, forward.tessellation)
    if deviation is None or deviation > eps_rec:
        raise RuntimeError(
            f"reprojection deviates by {deviation} rad from the input; "
            "verification and reconstruction disagree")
    result.generators = generators
    return result


def _localize_witness(
    t: Tessellation, pa: PlaneAssignment, eps_rec: float, tol: Tolerances,
    max_candidates: int = 64, max_seed_tries: int = 8,
) -> Witness | None:
    """Pin the witness to a single displaced vertex when that explains everything.

    Plane propagation only reads a vertex's geometry when the construction
    site is the vertex itself or one of its neighbors. Rerunning the
    propagation with a candidate vertex and its neighbors blocked from ever
    becoming sites therefore builds planes that are untouched by the
    candidate's position; if afterwards exactly the candidate fails the
    radial test, it alone explains the rejection and becomes the witness.
    """
    residuals = radial_residuals(t, pa, tol)
    failing = [int(v) for v in np.flatnonzero(~pa.marks) if not residuals[v] <= eps_rec]
    if not failing:
        return None

    # Candidate order: failing vertices by decreasing residual first (a
    # displaced vertex that stayed unmarked fails directly), then the
    # construction sites of the faces those vertices touch plus the sites'
    # neighbors, in construction order (a displaced vertex consumed as a
    # site taints planes whose faces touch it), then remaining face-sharers
    # and the rest. The protective reruns decide; order only buys speed.
    candidates = sorted(failing, key=lambda v: -residuals[v])
    seen = set(candidates)

    face_site = {face: vertex for vertex, face in pa.order}
    face_step = {face: step for step, (_v, face) in enumerate(pa.order)}
    suspect_faces = sorted(
        {f for v in failing for f in t.vertex_faces[v] if f in face_site},
        key=lambda f: face_step[f])
    site_pool: list[int] = []
    for f in suspect_faces:
        s = face_site[f]
        for c in (s, *t.neighbors(s)):
            if c not in seen:
                seen.add(c)
                site_pool.append(c)
    candidates += site_pool

    sharers: list[int] = []
    for v in candidates[:8]:
        for f in t.vertex_faces[v]:
            for w in t.faces[f]:
                if w not in seen:
                    seen.add(w)
                    sharers.append(w)
    candidates += sharers
    candidates += [v for v in range(t.n_vertices) if v not in seen]
    candidates = candidates[:max_candidates]

    def bad_set(pa2: PlaneAssignment) -> tuple[set[int], np.ndarray]:
        res2 = radial_residuals(t, pa2, tol)
        return {int(v) for v in np.flatnonzero(~(res2 <= eps_rec))}, res2

    def protected_run(cand: int) -> tuple[set[int], np.ndarray] | None:
        """Rerun with the candidate and its neighbors barred from being sites.

        No plane of a completed run was built from the candidate's geometry,
        so a lone displaced candidate fails alone and any other bad set rules
        it out. Returns None when every attempted seed stalls (some small
        face around the candidate has no unblocked vertex to be built at).
        """
        blocked = frozenset((cand, *t.neighbors(cand)))
        tried = 0
        for seed in range(t.n_vertices):
            if seed in blocked:
                continue
            if tried >= max_seed_tries:
                break
            tried += 1
            try:
                choice = default_seed_choice(t, seed_vertex=seed, tol=tol)
                planes = algorithm1_seed(t, choice, tol)
                pa2 = _propagate_normalized(t, seed, planes, tol, blocked=blocked)
            except GeometryError:
                continue
            return bad_set(pa2)
        return None

    def neighbor_seeded_run(cand: int) -> tuple[set[int], np.ndarray] | None:
        """Rerun seeded at a neighbor, shielding the rest of the candidate's hood.

        The seed construction may consult the edge toward the candidate, so
        planes of faces around the candidate can be tainted, but nothing
        else; used only when the fully protected rerun cannot complete.
        """
        nbrs = t.neighbors(cand)
        for w in nbrs:
            blocked = frozenset((cand, *(n for n in nbrs if n != w)))
            try:
                choice = default_seed_choice(t, seed_vertex=w, tol=tol)
                planes = algorithm1_seed(t, choice, tol)
                pa2 = _propagate_normalized(t, w, planes, tol, blocked=blocked)
            except GeometryError:
                continue
            return bad_set(pa2)
        return None

    # Strict pass: a completed protected rerun is decisive either way.
    undecided: list[int] = []
    for cand in candidates:
        outcome = protected_run(cand)
        if outcome is None:
            undecided.append(cand)
            continue
        bad2, res2 = outcome
        if bad2 == {cand}:
            return Witness(cand, float(res2[cand]))

    # Stalled candidates: neighbor-seeded reruns, still with the strict test.
    weak: list[tuple[int, float]] = []
    for cand in undecided:
        outcome = neighbor_seeded_run(cand)
        if outcome is None:
            continue
        bad2, res2 = outcome
        if bad2 == {cand}:
            return Witness(cand, float(res2[cand]))
        ring = {cand}
        for f in t.vertex_faces[cand]:
            ring.update(t.faces[f])
        if cand in bad2 and bad2 <= ring:
            weak.append((cand, float(res2[cand])))

    # Ring-confined failures name the candidate only when unambiguous.
    if len(weak) == 1:
        return Witness(weak[0][0], weak[0][1])
    return None


# -- degrees-of-freedom probe ------------------------------------------------------


@dataclass(frozen=True)
class DofProbeEntry:
    choice_index: int
    verdict: bool
    transform: ProjectiveMap | None
    max_map_residual: float | None


@dataclass(frozen=True)
class DofProbeReport:
    entries: tuple[DofProbeEntry, ...]
    reference_index: int | None
    residual_bound: float

    @property
    def ok(self) -> bool:
        if self.reference_index is None:
            return False
        return all(
            e.verdict and e.max_map_residual is not None
            and e.max_map_residual <= self.residual_bound
            for e in self.entries
        )


def _assignment_vertex_points(
    t: Tessellation, pa: PlaneAssignment, tol: Tolerances
) -> np.ndarray:
    """Polyhedron vertex per tessellation vertex (three-plane intersections)."""
    normals = np.array([p.normal for p in pa.planes])  # type: ignore[union-attr]
    offsets = np.array([p.offset for p in pa.planes])  # type: ignore[union-attr]
    vf = np.array(t.vertex_faces)
    pts, ok = solve_plane_triples(normals[vf], offsets[vf], tol)
    if not bool(np.all(ok)):
        raise GeometryError("degenerate plane triple; polyhedron vertices undefined")
    return pts


def dof_probe(
    t: Tessellation,
    choices: list[SeedChoice],
    eps_rec: float = 1e-6,
    tol: Tolerances = DEFAULT_TOL,
    residual_bound: float = 1e-8,
) -> DofProbeReport:
    """Recognize under several seed choices and relate the witness polyhedra.

    Every choice must produce the same verdict on Laguerre input; the
    polyhedron of each choice maps onto the reference polyhedron (the first
    choice with a true verdict) by a fitted ray-preserving transform whose
    per-vertex residual the report records. No map is fitted for false
    verdicts.
    """
    runs: list[tuple[bool, PlaneAssignment | None]] = []
    for choice in choices:
        try:
            res = recognize(t, choice, eps_rec, tol, localize=False)
            runs.append((res.verdict, res.planes))
        except GeometryError:
            runs.append((False, None))

    reference_index = next((i for i, (v, _) in enumerate(runs) if v), None)
    entries: list[DofProbeEntry] = []
    ref_pts = None
    if reference_index is not None:
        ref_pts = _assignment_vertex_points(t, runs[reference_index][1], tol)

    for i, (verdict, pa) in enumerate(runs):
        if not verdict or ref_pts is None:
            entries.append(DofProbeEntry(i, verdict, None, None))
            continue
        pts = _assignment_vertex_points(t, pa, tol)
        transform, residuals = fit_projection_preserving_map(ref_pts, pts)
        entries.append(DofProbeEntry(i, True, transform, float(np.max(residuals))))

    return DofProbeReport(tuple(entries), reference_index, residual_bound)
