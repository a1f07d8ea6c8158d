"""Affine planes, halfspace intersection, central projection, projective maps.

A face plane is stored as a unit normal plus a strictly positive offset, so
the origin O is always strictly inside the halfspace ``n . x <= d``. The
bounded intersection of such halfspaces is computed by duality: the plane
``n . x = d`` maps to the point ``n / d``, facets of the dual convex hull map
back to polyhedron vertices, and hull incidences give the face lattice. That
keeps the whole construction within the convex-hull O(n log n) budget.

Homogeneous points are 4-vectors ``(t, x, y, z)`` with t first. The
projection-preserving transforms form the five-parameter matrix family

    [alpha beta gamma delta]
    [0     eta   0     0   ]
    [0     0     eta   0   ]
    [0     0     0     eta ]

which fixes O and every ray through O (four degrees of freedom up to the
homogeneous scale).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import (
    DegenerateSample,
    DegenerateTriple,
    NonSimpleVertex,
    ParallelPlanes,
    UnboundedIntersection,
)
from .sphere import Vec3, normalize, orthonormal_basis, unit_vector
from .tessellation import Tessellation
from .tolerances import DEFAULT_TOL, Tolerances


@dataclass(frozen=True, eq=False)
class Plane:
    """Affine plane { x : normal . x = offset } with offset > 0."""

    normal: Vec3
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", unit_vector(self.normal))
        d = float(self.offset)
        if d <= DEFAULT_TOL.eps_offset:
            raise ValueError(f"plane offset {d} must exceed {DEFAULT_TOL.eps_offset}")
        object.__setattr__(self, "offset", d)


@dataclass(frozen=True, eq=False)
class Line3:
    """Line in space as a point plus a unit direction."""

    point: Vec3
    direction: Vec3

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        object.__setattr__(self, "direction", normalize(self.direction))

    def at(self, s: float) -> Vec3:
        return self.point + s * self.direction


@dataclass(frozen=True)
class ProjectiveMap:
    """Parameters (alpha, beta, gamma, delta, eta) of the ray-preserving family."""

    alpha: float
    beta: float
    gamma: float
    delta: float
    eta: float

    def __post_init__(self):
        if self.alpha == 0.0 or self.eta == 0.0:
            raise ValueError("projective map needs alpha != 0 and eta != 0")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([
            [self.alpha, self.beta, self.gamma, self.delta],
            [0.0, self.eta, 0.0, 0.0],
            [0.0, 0.0, self.eta, 0.0],
            [0.0, 0.0, 0.0, self.eta],
        ])


IDENTITY_MAP = ProjectiveMap(1.0, 0.0, 0.0, 0.0, 1.0)


def hom_point(t: float, x: float, y: float, z: float) -> np.ndarray:
    """Homogeneous 4-vector with the projective weight t first."""
    p = np.array([t, x, y, z], dtype=float)
    if not np.any(p):
        raise ValueError("homogeneous point cannot be all zero")
    return p


def apply_map(m: ProjectiveMap, p) -> np.ndarray:
    """Image (Lambda, eta x, eta y, eta z) with Lambda = alpha t + beta x + gamma y + delta z."""
    p = np.asarray(p, dtype=float)
    lam = m.alpha * p[0] + m.beta * p[1] + m.gamma * p[2] + m.delta * p[3]
    return np.array([lam, m.eta * p[1], m.eta * p[2], m.eta * p[3]])


def compose_maps(outer: ProjectiveMap, inner: ProjectiveMap) -> ProjectiveMap:
    """Parameters of outer applied after inner; the family is closed under composition."""
    return ProjectiveMap(
        alpha=outer.alpha * inner.alpha,
        beta=outer.alpha * inner.beta + outer.beta * inner.eta,
        gamma=outer.alpha * inner.gamma + outer.gamma * inner.eta,
        delta=outer.alpha * inner.delta + outer.delta * inner.eta,
        eta=outer.eta * inner.eta,
    )


def is_projection_preserving_witness(
    m: ProjectiveMap,
    samples,
    angle_tol: float = 1e-12,
    tol: Tolerances = DEFAULT_TOL,
) -> bool:
    """Check on sample points that m keeps each point on its ray through O.

    Samples must be affine (t != 0) with a nonzero spatial part. A sample
    mapped to Lambda = 0 sits at infinity and is reported as an error rather
    than skipped. Collinearity is measured on the cross product of the unit
    directions, which stays accurate at the 1e-12 scale where acos does not.
    """
    for idx, p in enumerate(samples):
        p = np.asarray(p, dtype=float)
        if abs(p[0]) < tol.eps_norm:
            raise ValueError(f"sample {idx} is not affine (t = 0)")
        spatial = p[1:]
        if np.linalg.norm(spatial) < tol.eps_norm:
            raise ValueError(f"sample {idx} has zero spatial part")
        q = apply_map(m, p)
        if abs(q[0]) < tol.eps_norm * max(1.0, float(np.max(np.abs(p)))):
            raise DegenerateSample(f"sample {idx} maps to the plane at infinity")
        e0 = normalize(spatial / p[0])
        e1 = normalize(q[1:] / q[0])
        if float(np.linalg.norm(np.cross(e0, e1))) > angle_tol:
            return False
    return True


# -- plane intersections ------------------------------------------------------


def intersect_plane_pair(
    n1: Vec3, d1: float, n2: Vec3, d2: float, tol: Tolerances = DEFAULT_TOL
) -> Line3:
    """Intersection line of two planes given by unit normals and offsets.

    The returned point is the minimum-norm solution (it lies in the normals'
    span); the direction is the normalized cross product n1 x n2.
    """
    cross = np.cross(n1, n2)
    s2 = float(np.dot(cross, cross))
    if math.sqrt(s2) <= tol.eps_par:
        raise ParallelPlanes("plane normals are (anti)parallel")
    c = float(np.dot(n1, n2))
    a = (d1 - c * d2) / s2
    b = (d2 - c * d1) / s2
    return Line3(a * np.asarray(n1) + b * np.asarray(n2), cross / math.sqrt(s2))


def plane_intersection_line(p1: Plane, p2: Plane, tol: Tolerances = DEFAULT_TOL) -> Line3:
    return intersect_plane_pair(p1.normal, p1.offset, p2.normal, p2.offset, tol)


def three_planes_point(
    p1: Plane, p2: Plane, p3: Plane, tol: Tolerances = DEFAULT_TOL
) -> Vec3:
    """Unique common point of three planes; DegenerateTriple when near-singular."""
    a = np.array([p1.normal, p2.normal, p3.normal])
    det = float(np.linalg.det(a))
    if abs(det) <= tol.eps_det:
        raise DegenerateTriple(f"plane normals are linearly dependent (det {det:.3g})")
    return np.linalg.solve(a, np.array([p1.offset, p2.offset, p3.offset]))


def solve_plane_triples(
    normals: np.ndarray, offsets: np.ndarray, tol: Tolerances = DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Batched three-plane intersections.

    ``normals`` has shape (m, 3, 3), ``offsets`` (m, 3). Returns the solution
    points (m, 3) and a boolean mask of the rows with a non-degenerate system;
    degenerate rows contain garbage and must be ignored by the caller.
    """
    dets = np.linalg.det(normals)
    ok = np.abs(dets) > tol.eps_det
    safe = np.where(ok[:, None, None], normals, np.eye(3))
    points = np.linalg.solve(safe, offsets[..., None])[..., 0]
    return points, ok


# -- halfspace intersection ---------------------------------------------------


@dataclass(eq=False)
class ConvexPolyhedron:
    """Bounded intersection of halfspaces containing the origin.

    ``planes`` lists only the active (non-redundant) planes; ``faces`` holds
    one CCW vertex cycle per active plane, indexing into ``poly_vertices``.
    ``source_indices`` maps each active plane back to its position in the
    input list and ``dropped`` records the redundant input planes.
    """

    planes: list[Plane]
    faces: list[list[int]]
    poly_vertices: np.ndarray
    vertex_planes: list[tuple[int, ...]]
    source_indices: tuple[int, ...]
    dropped: tuple[int, ...]

    @property
    def n_vertices(self) -> int:
        return len(self.poly_vertices)


def halfspace_intersection(
    planes: list[Plane], tol: Tolerances = DEFAULT_TOL
) -> ConvexPolyhedron:
    """Intersect halfspaces { x : n_i . x <= d_i } into a convex polyhedron.

    Uses point-plane duality: the dual points n_i / d_i are well defined
    because every offset is positive, and each facet of their convex hull is
    one polyhedron vertex. The intersection is bounded exactly when the
    origin is strictly inside the dual hull.
    """
    if len(planes) < 4:
        raise ValueError("need at least 4 halfspaces for a bounded intersection")
    normals = np.array([p.normal for p in planes])
    offsets = np.array([p.offset for p in planes])
    duals = normals / offsets[:, None]

    try:
        hull = ConvexHull(duals)
    except QhullError as exc:
        raise UnboundedIntersection(
            "dual points are degenerate; the halfspace intersection is not a "
            "bounded polyhedron") from exc

    # qhull normalizes equations to unit normals, so -b is the facet's
    # distance from the origin; all must be strictly positive.
    dists = -hull.equations[:, 3]
    if np.any(dists <= tol.eps_norm):
        raise UnboundedIntersection(
            "origin is not strictly inside the dual hull; intersection unbounded")

    raw_vertices = hull.equations[:, :3] / dists[:, None]
    raw_incidence = [set(simplex) for simplex in hull.simplices]

    # Merge facets that describe the same polyhedron vertex (more than three
    # planes through one point makes qhull triangulate the dual facet).
    order = np.lexsort((raw_vertices[:, 2], raw_vertices[:, 1], raw_vertices[:, 0]))
    merged_pts: list[np.ndarray] = []
    merged_inc: list[set[int]] = []
    for fi in order:
        v = raw_vertices[fi]
        if merged_pts:
            rep = merged_pts[-1]
            if np.linalg.norm(v - rep) <= tol.vertex_merge * max(1.0, float(np.linalg.norm(rep))):
                merged_inc[-1] |= raw_incidence[fi]
                continue
        merged_pts.append(v)
        merged_inc.append(set(raw_incidence[fi]))

    poly_vertices = np.array(merged_pts)

    # Face cycles: vertices incident to each input plane, ordered CCW around
    # the outward normal.
    plane_vertex_ids: list[list[int]] = [[] for _ in planes]
    for vid, inc in enumerate(merged_inc):
        for pi in inc:
            plane_vertex_ids[pi].append(vid)

    active: list[int] = []
    dropped: list[int] = []
    faces: list[list[int]] = []
    for pi, vids in enumerate(plane_vertex_ids):
        if len(vids) < 3:
            dropped.append(pi)
            continue
        pts = poly_vertices[vids]
        centroid = pts.mean(axis=0)
        u, w = orthonormal_basis(planes[pi].normal)
        rel = pts - centroid
        ang = np.arctan2(rel @ w, rel @ u)
        cyc = [vids[i] for i in np.argsort(ang, kind="stable")]
        active.append(pi)
        faces.append(cyc)

    old_to_new = {pi: k for k, pi in enumerate(active)}
    vertex_planes = [
        tuple(sorted(old_to_new[pi] for pi in inc if pi in old_to_new))
        for inc in merged_inc
    ]

    return ConvexPolyhedron(
        planes=[planes[pi] for pi in active],
        faces=faces,
        poly_vertices=poly_vertices,
        vertex_planes=vertex_planes,
        source_indices=tuple(active),
        dropped=tuple(dropped),
    )


def polyhedron_issues(poly: ConvexPolyhedron, tol: Tolerances = DEFAULT_TOL) -> list[str]:
    """Invariant check used by tests: empty list means a sound polyhedron."""
    issues = []
    normals = np.array([p.normal for p in poly.planes])
    offsets = np.array([p.offset for p in poly.planes])
    slack = normals @ poly.poly_vertices.T - offsets[:, None]
    if float(np.max(slack)) > tol.eps_inc:
        issues.append(f"a vertex violates a halfspace by {float(np.max(slack)):.3g}")
    for vid, inc in enumerate(poly.vertex_planes):
        if len(inc) < 3:
            issues.append(f"vertex {vid} touches only {len(inc)} planes")
            continue
        res = np.abs(normals[list(inc)] @ poly.poly_vertices[vid] - offsets[list(inc)])
        if float(np.max(res)) > tol.eps_inc:
            issues.append(f"vertex {vid} misses an incident plane by {float(np.max(res)):.3g}")
    edges = set()
    for cyc in poly.faces:
        if len(cyc) < 3:
            issues.append("a face has fewer than 3 vertices")
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            edges.add(tuple(sorted((a, b))))
    euler = poly.n_vertices - len(edges) + len(poly.faces)
    if euler != 2:
        issues.append(f"Euler relation V - E + F = {euler}, expected 2")
    return issues


def scale_polyhedron(poly: ConvexPolyhedron, s: float) -> ConvexPolyhedron:
    """Uniformly scale a polyhedron about the origin by s > 0."""
    if s <= 0:
        raise ValueError("scale factor must be positive")
    return ConvexPolyhedron(
        planes=[Plane(p.normal, s * p.offset) for p in poly.planes],
        faces=[list(c) for c in poly.faces],
        poly_vertices=s * poly.poly_vertices,
        vertex_planes=list(poly.vertex_planes),
        source_indices=poly.source_indices,
        dropped=poly.dropped,
    )


def central_projection(poly: ConvexPolyhedron, tol: Tolerances = DEFAULT_TOL) -> Tessellation:
    """Project polyhedron vertices radially onto the sphere, keeping face cycles.

    Requires every polyhedron vertex to be simple (exactly three incident
    faces); the projection of a simple polyhedron containing O is a convex
    degree-3 tessellation with the same combinatorics.
    """
    for vid, inc in enumerate(poly.vertex_planes):
        if len(inc) > 3:
            raise NonSimpleVertex(
                f"polyhedron vertex {vid} touches {len(inc)} faces; projection "
                "would create a vertex of degree above 3")
    vertices = poly.poly_vertices / np.linalg.norm(poly.poly_vertices, axis=1)[:, None]
    return Tessellation(vertices, [list(c) for c in poly.faces], tol)


# -- fitting the ray-preserving transform --------------------------------------


def fit_projection_preserving_map(
    src: np.ndarray, dst: np.ndarray
) -> tuple[ProjectiveMap, np.ndarray]:
    """Least-squares member of the map family sending src points to dst points.

    Corresponding points must lie on common rays through O (the situation for
    two polyhedra projecting to the same tessellation). Each pair yields one
    linear equation in (alpha, beta, gamma, delta, eta); the null vector of
    the stacked system, normalized to eta = 1, is the fit. Returns the map
    and the Euclidean distance from each mapped source point to its target.
    """
    src = np.asarray(src, dtype=float)
    dst = np.asarray(dst, dtype=float)
    if src.shape != dst.shape or src.ndim != 2 or src.shape[1] != 3 or len(src) < 5:
        raise ValueError("need matching (m, 3) arrays with m >= 5")
    w = np.linalg.norm(dst, axis=1)
    rays = dst / w[:, None]
    s = np.sum(src * rays, axis=1)
    system = np.column_stack([w, w * src[:, 0], w * src[:, 1], w * src[:, 2], -s])
    _, _, vt = np.linalg.svd(system)
    theta = vt[-1]
    if abs(theta[4]) < 1e-300:
        raise ValueError("fitted transform has eta = 0; points are degenerate")
    theta = theta / theta[4]
    m = ProjectiveMap(*theta)

    lam = m.alpha + src @ np.array([m.beta, m.gamma, m.delta])
    residuals = np.full(len(src), np.inf)
    good = lam > 0
    img = m.eta * src[good] / lam[good, None]
    residuals[good] = np.linalg.norm(img - dst[good], axis=1)
    return m, residuals


# -- OFF export ----------------------------------------------------------------


def write_off(poly: ConvexPolyhedron) -> str:
    """Plain OFF dump of the polyhedron for external viewers."""
    edges = set()
    for cyc in poly.faces:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            edges.add(tuple(sorted((a, b))))
    lines = ["OFF", f"{poly.n_vertices} {len(poly.faces)} {len(edges)}"]
    for v in poly.poly_vertices:
        lines.append(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}")
    for cyc in poly.faces:
        lines.append(f"{len(cyc)} " + " ".join(str(i) for i in cyc))
    return "\n".join(lines) + "\n"
