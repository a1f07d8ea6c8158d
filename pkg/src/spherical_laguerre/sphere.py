"""Geometry on the unit sphere: distances, weighted circles, bisectors, polygons.

Points live on the unit sphere U centered at the origin O and are carried as
plain numpy 3-vectors. A weighted site is a spherical circle (center plus
angular radius below pi/2); nearness of a point to a site is measured by the
Laguerre proximity cos(arc distance to center)/cos(radius), where LARGER
values mean nearer. With that convention the bisector of two sites is the
zero set of a linear form, hence a great circle.

All functions here are pure and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSites, InvalidPolygon
from .tolerances import DEFAULT_TOL, Tolerances

Vec3 = np.ndarray


def normalize(v, tol: Tolerances = DEFAULT_TOL) -> Vec3:
    """Scale an arbitrary nonzero 3-vector to unit length."""
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n < tol.eps_norm:
        raise ValueError("cannot normalize a near-zero vector")
    return v / n


def unit_vector(v, tol: Tolerances = DEFAULT_TOL) -> Vec3:
    """Check that ``v`` is within ``tol.unit_slack`` of unit length and renormalize.

    Use this for coordinates that are claimed to be on the sphere already
    (parsed files, user input). For raw directions use :func:`normalize`.
    """
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if abs(n - 1.0) > tol.unit_slack:
        raise ValueError(f"vector norm {n:.9g} is not within {tol.unit_slack} of 1")
    return v / n


def orthonormal_basis(n: Vec3) -> tuple[Vec3, Vec3]:
    """Deterministic pair (u, w) completing unit ``n`` to a right-handed frame."""
    pick = np.array([1.0, 0.0, 0.0]) if abs(n[0]) <= 0.9 else np.array([0.0, 1.0, 0.0])
    u = normalize(np.cross(n, pick))
    w = np.cross(n, u)
    return u, w


def slerp(a: Vec3, b: Vec3, t: float) -> Vec3:
    """Point at fraction ``t`` along the minor great-circle arc from a to b."""
    ang = geodesic_distance(a, b)
    if ang < 1e-15:
        return np.asarray(a, dtype=float)
    s = math.sin(ang)
    return (math.sin((1.0 - t) * ang) * np.asarray(a) + math.sin(t * ang) * np.asarray(b)) / s


@dataclass(frozen=True, eq=False)
class SphericalCircle:
    """A weighted site: circle on U with center ``p`` and angular radius ``r``.

    The radius doubles as the site weight and must stay in [0, pi/2) so that
    the plane through the circle keeps the origin strictly on its inner side.
    """

    center: Vec3
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", unit_vector(self.center))
        r = float(self.radius)
        if not 0.0 <= r < math.pi / 2:
            raise ValueError(f"circle radius {r} outside [0, pi/2)")
        object.__setattr__(self, "radius", r)


@dataclass(frozen=True, eq=False)
class GreatCircle:
    """Great circle as the unit normal of its plane through the origin.

    GreatCircle(n) and GreatCircle(-n) trace the same circle but carry
    opposite orientations; the positive side is ``normal . x > 0``.
    """

    normal: Vec3

    def __post_init__(self):
        object.__setattr__(self, "normal", unit_vector(self.normal))


@dataclass(frozen=True, eq=False)
class GeodesicArc:
    """Minor arc between two distinct, non-antipodal points on U."""

    a: Vec3
    b: Vec3

    def __post_init__(self):
        a = unit_vector(self.a)
        b = unit_vector(self.b)
        if abs(float(np.dot(a, b))) >= 1.0 - DEFAULT_TOL.eps_norm:
            raise InvalidPolygon("arc endpoints equal or antipodal")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> float:
        return geodesic_distance(self.a, self.b)


def geodesic_distance(p: Vec3, q: Vec3) -> float:
    """Arc length between two unit vectors, in [0, pi].

    The dot product is clamped to [-1, 1] before acos so that rounding noise
    cannot raise a domain error.
    """
    d = float(np.dot(p, q))
    return math.acos(min(1.0, max(-1.0, d)))


def angle_between_directions(u: Vec3, v: Vec3) -> float:
    """Angle between unit directions via atan2, accurate near 0 and pi."""
    c = float(np.dot(u, v))
    s = float(np.linalg.norm(np.cross(u, v)))
    return math.atan2(s, c)


def laguerre_proximity(p: Vec3, c: SphericalCircle) -> float:
    """cos(arc distance from p to the circle center) / cos(radius).

    Larger is nearer. The maximum over p is 1/cos(r), attained at the center;
    points a quarter turn away score 0; antipodal points score -1/cos(r).
    """
    d = float(np.dot(c.center, p))
    return min(1.0, max(-1.0, d)) / math.cos(c.radius)


def laguerre_bisector(
    ci: SphericalCircle, cj: SphericalCircle, tol: Tolerances = DEFAULT_TOL
) -> GreatCircle:
    """Great circle where the two sites have equal Laguerre proximity.

    The proximity difference is the linear form
    (ci.center/cos ri - cj.center/cos rj) . x, so the bisector is the unit
    normalization of that difference vector. The returned orientation puts
    ci's region on the positive side.
    """
    diff = ci.center / math.cos(ci.radius) - cj.center / math.cos(cj.radius)
    n = float(np.linalg.norm(diff))
    if n < tol.eps_norm:
        raise DegenerateSites("identical weighted sites have no bisector")
    return GreatCircle(diff / n)


def polygon_edge_normals(polygon, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Unit normals a x b of each directed edge of a spherical polygon.

    With vertices CCW as seen from outside the sphere, interior points have a
    non-negative dot product with every returned normal.
    """
    pts = np.asarray(polygon, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3 or pts.shape[1] != 3:
        raise InvalidPolygon("a spherical polygon needs at least 3 vertices")
    nxt = np.roll(pts, -1, axis=0)
    dots = np.sum(pts * nxt, axis=1)
    if np.any(np.abs(dots) >= 1.0 - tol.eps_norm):
        raise InvalidPolygon("consecutive polygon vertices equal or antipodal")
    normals = np.cross(pts, nxt)
    return normals / np.linalg.norm(normals, axis=1)[:, None]


def point_in_spherical_polygon(
    p: Vec3, polygon, tol: Tolerances = DEFAULT_TOL
) -> bool:
    """True when p is inside a convex CCW polygon, boundary included.

    Inside means a non-negative dot product with every edge-plane normal;
    ``tol.boundary_slack`` absorbs rounding on the boundary itself.
    """
    normals = polygon_edge_normals(polygon, tol)
    return bool(np.all(normals @ np.asarray(p, dtype=float) >= -tol.boundary_slack))


def point_strictly_in_spherical_polygon(
    p: Vec3, polygon, margin: float = 0.0, tol: Tolerances = DEFAULT_TOL
) -> bool:
    """True when p clears every edge plane by more than ``margin``."""
    normals = polygon_edge_normals(polygon, tol)
    return bool(np.all(normals @ np.asarray(p, dtype=float) > margin))


def is_convex_spherical_polygon(polygon, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Every vertex on the non-negative side of every edge plane.

    For polygons strictly inside a hemisphere this matches the arc-containment
    notion of convexity; it also pins the CCW orientation (a clockwise polygon
    fails because every dot product flips sign).
    """
    pts = np.asarray(polygon, dtype=float)
    normals = polygon_edge_normals(pts, tol)
    return bool(np.all(pts @ normals.T >= -tol.boundary_slack))


def distance_to_polygon_boundary(p: Vec3, polygon, tol: Tolerances = DEFAULT_TOL) -> float:
    """Smallest angular distance from p to any edge great circle of the polygon."""
    normals = polygon_edge_normals(polygon, tol)
    sines = np.clip(np.abs(normals @ np.asarray(p, dtype=float)), 0.0, 1.0)
    return float(np.min(np.arcsin(sines)))


def sample_great_circle(circle: GreatCircle, count: int) -> np.ndarray:
    """``count`` evenly spaced points tracing the great circle."""
    u, w = orthonormal_basis(circle.normal)
    theta = np.linspace(0.0, 2.0 * math.pi, count, endpoint=False)
    return np.outer(np.cos(theta), u) + np.outer(np.sin(theta), w)


def sample_spherical_circle(c: SphericalCircle, count: int) -> np.ndarray:
    """``count`` points tracing a spherical circle of given center and radius."""
    u, w = orthonormal_basis(c.center)
    theta = np.linspace(0.0, 2.0 * math.pi, count, endpoint=False)
    ring = np.outer(np.cos(theta), u) + np.outer(np.sin(theta), w)
    return math.cos(c.radius) * c.center + math.sin(c.radius) * ring
