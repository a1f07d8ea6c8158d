"""Forward construction of spherical Laguerre Voronoi diagrams.

Each generator circle contributes the plane through it; the diagram is the
central projection of the bounded intersection of the halfspaces containing
the origin. A brute-force proximity argmax over sample points serves as the
independent oracle for that construction.

The GEN text format holds one generator per line::

    # comment
    c <x> <y> <z> <radius>     center direction cosines, radius in radians
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, TooFewActive
from .polyhedra import ConvexPolyhedron, Plane, central_projection, halfspace_intersection
from .sphere import SphericalCircle, normalize, unit_vector
from .tessellation import Tessellation
from .tolerances import DEFAULT_TOL, Tolerances


@dataclass(eq=False)
class GeneratorSet:
    """At least four pairwise distinct weighted circles."""

    circles: list[SphericalCircle]

    def __post_init__(self):
        if len(self.circles) < 4:
            raise ValueError("a generator set needs at least 4 circles")
        for i, a in enumerate(self.circles):
            for b in self.circles[i + 1:]:
                if (np.linalg.norm(a.center - b.center) < DEFAULT_TOL.eps_norm
                        and abs(a.radius - b.radius) < DEFAULT_TOL.eps_norm):
                    raise ValueError("generator set contains identical circles")

    def __len__(self) -> int:
        return len(self.circles)

    def centers(self) -> np.ndarray:
        return np.array([c.center for c in self.circles])

    def radii(self) -> np.ndarray:
        return np.array([c.radius for c in self.circles])


def circle_plane(c: SphericalCircle) -> Plane:
    """Plane through the spherical circle: normal = center, offset = cos(radius)."""
    return Plane(c.center, math.cos(c.radius))


def plane_circle(p: Plane) -> SphericalCircle:
    """Spherical circle cut by a plane that intersects the sphere."""
    if p.offset > 1.0:
        raise ValueError(f"plane offset {p.offset} misses the unit sphere")
    return SphericalCircle(p.normal, math.acos(p.offset))


@dataclass(eq=False)
class ForwardDiagram:
    """Result of the forward construction.

    ``tessellation`` face k belongs to generator ``active[k]``; generators
    whose Laguerre region is empty are listed in ``dropped``.
    """

    tessellation: Tessellation
    active: tuple[int, ...]
    dropped: tuple[int, ...]
    polyhedron: ConvexPolyhedron


def construct_slvd(g: GeneratorSet, tol: Tolerances = DEFAULT_TOL) -> ForwardDiagram:
    """Build the Laguerre diagram of a generator set.

    Raises UnboundedIntersection when the circles sit inside one hemisphere
    cap (their halfspaces do not bound a polyhedron) and TooFewActive when
    fewer than four generators keep a nonempty region.
    """
    planes = [circle_plane(c) for c in g.circles]
    poly = halfspace_intersection(planes, tol)
    if len(poly.planes) < 4:
        raise TooFewActive(
            f"only {len(poly.planes)} generators kept a nonempty region")
    tess = central_projection(poly, tol)
    return ForwardDiagram(
        tessellation=tess,
        active=poly.source_indices,
        dropped=poly.dropped,
        polyhedron=poly,
    )


def brute_force_assign(
    g: GeneratorSet, samples, tie_tol: float = 1e-12
) -> tuple[np.ndarray, np.ndarray]:
    """Assign each sample to the generator with maximal Laguerre proximity.

    Returns (winner index per sample, boundary mask). The mask flags samples
    whose top two proximities differ by at most ``tie_tol``; those lie on a
    region boundary up to rounding.
    """
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    prox = (pts @ g.centers().T) / np.cos(g.radii())[None, :]
    winners = np.argmax(prox, axis=1)
    if prox.shape[1] >= 2:
        top2 = np.partition(prox, -2, axis=1)[:, -2:]
        boundary = (top2[:, 1] - top2[:, 0]) <= tie_tol
    else:
        boundary = np.zeros(len(pts), dtype=bool)
    return winners, boundary


def random_generators(n: int, rng: np.random.Generator) -> GeneratorSet:
    """Random fixture: uniform centers, radii uniform in [0.05, 0.45] radians.

    Centers are normalized 3D Gaussians (uniform on the sphere); the radius
    window keeps most regions nonempty while still exercising weight
    diversity.
    """
    if n < 4:
        raise ValueError("need at least 4 generators")
    circles = []
    for _ in range(n):
        center = normalize(rng.normal(size=3))
        radius = rng.uniform(0.05, 0.45)
        circles.append(SphericalCircle(center, radius))
    return GeneratorSet(circles)


def random_sphere_points(count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform sample points on the unit sphere."""
    pts = rng.normal(size=(count, 3))
    return pts / np.linalg.norm(pts, axis=1)[:, None]


# -- GEN serialization ---------------------------------------------------------


def serialize_gen(g: GeneratorSet, comments: tuple[str, ...] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    for c in g.circles:
        p = c.center
        lines.append(f"c {p[0]:.17g} {p[1]:.17g} {p[2]:.17g} {c.radius:.17g}")
    return "\n".join(lines) + "\n"


def parse_gen(text: str, tol: Tolerances = DEFAULT_TOL) -> GeneratorSet:
    circles = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tok = stripped.split()
        if tok[0] != "c" or len(tok) != 5:
            raise ParseError(ln, f"expected 'c <x> <y> <z> <r>', got {stripped!r}")
        try:
            x, y, z, r = (float(s) for s in tok[1:])
        except ValueError:
            raise ParseError(ln, f"bad number in {stripped!r}") from None
        try:
            circles.append(SphericalCircle(unit_vector([x, y, z], tol), r))
        except ValueError as exc:
            raise ParseError(ln, str(exc)) from None
    if len(circles) < 4:
        raise ParseError(0, f"generator file holds {len(circles)} circles, need at least 4")
    return GeneratorSet(circles)
