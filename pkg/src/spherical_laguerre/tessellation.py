"""Convex spherical tessellations with degree-3 vertices.

A tessellation is a set of unit vertices plus face cycles (vertex indices,
CCW as seen from outside the sphere). Edges and vertex incidences are derived
from the cycles; geodesic arcs are always re-derived from the endpoint
coordinates, never stored.

The TES text format::

    # comment
    V <vertex count>
    v <x> <y> <z>          one line per vertex, >= 17 significant digits
    F <face count>
    f <i1> <i2> ... <ik>   0-based vertex indices, CCW from outside
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError
from .sphere import (
    angle_between_directions,
    geodesic_distance,
    normalize,
    polygon_edge_normals,
    unit_vector,
)
from .tolerances import DEFAULT_TOL, Tolerances


@dataclass(frozen=True)
class ValidationIssue:
    check: str
    element: object
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple[ValidationIssue, ...]

    def first(self, check: str) -> ValidationIssue | None:
        for issue in self.issues:
            if issue.check == check:
                return issue
        return None


@dataclass(frozen=True)
class VertexStar:
    """A degree-3 vertex with its incident faces in cycle order.

    ``faces`` is the triple (i, j, k) walked consistently with the face
    orientations; ``edges`` holds the sorted vertex pairs of the edges shared
    by faces (i, j), (j, k) and (i, k), in that order.
    """

    vertex: int
    faces: tuple[int, int, int]
    edges: tuple[tuple[int, int], tuple[int, int], tuple[int, int]]

    def edge_between(self, fa: int, fb: int) -> tuple[int, int]:
        """Edge key of the incident edge shared by faces fa and fb."""
        pairs = {
            frozenset((self.faces[0], self.faces[1])): self.edges[0],
            frozenset((self.faces[1], self.faces[2])): self.edges[1],
            frozenset((self.faces[0], self.faces[2])): self.edges[2],
        }
        return pairs[frozenset((fa, fb))]


class Tessellation:
    """Immutable combinatorial + geometric description of a tessellation.

    Construction performs only hard structural checks (index bounds, unit
    coordinates, well-formed cycles); everything the recognition pipeline
    relies on (degree 3, orientation, convexity, Euler) is checked by
    :func:`validate`, which reports instead of raising.
    """

    def __init__(self, vertices, faces, tol: Tolerances = DEFAULT_TOL):
        verts = [unit_vector(v, tol) for v in np.asarray(vertices, dtype=float)]
        self.vertices = np.array(verts) if verts else np.zeros((0, 3))
        self.faces: list[list[int]] = []
        nv = len(self.vertices)
        for fi, cycle in enumerate(faces):
            cyc = [int(i) for i in cycle]
            if len(cyc) < 3:
                raise ValueError(f"face {fi} has fewer than 3 vertices")
            if len(set(cyc)) != len(cyc):
                raise ValueError(f"face {fi} repeats a vertex")
            for i in cyc:
                if not 0 <= i < nv:
                    raise IndexError(f"face {fi} references vertex {i} of {nv}")
            self.faces.append(cyc)

        # Derived incidence maps, tolerant of invalid inputs so that
        # validate() can describe what is wrong.
        self.vertex_faces: list[list[int]] = [[] for _ in range(nv)]
        self._directed: dict[tuple[int, int], list[int]] = {}
        for fi, cyc in enumerate(self.faces):
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                self._directed.setdefault((a, b), []).append(fi)
            for v in cyc:
                self.vertex_faces[v].append(fi)
        self._stars: list[VertexStar] | None = None

    # -- basic queries ------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def edge_keys(self) -> set[tuple[int, int]]:
        return {tuple(sorted(k)) for k in self._directed}

    def face_polygon(self, fi: int) -> np.ndarray:
        return self.vertices[self.faces[fi]]

    def directed_face(self, a: int, b: int) -> int:
        """Face whose cycle walks the directed edge (a, b)."""
        owners = self._directed.get((a, b), [])
        if len(owners) != 1:
            raise ValueError(f"directed edge ({a}, {b}) owned by {len(owners)} faces")
        return owners[0]

    def edge_faces(self, a: int, b: int) -> tuple[int, int]:
        """The two faces flanking edge {a, b}: (cycle a->b, cycle b->a)."""
        return self.directed_face(a, b), self.directed_face(b, a)

    def neighbors(self, v: int) -> list[int]:
        """Adjacent vertices of v, from the outgoing directed edges."""
        return sorted(b for (a, b) in self._directed if a == v)

    # -- validation ---------------------------------------------------------

    def validate(self, tol: Tolerances = DEFAULT_TOL) -> ValidationReport:
        """Check every structural invariant, reporting the first offender each."""
        issues: list[ValidationIssue] = []

        if self.n_faces < 4:
            issues.append(ValidationIssue(
                "face_count", self.n_faces,
                f"{self.n_faces} faces; a spherical tessellation needs at least 4"))

        for key, owners in sorted(self._directed.items()):
            if len(owners) > 1:
                issues.append(ValidationIssue(
                    "orientation", key,
                    f"directed edge {key} appears in faces {owners}; "
                    "face cycles are not consistently oriented"))
                break

        for a, b in sorted(self.edge_keys()):
            count = len(self._directed.get((a, b), [])) + len(self._directed.get((b, a), []))
            if count != 2:
                issues.append(ValidationIssue(
                    "edge_faces", (a, b),
                    f"edge ({a}, {b}) belongs to {count} faces, expected 2"))
                break

        for v in range(self.n_vertices):
            deg_f = len(self.vertex_faces[v])
            deg_e = sum(1 for (a, _b) in self._directed if a == v)
            if deg_f != 3 or deg_e != 3:
                issues.append(ValidationIssue(
                    "degree3", v,
                    f"vertex {v} has {deg_f} incident faces and {deg_e} edges, expected 3"))
                break

        n_edges = len(self.edge_keys())
        euler = self.n_vertices - n_edges + self.n_faces
        if euler != 2:
            issues.append(ValidationIssue(
                "euler", euler,
                f"V - E + F = {self.n_vertices} - {n_edges} + {self.n_faces} = {euler}, expected 2"))

        for fi in range(self.n_faces):
            poly = self.face_polygon(fi)
            try:
                normals = polygon_edge_normals(poly, tol)
            except ValueError as exc:
                issues.append(ValidationIssue("convexity", fi, f"face {fi}: {exc}"))
                break
            dots = poly @ normals.T
            if np.all(dots >= -tol.boundary_slack):
                continue
            if np.all(dots <= tol.boundary_slack):
                issues.append(ValidationIssue(
                    "orientation", fi, f"face {fi} is wound clockwise seen from outside"))
            else:
                issues.append(ValidationIssue(
                    "convexity", fi, f"face {fi} is not convex"))
            break

        return ValidationReport(ok=not issues, issues=tuple(issues))

    # -- vertex stars -------------------------------------------------------

    def _next_in_face(self, fi: int, v: int) -> int:
        cyc = self.faces[fi]
        return cyc[(cyc.index(v) + 1) % len(cyc)]

    def vertex_stars(self) -> list[VertexStar]:
        """One star per vertex; requires a tessellation that passes validate.

        The face triple is walked in face-cycle order starting from the
        lowest incident face index, so the result is deterministic.
        """
        if self._stars is not None:
            return self._stars
        stars = []
        for v in range(self.n_vertices):
            fs = self.vertex_faces[v]
            if len(fs) != 3:
                raise ValueError(f"vertex {v} is not degree 3")
            start = min(fs)
            order = [start]
            walk_nbrs = []
            f = start
            for _ in range(3):
                w = self._next_in_face(f, v)
                walk_nbrs.append(w)
                f = self.directed_face(w, v)
                if len(order) < 3:
                    order.append(f)
            i, j, k = order
            edges = (
                tuple(sorted((v, walk_nbrs[0]))),  # between i and j
                tuple(sorted((v, walk_nbrs[1]))),  # between j and k
                tuple(sorted((v, walk_nbrs[2]))),  # between k and i
            )
            stars.append(VertexStar(v, (i, j, k), (edges[0], edges[1], edges[2])))
        self._stars = stars
        return stars


# -- TES serialization --------------------------------------------------------


def serialize_tes(t: Tessellation, comments: tuple[str, ...] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"V {t.n_vertices}")
    for v in t.vertices:
        lines.append(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}")
    lines.append(f"F {t.n_faces}")
    for cyc in t.faces:
        lines.append("f " + " ".join(str(i) for i in cyc))
    return "\n".join(lines) + "\n"


def parse_tes(text: str, tol: Tolerances = DEFAULT_TOL) -> Tessellation:
    """Parse the TES format; rejects mixed face orientation outright."""
    content = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        content.append((ln, stripped.split()))

    pos = 0

    def take(expected: str) -> tuple[int, list[str]]:
        nonlocal pos
        if pos >= len(content):
            last = content[-1][0] if content else 0
            raise ParseError(last + 1, f"unexpected end of input, expected '{expected}'")
        item = content[pos]
        pos += 1
        return item

    ln, tok = take("V <count>")
    if tok[0] != "V" or len(tok) != 2:
        raise ParseError(ln, f"expected 'V <count>', got {' '.join(tok)!r}")
    try:
        nv = int(tok[1])
    except ValueError:
        raise ParseError(ln, f"bad vertex count {tok[1]!r}") from None

    vertices = []
    for _ in range(nv):
        ln, tok = take("v <x> <y> <z>")
        if tok[0] != "v" or len(tok) != 4:
            raise ParseError(ln, f"expected 'v <x> <y> <z>', got {' '.join(tok)!r}")
        try:
            xyz = [float(s) for s in tok[1:]]
        except ValueError:
            raise ParseError(ln, f"bad coordinate in {' '.join(tok)!r}") from None
        try:
            vertices.append(unit_vector(xyz, tol))
        except ValueError as exc:
            raise ParseError(ln, str(exc)) from None

    ln, tok = take("F <count>")
    if tok[0] != "F" or len(tok) != 2:
        raise ParseError(ln, f"expected 'F <count>', got {' '.join(tok)!r}")
    try:
        nf = int(tok[1])
    except ValueError:
        raise ParseError(ln, f"bad face count {tok[1]!r}") from None

    faces = []
    face_lines = []
    for _ in range(nf):
        ln, tok = take("f <i1> <i2> ...")
        if tok[0] != "f" or len(tok) < 4:
            raise ParseError(ln, f"expected 'f' with at least 3 indices, got {' '.join(tok)!r}")
        try:
            idx = [int(s) for s in tok[1:]]
        except ValueError:
            raise ParseError(ln, f"bad vertex index in {' '.join(tok)!r}") from None
        for i in idx:
            if not 0 <= i < nv:
                raise IndexError(f"line {ln}: vertex index {i} out of range 0..{nv - 1}")
        if len(set(idx)) != len(idx):
            raise ParseError(ln, "face repeats a vertex")
        faces.append(idx)
        face_lines.append(ln)

    if pos != len(content):
        ln, tok = content[pos]
        raise ParseError(ln, f"unexpected trailing content {' '.join(tok)!r}")

    seen: dict[tuple[int, int], int] = {}
    for fi, cyc in enumerate(faces):
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if (a, b) in seen:
                raise ParseError(
                    face_lines[fi],
                    f"directed edge ({a}, {b}) already used by face {seen[(a, b)]}; "
                    "mixed face orientation")
            seen[(a, b)] = fi

    return Tessellation(vertices, faces, tol)


# -- fixture helpers ----------------------------------------------------------


def perturb_vertex(
    t: Tessellation, index: int, magnitude: float, rng: np.random.Generator
) -> Tessellation:
    """Displace one vertex by ``magnitude`` radians in a random tangent direction."""
    if not 0 <= index < t.n_vertices:
        raise IndexError(f"vertex index {index} out of range")
    if magnitude <= 0:
        raise ValueError("perturbation magnitude must be positive")
    v = t.vertices[index]
    while True:
        g = rng.normal(size=3)
        tangent = g - np.dot(g, v) * v
        if np.linalg.norm(tangent) > 1e-9:
            break
    tangent = normalize(tangent)
    moved = math.cos(magnitude) * v + math.sin(magnitude) * tangent
    vertices = t.vertices.copy()
    vertices[index] = moved
    return Tessellation(vertices, [list(c) for c in t.faces])


def match_tessellations(a: Tessellation, b: Tessellation) -> float | None:
    """Max angular vertex deviation when b matches a combinatorially, else None.

    Faces are identified by index; vertices are paired through their sorted
    incident-face triples, and face cycles must agree up to rotation.
    """
    if a.n_faces != b.n_faces or a.n_vertices != b.n_vertices:
        return None

    def keys(t: Tessellation) -> dict[tuple[int, ...], int]:
        out = {}
        for v in range(t.n_vertices):
            key = tuple(sorted(t.vertex_faces[v]))
            if len(key) != 3 or key in out:
                return {}
            out[key] = v
        return out

    ka, kb = keys(a), keys(b)
    if not ka or set(ka) != set(kb):
        return None
    a_to_b = {ka[key]: kb[key] for key in ka}

    for fi in range(a.n_faces):
        ca = [a_to_b[v] for v in a.faces[fi]]
        cb = b.faces[fi]
        if len(ca) != len(cb):
            return None
        if ca[0] not in cb:
            return None
        shift = cb.index(ca[0])
        if ca != cb[shift:] + cb[:shift]:
            return None

    # atan2-based angles stay accurate at the sub-1e-9 scale where acos
    # saturates on its rounding floor.
    return max(
        angle_between_directions(a.vertices[va], b.vertices[vb])
        for va, vb in a_to_b.items()
    )
