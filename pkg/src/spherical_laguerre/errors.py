"""Exception types shared across the package."""


class GeometryError(ValueError):
    """Base class for geometric failures with a defined cause."""


class DegenerateSites(GeometryError):
    """Two weighted sites coincide, so their bisector is undefined."""


class InvalidPolygon(GeometryError):
    """Fewer than three vertices, or consecutive vertices equal/antipodal."""


class ParallelPlanes(GeometryError):
    """Two planes with (anti)parallel normals have no intersection line."""


class DegenerateTriple(GeometryError):
    """Three planes do not meet in a single point."""


class UnboundedIntersection(GeometryError):
    """The halfspace intersection is not a bounded polyhedron."""


class NonSimpleVertex(GeometryError):
    """A polyhedron vertex touches more than three faces."""


class DegenerateSample(GeometryError):
    """A sample point maps to infinity under a projective transform."""


class SeedOutOfFace(GeometryError):
    """The chosen seed center does not lie inside its polygon."""


class ArcMissesPolygon(GeometryError):
    """The perpendicular arc never enters the adjacent polygon."""


class DegenerateSeed(GeometryError):
    """A required intersection in the seed construction is degenerate."""


class DisconnectedPropagation(GeometryError):
    """Plane propagation stalled before covering every face (internal)."""


class DegeneratePropagation(GeometryError):
    """A propagation step hit a numerically degenerate intersection."""

    def __init__(self, vertex: int, message: str):
        super().__init__(f"vertex {vertex}: {message}")
        self.vertex = vertex


class NonPositiveOffset(GeometryError):
    """A face plane does not keep the origin strictly on its inner side."""


class TooFewActive(GeometryError):
    """Fewer than four generators survived the halfspace intersection."""


class InvalidTessellation(GeometryError):
    """Input failed structural validation (distinct from a false verdict)."""


class ParseError(ValueError):
    """Malformed text input; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
