import math

import numpy as np
import pytest

from spherical_laguerre.diagram import (
    GeneratorSet,
    brute_force_assign,
    circle_plane,
    construct_slvd,
    parse_gen,
    plane_circle,
    random_generators,
    random_sphere_points,
    serialize_gen,
)
from spherical_laguerre.errors import ParseError, UnboundedIntersection
from spherical_laguerre.sphere import (
    SphericalCircle,
    laguerre_proximity,
    normalize,
    point_in_spherical_polygon,
    polygon_edge_normals,
)

from conftest import bounded_diagram

EZ = np.array([0.0, 0.0, 1.0])


def test_circle_plane_tangent():
    plane = circle_plane(SphericalCircle(EZ, 0.0))
    assert np.allclose(plane.normal, EZ)
    assert plane.offset == pytest.approx(1.0)


def test_circle_plane_cosine_offset():
    plane = circle_plane(SphericalCircle(EZ, math.pi / 3))
    assert plane.offset == pytest.approx(0.5, abs=1e-15)


def test_circle_plane_round_trip():
    rng = np.random.default_rng(1)
    for _ in range(20):
        c = SphericalCircle(normalize(rng.normal(size=3)), rng.uniform(0.0, 1.3))
        back = plane_circle(circle_plane(c))
        assert abs(back.radius - c.radius) < 1e-15
        assert np.allclose(back.center, c.center)


def test_generator_set_rejects_small_and_duplicates():
    c = SphericalCircle(EZ, 0.2)
    with pytest.raises(ValueError):
        GeneratorSet([c, c, c])
    others = [SphericalCircle(normalize([1, i, 0.5]), 0.3) for i in (1, 2, 3)]
    with pytest.raises(ValueError):
        GeneratorSet([c, c] + others[:2])


def test_construct_cube(cube_diagram):
    gens, fw = cube_diagram
    assert fw.tessellation.n_faces == 6
    assert fw.active == (0, 1, 2, 3, 4, 5)
    assert not fw.dropped


def test_construct_tetra(tetra_diagram):
    gens, fw = tetra_diagram
    assert fw.tessellation.n_faces == 4
    assert fw.tessellation.n_vertices == 4


def test_construct_rejects_hemispherical_cap():
    circles = [SphericalCircle(normalize([0.1 * i, 0.05, 1.0]), 0.2) for i in range(5)]
    with pytest.raises(UnboundedIntersection):
        construct_slvd(GeneratorSet(circles))


def test_brute_force_center_wins():
    gens, _ = bounded_diagram(12, tag=31)
    prox = np.array([[laguerre_proximity(c.center, other) for other in gens.circles]
                     for c in gens.circles])
    for i, c in enumerate(gens.circles):
        if np.argmax(prox[i]) != i:
            continue
        winners, _ = brute_force_assign(gens, [c.center])
        assert winners[0] == i


def test_brute_force_tie_on_symmetric_pair():
    circles = [
        SphericalCircle(np.array([1.0, 0.0, 0.0]), 0.3),
        SphericalCircle(np.array([-1.0, 0.0, 0.0]), 0.3),
        SphericalCircle(np.array([0.0, 1.0, 0.0]), 0.3),
        SphericalCircle(np.array([0.0, -1.0, 0.0]), 0.3),
    ]
    gens = GeneratorSet(circles)
    winners, boundary = brute_force_assign(gens, [np.array([0.0, 0.0, 1.0])])
    assert boundary[0]


def test_edges_lie_on_generator_bisectors(random_50cell):
    # Every tessellation edge endpoint satisfies the bisector plane equation
    # of the two generators whose regions it separates.
    gens, fw = random_50cell
    t = fw.tessellation
    for (a, b) in sorted(t.edge_keys()):
        f1, f2 = t.edge_faces(a, b)
        c1 = gens.circles[fw.active[f1]]
        c2 = gens.circles[fw.active[f2]]
        d = c1.center / math.cos(c1.radius) - c2.center / math.cos(c2.radius)
        d = d / np.linalg.norm(d)
        assert abs(np.dot(d, t.vertices[a])) < 1e-10
        assert abs(np.dot(d, t.vertices[b])) < 1e-10


def test_projection_invariant_under_offset_scaling(random_50cell):
    from spherical_laguerre.polyhedra import central_projection, scale_polyhedron
    _, fw = random_50cell
    scaled = central_projection(scale_polyhedron(fw.polyhedron, 0.61))
    assert scaled.faces == fw.tessellation.faces
    assert np.allclose(scaled.vertices, fw.tessellation.vertices, atol=1e-12)


def _face_membership_assign(fw, samples):
    """Deepest-face assignment used as the geometric side of the oracle."""
    t = fw.tessellation
    owners = []
    normal_rows = []
    for fi in range(t.n_faces):
        ns = polygon_edge_normals(t.face_polygon(fi))
        normal_rows.append(ns)
        owners.extend([fi] * len(ns))
    normals = np.vstack(normal_rows)
    owners = np.array(owners)
    dots = samples @ normals.T
    margins = np.full((len(samples), t.n_faces), np.inf)
    np.minimum.at(margins.T, owners, dots.T)
    best = np.argmax(margins, axis=1)
    clearance = margins[np.arange(len(samples)), best]
    return best, clearance


@pytest.mark.parametrize("n,tag", [(12, 41), (30, 42), (52, 43)])
def test_brute_force_agrees_with_diagram(n, tag):
    gens, fw = bounded_diagram(n, tag=tag)
    rng = np.random.default_rng(tag)
    samples = random_sphere_points(20000, rng)
    winners, _ = brute_force_assign(gens, samples)
    best_face, clearance = _face_membership_assign(fw, samples)
    keep = clearance >= math.sin(1e-6)
    expect = np.array([fw.active[f] for f in best_face])
    assert np.array_equal(winners[keep], expect[keep])
    assert keep.sum() > 0.9 * len(samples)


def test_dropped_generator_never_wins():
    gens, fw = bounded_diagram(40, tag=44)
    if not fw.dropped:
        pytest.skip("fixture kept every generator")
    rng = np.random.default_rng(44)
    samples = random_sphere_points(50000, rng)
    winners, boundary = brute_force_assign(gens, samples)
    interior_winners = set(winners[~boundary].tolist())
    assert not interior_winners & set(fw.dropped)


def test_membership_cross_check_single_points(random_50cell):
    gens, fw = random_50cell
    t = fw.tessellation
    rng = np.random.default_rng(45)
    samples = random_sphere_points(200, rng)
    winners, _ = brute_force_assign(gens, samples)
    best_face, clearance = _face_membership_assign(fw, samples)
    for s, w, f, c in zip(samples, winners, best_face, clearance):
        if c < 1e-5:
            continue
        assert point_in_spherical_polygon(s, t.face_polygon(f))
        assert fw.active[f] == w


def test_gen_round_trip():
    gens, _ = bounded_diagram(10, tag=46)
    again = parse_gen(serialize_gen(gens, comments=("fixture",)))
    assert len(again) == len(gens)
    for a, b in zip(gens.circles, again.circles):
        assert np.array_equal(a.center, b.center)
        assert a.radius == b.radius


def test_gen_parse_rejects_malformed():
    with pytest.raises(ParseError, match="line 2"):
        parse_gen("# ok\nc 1 0 0\n")


def test_random_generators_radius_window():
    gens = random_generators(50, np.random.default_rng(0))
    radii = gens.radii()
    assert radii.min() >= 0.05 and radii.max() <= 0.45
