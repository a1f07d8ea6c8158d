import math

import numpy as np
import pytest

from spherical_laguerre import (
    GeneratorSet,
    SphericalCircle,
    construct_slvd,
    random_generators,
)
from spherical_laguerre.errors import TooFewActive, UnboundedIntersection


def bounded_diagram(n, tag, min_faces=4):
    """Random generator set whose halfspace intersection is bounded.

    Small n frequently lands every circle in one hemisphere, which is a
    legitimate unbounded input, so fixtures redraw until construction
    succeeds. Deterministic given (tag, n).
    """
    for sub in range(500):
        rng = np.random.default_rng([tag, n, sub])
        gens = random_generators(n, rng)
        try:
            fw = construct_slvd(gens)
        except (UnboundedIntersection, TooFewActive):
            continue
        if fw.tessellation.n_faces >= min_faces:
            return gens, fw
    raise RuntimeError(f"no bounded {n}-generator fixture found for tag {tag}")


@pytest.fixture(scope="session")
def cube_diagram():
    """Six equal circles at the axis directions: the cube-graph diagram."""
    axes = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    gens = GeneratorSet([SphericalCircle(np.array(a, float), math.pi / 4) for a in axes])
    return gens, construct_slvd(gens)


@pytest.fixture(scope="session")
def tetra_diagram():
    """Four equal circles at regular tetrahedron vertices."""
    verts = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    gens = GeneratorSet(
        [SphericalCircle(np.array(v, float) / math.sqrt(3), 0.6) for v in verts])
    return gens, construct_slvd(gens)


@pytest.fixture(scope="session")
def random_50cell():
    """A bounded diagram with roughly 50 faces."""
    return bounded_diagram(52, tag=7)
