"""Numerical tolerances threaded through every geometric operation."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    eps_norm: float = 1e-12        # zero test for vector norms and site differences
    eps_offset: float = 1e-9       # minimum distance of a face plane from the origin
    eps_par: float = 1e-12         # parallel-plane test on the cross product norm
    eps_det: float = 1e-12         # singularity test for 3x3 plane systems
    eps_inc: float = 1e-10         # point-on-plane incidence slack
    unit_slack: float = 1e-6       # accepted deviation from unit length before renormalizing
    boundary_slack: float = 1e-12  # inclusive margin for on-boundary polygon tests
    vertex_merge: float = 1e-9     # distance below which polyhedron vertices are merged


DEFAULT_TOL = Tolerances()
