"""Fixed numerical tolerances.

They are module-level constants so that callers can read (or, in tests,
monkeypatch) them in one place.
"""

# point-in-polytope membership
MEMBERSHIP_TOL = 1e-8
# two vertices are the same point below this distance
VERTEX_TOL = 1e-9
# Monte-Carlo subdivision checks
SUBDIVISION_TOL = 1e-7
# gate points must lie on their face within this distance
FACE_TOL = 1e-7
# perturbation applied to a segment end point on degenerate crossings
CROSSING_PERTURBATION = 1e-7
# arccos argument may overshoot [-1, 1] by this much before it is an error
ANGLE_CLAMP_TOL = 1e-12
# polyhedral norms enumerate 2**d polar vertices; refuse beyond this
MAX_POLYHEDRAL_DIM = 10
# strict margin before a region is eliminated by preprocessing
ELIMINATION_MARGIN = 1e-9
# relative slack on top of it, covering the interior-point objective error
ELIMINATION_REL_MARGIN = 1e-6
