"""Geodesics through the identity: conic type, unit speed, point at infinity.

Run with ``python demos/02_geodesics.py``.
"""

import numpy as np

from damek_ricci.clifford_algebra import CliffordSpec, build_algebra, random_unit
from damek_ricci.geodesic import STAR, classify_conic, geodesic_from, point_at_infinity, safe_theta_grid
from damek_ricci.model import TangentVec, distance

alg = build_algebra(CliffordSpec.from_tags(3, ("d1", 1)))
rng = np.random.default_rng(2)

cases = {
    "generic": TangentVec.from_array(random_unit(rng, (alg.n + alg.m + 1,)), alg.n),
    "horizontal": TangentVec(random_unit(rng, (alg.n,)), np.zeros(alg.m), 0.0),
    "vertical line": TangentVec(np.zeros(alg.n), np.zeros(alg.m), 1.0),
}
for label, xi in cases.items():
    g = geodesic_from(alg, xi)
    conic = classify_conic(alg, xi)
    speed = abs(distance(alg, g.point(-0.7), g.point(1.3)) - 2.0)
    far = point_at_infinity(alg, xi)
    where = "the star point" if far is STAR else f"V={np.round(far.V, 4)}, Z={np.round(far.Z, 4)}"
    print(f"{label:<14s} conic={conic.tag:<10s} residual={conic.residual(safe_theta_grid(xi, count=50)):.1e} "
          f"speed error={speed:.1e}")
    print(f"{'':<14s} endpoint at infinity: {where}")
