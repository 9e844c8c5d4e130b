"""Isoparametric functions: gradient and Laplacian identities, mean curvature, tube radii.

Run with ``python demos/03_isoparametric.py``.
"""

import math

import numpy as np

from damek_ricci.clifford_algebra import CliffordSpec, build_algebra, random_unit
from damek_ricci.isoparametric import (DistortedDistance, DStar, SubsetF, level_offset, mean_curvature,
                                       mean_curvature_from_ab, tube_radius, tube_radius_quadrature,
                                       verify_isoparametric)
from damek_ricci.model import AffinePoint, random_point, sample_points

alg = build_algebra(CliffordSpec.from_tags(3, ("d1", 1)))
rng = np.random.default_rng(3)
pts = sample_points(alg, 50, rng)
zero_v, zero_z = np.zeros(alg.n), np.zeros(alg.m)

functions = {
    "D, center below (tubes)": DistortedDistance(alg, AffinePoint(zero_v, zero_z, -1.0)),
    "D, center above (spheres)": DistortedDistance(alg, AffinePoint(zero_v, zero_z, 1.0)),
    "limit function": DStar(alg, random_point(alg, rng), 0.8 * random_unit(rng, (alg.n,)), 0.6),
    "subset function": SubsetF(alg, (0, 2)),
}
print("max residual of |grad f|^2 = a(f) and Lap f = b(f):")
for name, fn in functions.items():
    rep = verify_isoparametric(fn, pts)
    print(f"  {name:<26s} grad {rep.grad_max:.1e}  Laplacian {rep.lap_max:.1e}  pass={rep.passed}")

tube = functions["D, center below (tubes)"]
print("\ntube mean curvature, closed form vs from (a, b):")
for r in (0.1, 1.0, 5.0):
    closed = mean_curvature("Tube", r, alg.m, alg.n)
    via_ab = mean_curvature_from_ab(tube, offset=level_offset(tube, r))
    print(f"  r={r:<4} {closed:+.15f} {via_ab:+.15f}")

c = 4 * math.sinh(0.75) ** 2
print(f"\ntube radius at level {c:.4f}: closed {tube_radius(tube, c):.15f}, "
      f"quadrature {tube_radius_quadrature(tube, c):.15f}")
