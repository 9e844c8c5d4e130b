"""Focal varieties: membership, distance, and which ones are totally geodesic.

Run with ``python demos/04_focal_varieties.py``.
"""

import numpy as np

from damek_ricci.clifford_algebra import CliffordSpec, build_algebra, j2_satisfied, random_unit
from damek_ricci.focal import (FStar, Fx0, distance_to_focal, kahler_angle_spread, membership_residual,
                               random_ball_point, totally_geodesic_at, upsilon)
from damek_ricci.isoparametric import tube_radius
from damek_ricci.model import AffinePoint, random_point

alg = build_algebra(CliffordSpec.from_tags(3, ("d1", 1), ("d2", 1)))
rng = np.random.default_rng(4)

F = Fx0(alg, AffinePoint(0.3 * rng.standard_normal(alg.n), 0.3 * rng.standard_normal(alg.m), -1.5))
q = upsilon(F, random_ball_point(F, rng))
print(f"focal variety of radius {F.radius:.4f}; membership residual of a sampled point {membership_residual(F, q):.1e}")

fn = F.function()
for _ in range(3):
    x = random_point(alg, rng)
    print(f"  distance by minimization {distance_to_focal(F, x, rng=rng):.12f}, "
          f"tube radius of its level {tube_radius(fn, fn(x)):.12f}")

# On d1 + d2 the J^2 condition holds only on each summand.
print("\nlimit focal varieties: J^2 condition, geodesic test, Kahler angle spread")
half = alg.n // 2
for label, v in [("first summand", np.r_[random_unit(rng, (half,)), np.zeros(half)]),
                 ("mixed", random_unit(rng, (alg.n,)))]:
    v = 0.6 * v
    Fs = FStar(alg, v, rng.standard_normal(alg.n), 0.8, 1.0)
    test = totally_geodesic_at(Fs, rng=rng)
    print(f"  {label:<14s} J^2={j2_satisfied(alg, v)[0]!s:<5} totally geodesic={test.flag!s:<5} "
          f"escape {test.residual:.1e}  spread {kahler_angle_spread(alg, v, count=20, rng=rng):.1e}")
