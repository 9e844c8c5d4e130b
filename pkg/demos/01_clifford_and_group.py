"""Build a Clifford module, check its relations, and move around the group.

Run with ``python demos/01_clifford_and_group.py``.
"""

import numpy as np

from damek_ricci.clifford_algebra import CliffordSpec, build_algebra, validate_clifford
from damek_ricci.model import AffinePoint, distance, left_translate, random_point

spec = CliffordSpec.from_tags(3, ("d1", 1), ("d2", 1))
alg = build_algebra(spec)
print(f"m={alg.m}, n={alg.n}")

rep = validate_clifford(alg, samples=200, rng=np.random.default_rng(0))
for name, res in sorted(rep.residuals.items()):
    print(f"  {name:<28s} {res:.2e}")

# Left translations are isometries.
rng = np.random.default_rng(1)
p, x, y = (random_point(alg, rng) for _ in range(3))
before = distance(alg, x, y)
after = distance(alg, left_translate(alg, p, x), left_translate(alg, p, y))
print(f"d(x, y) = {before:.12f}, d(px, py) = {after:.12f}")

e = AffinePoint(np.zeros(alg.n), np.zeros(alg.m), 1.0)
print(f"d(e, x) = {distance(alg, e, x):.12f}")
