"""Damek-Ricci spaces in the half-space model.

Clifford-module construction, closed-form geodesics and their projective
prolongations, isoparametric functions with their focal varieties, and
numerical checks of the identities they satisfy.
"""

from .clifford_algebra import (CliffordSpec, DamekRicciAlgebra, ValidationReport, build_algebra,
                               irreducible_dim, irreducible_generators, j2_residual, j2_satisfied,
                               predict_j2_set, validate_clifford)
from .errors import *  # noqa: F401,F403
from .focal import (FStar, Fx0, distance_to_focal, focal_intersections, kahler_angles,
                    membership_residual, orthogonal_velocity, totally_geodesic_at, upsilon)
from .geodesic import (STAR, ConicClass, ProlongedGeodesic, classify_conic, cross_ratio,
                       gamma_eval, geodesic_from, harmonic_partner, point_at_infinity)
from .isoparametric import (ConstantFn, DistortedDistance, DStar, SubsetF, eval_D, eval_Dstar,
                            eval_subsetF, mean_curvature, mean_curvature_from_ab, sphere_h_from_density,
                            tube_radius, tube_radius_quadrature, verify_isoparametric, volume_density)
from .model import (AffinePoint, Point, TangentVec, distance, identity, inverse, laplacian,
                    left_translate, multiply)

__version__ = "0.1.0"
