"""Closed-form geodesics and their projective prolongations.

For a unit ``xi = (v, z, s)`` at the identity the geodesic is
``t -> gamma(tanh(t/2))`` with

    gamma(theta) = (2 theta (1 - s theta)/chi v + 2 theta^2/chi J_z v,
                    2 theta/chi z, (1 - theta^2)/chi),
    chi(theta)   = (1 - s theta)^2 + |z|^2 theta^2.

The rational curve ``gamma`` is defined on all of RP^1 except at real roots of
``chi``; its image is an ellipse, a parabola or a line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clifford_algebra import DamekRicciAlgebra
from .errors import DegenerateRange, PoleAtTheta
from .model import AffinePoint, Point, TangentVec, identity, left_translate, translate_arrays

POLE_WINDOW = 1e-7
CHI_FLOOR = 1e-30
ZERO_TOL = 1e-12


class _Star:
    """The point at infinity in the direction of the a-axis."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "STAR"


STAR = _Star()


def chi(xi: TangentVec, theta):
    zz = xi.z @ xi.z
    return (1.0 - xi.s * theta) ** 2 + zz * np.square(theta)


def pole_parameter(xi: TangentVec, tol: float = ZERO_TOL):
    """Real root of ``chi`` (``1/s``, possibly ``inf``) when ``z = 0``, else None."""
    if np.linalg.norm(xi.z) > tol:
        return None
    return math.inf if xi.s == 0.0 else 1.0 / xi.s


def gamma_eval(alg: DamekRicciAlgebra, xi: TangentVec, theta: float) -> AffinePoint:
    """Prolonged geodesic through e with initial velocity ``xi`` at parameter ``theta``.

    ``theta = inf`` gives :func:`point_at_infinity`.  Parameters within
    ``POLE_WINDOW`` of a real root of ``chi`` raise :class:`PoleAtTheta`.
    """
    if math.isinf(theta):
        out = point_at_infinity(alg, xi)
        if out is STAR:
            raise PoleAtTheta("gamma(inf) is the point STAR")
        return out
    pole = pole_parameter(xi)
    if pole is not None and not math.isinf(pole) and abs(theta - pole) < POLE_WINDOW:
        raise PoleAtTheta(f"theta={theta} is within {POLE_WINDOW} of the pole {pole}")
    c = chi(xi, theta)
    if abs(c) <= CHI_FLOOR:
        raise PoleAtTheta(f"chi({theta}) = {c}")
    V = (2 * theta * (1 - xi.s * theta) / c) * xi.v + (2 * theta ** 2 / c) * alg.j(xi.z, xi.v)
    Z = (2 * theta / c) * xi.z
    t = (1 - theta ** 2) / c
    return Point(V, Z, t) if t > 0 else AffinePoint(V, Z, t)


def gamma_arrays(alg: DamekRicciAlgebra, xi: TangentVec, thetas):
    """Vectorized ``gamma``; returns coordinate arrays without pole checks."""
    th = np.asarray(thetas, dtype=float)
    c = chi(xi, th)
    Jv = alg.j(xi.z, xi.v)
    V = (2 * th * (1 - xi.s * th) / c)[..., None] * xi.v + (2 * th ** 2 / c)[..., None] * Jv
    Z = (2 * th / c)[..., None] * xi.z
    t = (1 - th ** 2) / c
    return V, Z, t


def point_at_infinity(alg: DamekRicciAlgebra, xi: TangentVec, tol: float = ZERO_TOL):
    """``gamma(inf)``: an affine point with ``t < 0``, or :data:`STAR` when ``|v| = 1``."""
    if abs(np.linalg.norm(xi.v) - 1.0) <= tol:
        return STAR
    q = xi.s ** 2 + xi.z @ xi.z
    V = (-2 * xi.s / q) * xi.v + (2 / q) * alg.j(xi.z, xi.v)
    return AffinePoint(V, np.zeros(alg.m), -1.0 / q)


@dataclass(frozen=True, eq=False)
class ProlongedGeodesic:
    """``eta = L_base o gamma_xi``; unit speed in ``t`` via ``theta = tanh(t/2)``."""

    alg: DamekRicciAlgebra
    base: Point
    xi: TangentVec

    def eta(self, theta: float):
        if math.isinf(theta):
            return self.at_infinity()
        return left_translate(self.alg, self.base, gamma_eval(self.alg, self.xi, theta))

    def at_infinity(self):
        g = point_at_infinity(self.alg, self.xi)
        return STAR if g is STAR else left_translate(self.alg, self.base, g)

    def point(self, t: float) -> Point:
        return geodesic_point(self, t)

    def eta_arrays(self, thetas):
        V, Z, t = gamma_arrays(self.alg, self.xi, thetas)
        return translate_arrays(self.alg, self.base, V, Z, t)

    @property
    def pole(self):
        return pole_parameter(self.xi)


def geodesic_point(g: ProlongedGeodesic, t: float) -> Point:
    out = left_translate(g.alg, g.base, gamma_eval(g.alg, g.xi, math.tanh(t / 2.0)))
    return out if isinstance(out, Point) else Point(out.V, out.Z, out.t)


def geodesic_from(alg: DamekRicciAlgebra, xi: TangentVec, base: Point | None = None) -> ProlongedGeodesic:
    return ProlongedGeodesic(alg, identity(alg) if base is None else base, xi)


@dataclass(frozen=True, eq=False)
class ConicClass:
    """Affine type of the prolongation and the implicit equations of its image."""

    tag: str
    alg: DamekRicciAlgebra
    xi: TangentVec

    def coordinates(self, thetas):
        """``(X, Y, Z, W)`` along ``E_v, E_J, E_z, A`` and the off-plane remainder."""
        V, Zc, W = gamma_arrays(self.alg, self.xi, thetas)
        v, z = self.xi.v, self.xi.z
        nv, nz = np.linalg.norm(v), np.linalg.norm(z)
        Ev = v / nv if nv > ZERO_TOL else np.zeros_like(v)
        Jv = self.alg.j(z, v)
        nj = np.linalg.norm(Jv)
        EJ = Jv / nj if nj > ZERO_TOL else np.zeros_like(v)
        Ez = z / nz if nz > ZERO_TOL else np.zeros_like(z)
        X, Y, Zs = V @ Ev, V @ EJ, Zc @ Ez
        rest = (np.linalg.norm(V - X[..., None] * Ev - Y[..., None] * EJ, axis=-1)
                + np.linalg.norm(Zc - Zs[..., None] * Ez, axis=-1))
        return X, Y, Zs, W, rest

    def residuals(self, thetas) -> np.ndarray:
        """Max absolute residual of the defining equations at each parameter."""
        s = self.xi.s
        nv, nz = np.linalg.norm(self.xi.v), np.linalg.norm(self.xi.z)
        X, Y, Z, W, rest = self.coordinates(thetas)
        if self.tag == "Ellipse" and nv > ZERO_TOL:
            eqs = [nz * X + s * Y - nv * Z,
                   (1 - nv ** 2 / 2) * Y - s * nv * Z + nv * nz * W - nv * nz,
                   nz * (X ** 2 + Y ** 2) - 2 * nv * Y]
        elif self.tag == "Ellipse":
            eqs = [Z ** 2 + W ** 2 - (2 * s / nz) * Z - 1.0]
        elif self.tag == "Parabola":
            eqs = [4 * nv ** 2 * W + X ** 2 - (2 * nv + s * X) ** 2]
        else:
            th = np.asarray(thetas, dtype=float)
            eqs = [W - (1 + s * th) / (1 - s * th)]
        return np.max(np.abs(np.vstack(eqs)), axis=0) + rest

    def residual(self, thetas) -> float:
        return float(np.max(self.residuals(thetas)))


def classify_conic(alg: DamekRicciAlgebra, xi: TangentVec, tol: float = ZERO_TOL) -> ConicClass:
    if np.linalg.norm(xi.z) > tol:
        return ConicClass("Ellipse", alg, xi)
    if np.linalg.norm(xi.v) > tol:
        return ConicClass("Parabola", alg, xi)
    return ConicClass("Line", alg, xi)


def safe_theta_grid(xi: TangentVec, count: int = 50, lo: float = -3.0, hi: float = 3.0, gap: float = 0.25) -> np.ndarray:
    """Evenly spaced parameters that stay away from real roots of ``chi``."""
    grid = np.linspace(lo, hi, count)
    pole = pole_parameter(xi)
    if pole is not None and not math.isinf(pole):
        near = np.abs(grid - pole) < gap
        grid[near] = pole + np.where(grid[near] >= pole, gap, -gap)
    return grid


def to_homogeneous(theta):
    """Extended real (float, ``inf`` allowed) or pair ``(x, y)`` to a homogeneous 2-vector."""
    if isinstance(theta, (tuple, list, np.ndarray)):
        x, y = theta
        return float(x), float(y)
    theta = float(theta)
    if math.isinf(theta):
        return 1.0, 0.0
    return theta, 1.0


def _det(p, q):
    return p[0] * q[1] - p[1] * q[0]


def cross_ratio(a, b, c, d) -> float:
    """``(a, b; c, d) = (a - c)(b - d) / ((a - d)(b - c))`` on RP^1."""
    pts = [to_homogeneous(x) for x in (a, b, c, d)]
    for i in range(4):
        for j in range(i + 1, 4):
            scale = math.hypot(*pts[i]) * math.hypot(*pts[j])
            if abs(_det(pts[i], pts[j])) <= 1e-15 * scale:
                raise DegenerateRange("cross-ratio needs four distinct points")
    A, B, C, D = pts
    return (_det(A, C) * _det(B, D)) / (_det(A, D) * _det(B, C))


def harmonic_partner(theta):
    """``1/theta`` on RP^1, the partner of ``theta`` with respect to ``{1, -1}``."""
    theta = float(theta)
    if theta == 0.0:
        return math.inf
    if math.isinf(theta):
        return 0.0
    return 1.0 / theta


def mobius(matrix, theta):
    """Apply a projective map of RP^1 given by a 2x2 matrix; returns a homogeneous pair."""
    x, y = to_homogeneous(theta)
    M = np.asarray(matrix, dtype=float)
    return (M[0, 0] * x + M[0, 1] * y, M[1, 0] * x + M[1, 1] * y)
