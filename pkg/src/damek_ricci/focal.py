"""Focal varieties of the distorted distance and of its limit function.

``F_{x0}`` (``t0 < 0``) is the paraboloid-shaped set

    |V - V0|^2 = -4 (t + t0),   Z = Z0 - [V, V0] / 2,

a graph over the open ball ``B = {|V - V0| < 2 sqrt(-t0)}`` through the map
``upsilon``.  ``F_star`` is cut out by ``[V - Vb, v] = 0`` and
``<V - Vb, v> = 2 s sqrt(tb)``.  Both are minimal; they are totally geodesic
exactly where the relevant vector satisfies the J^2-condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, optimize

from .clifford_algebra import SUBSPACE_TOL, DamekRicciAlgebra, j2_satisfied, random_unit
from .errors import (ConvergenceFailure, DomainError, InvalidFreeParameters, OutsideBall,
                     SubspaceViolation)
from .geodesic import ProlongedGeodesic
from .isoparametric import DistortedDistance, DStar
from .model import AffinePoint, Point, TangentVec, identity, inverse, left_translate

MEMBERSHIP_TOL = 1e-10
ESCAPE_TOL = 1e-8
ESCAPE_THRESHOLD = 1e-3
BALL_MARGIN = 1e-6


@dataclass(frozen=True, eq=False)
class Fx0:
    """Focal variety of ``D_{x0}`` for a center with ``t0 < 0``."""

    alg: DamekRicciAlgebra
    x0: AffinePoint

    def __post_init__(self):
        if not self.x0.t < 0:
            raise DomainError(f"focal variety F_x0 needs t0 < 0, got {self.x0.t}")

    @property
    def radius(self) -> float:
        """Radius ``2 sqrt(-t0)`` of the parameter ball around ``V0``."""
        return 2.0 * math.sqrt(-self.x0.t)

    def function(self) -> DistortedDistance:
        return DistortedDistance(self.alg, self.x0)

    def residual(self, V, Z, t):
        dV = V - self.x0.V
        r1 = np.abs(np.sum(dV * dV, axis=-1) + 4.0 * (t + self.x0.t))
        q = Z - self.x0.Z + 0.5 * self.alg.bracket(V, self.x0.V)
        return np.maximum(r1, np.linalg.norm(q, axis=-1))

    def translated(self, p: Point) -> "Fx0":
        """``L_p(F_{x0}) = F_{L_p x0}``."""
        return Fx0(self.alg, left_translate(self.alg, p, self.x0))

    def contains_identity(self, tol: float = MEMBERSHIP_TOL) -> bool:
        e = identity(self.alg)
        return membership_residual(self, e) <= tol


@dataclass(frozen=True, eq=False)
class FStar:
    """Focal variety of ``D_star`` built from ``(v, Vb, s, tb)``."""

    alg: DamekRicciAlgebra
    v: np.ndarray
    Vbar: np.ndarray
    s: float
    tbar: float

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        object.__setattr__(self, "Vbar", np.asarray(self.Vbar, dtype=float))
        if not np.any(self.v):
            raise DomainError("F_star needs v != 0")
        if not self.tbar > 0:
            raise DomainError("F_star needs tbar > 0")

    @classmethod
    def from_dstar(cls, fn: DStar) -> "FStar":
        return cls(fn.alg, fn.v, fn.base.V, fn.s, fn.base.t)

    def residual(self, V, Z, t):
        dV = V - self.Vbar
        r1 = np.abs(dV @ self.v - 2.0 * self.s * math.sqrt(self.tbar))
        return np.maximum(r1, np.linalg.norm(self.alg.bracket(dV, self.v), axis=-1))

    def normal_basis(self) -> np.ndarray:
        """Orthonormal rows spanning ``Rv + J_z v``."""
        M = np.vstack([self.v[None], self.alg.j_all(self.v)])
        return linalg.orth(M.T).T

    def point(self, w, Z, t) -> Point:
        """The member with ``V = Vb + (2 s sqrt(tb)/|v|^2) v + w_perp``, ``w_perp`` the part of
        ``w`` orthogonal to ``Rv + J_z v``."""
        N = self.normal_basis()
        w = np.asarray(w, dtype=float)
        w = w - N.T @ (N @ w)
        V = self.Vbar + (2.0 * self.s * math.sqrt(self.tbar) / (self.v @ self.v)) * self.v + w
        return Point(V, Z, t)

    def tangent_basis(self) -> np.ndarray:
        """Orthonormal basis (rows, in s = v + z + a) of the tangent space pulled back to e."""
        n, m = self.alg.n, self.alg.m
        N = self.normal_basis()
        comp = linalg.null_space(N) if N.size else np.eye(n)
        rows = [np.concatenate([c, np.zeros(m + 1)]) for c in comp.T]
        rows += [np.concatenate([np.zeros(n), e]) for e in np.eye(m + 1)]
        return np.array(rows).reshape(-1, n + m + 1)


FocalVariety = Fx0 | FStar


def membership_residual(F, x: AffinePoint) -> float:
    """Largest residual of the defining equations of ``F`` at ``x``."""
    return float(F.residual(x.V, x.Z, x.t))


def upsilon(F: Fx0, Vbar) -> Point:
    """Graph parameterization ``(Vb, Z0 - [Vb, V0]/2, -t0 - |Vb - V0|^2/4)``."""
    Vbar = np.asarray(Vbar, dtype=float)
    d = Vbar - F.x0.V
    if not np.linalg.norm(d) < F.radius:
        raise OutsideBall(f"|Vb - V0| = {np.linalg.norm(d):g} not below {F.radius:g}")
    t = -F.x0.t - 0.25 * (d @ d)
    if not t > 0:
        raise OutsideBall("point too close to the boundary of the parameter ball")
    return Point(Vbar, F.x0.Z - 0.5 * F.alg.bracket(Vbar, F.x0.V), t)


def random_ball_point(F: Fx0, rng, shrink: float = 0.9) -> np.ndarray:
    """Uniformly distributed ``Vb`` in the ball of radius ``shrink * radius``."""
    n = F.alg.n
    u = random_unit(rng, (n,))
    return F.x0.V + shrink * F.radius * rng.uniform() ** (1.0 / n) * u


def focal_center_through_identity(alg: DamekRicciAlgebra, V0) -> AffinePoint:
    """The center ``(V0, 0, -|V0|^2/4 - 1)``, whose focal variety contains e."""
    V0 = np.asarray(V0, dtype=float)
    return AffinePoint(V0, np.zeros(alg.m), -0.25 * (V0 @ V0) - 1.0)


def orthogonal_velocity(F: Fx0, z, s: float, tol: float = 1e-12) -> TangentVec:
    """Unit ``xi = (-(s V0 + J_z V0)/2, z, s)`` orthogonal to ``F`` at e.

    Admissible free parameters satisfy ``s^2 + |z|^2 = -1/t0``; the prolonged
    geodesic then runs through ``x0`` at ``theta = inf``.
    """
    if membership_residual(F, identity(F.alg)) > MEMBERSHIP_TOL:
        raise DomainError("the focal variety does not pass through e")
    z = np.asarray(z, dtype=float)
    target = -1.0 / F.x0.t
    if abs(s * s + z @ z - target) > tol * max(1.0, target):
        raise InvalidFreeParameters(f"s^2 + |z|^2 = {s * s + z @ z:g}, expected {target:g}")
    V0 = F.x0.V
    return TangentVec(-0.5 * (s * V0 + F.alg.j(z, V0)), z, s)


def sample_orthogonal_velocity(F: Fx0, rng) -> TangentVec:
    """Random admissible ``(z, s)`` turned into an orthogonal velocity."""
    zs = random_unit(rng, (F.alg.m + 1,)) * math.sqrt(-1.0 / F.x0.t)
    return orthogonal_velocity(F, zs[:-1], float(zs[-1]))


def tangent_at_identity(F: Fx0, vprime) -> TangentVec:
    """Tangent vector ``(v', -[v', V0]/2, <v', V0>/2)`` of ``F`` at e."""
    vprime = np.asarray(vprime, dtype=float)
    V0 = F.x0.V
    return TangentVec(vprime, -0.5 * F.alg.bracket(vprime, V0), 0.5 * float(vprime @ V0))


def _ball_unmap(F: Fx0, Vbar, margin: float):
    # inverse of the radial tanh squeeze R^n -> ball used by the search
    d = np.asarray(Vbar, dtype=float) - F.x0.V
    r = np.linalg.norm(d)
    if r == 0.0:
        return d
    rho = min(r / (F.radius * (1.0 - margin)), 1.0 - 1e-9)
    return d * (math.atanh(rho) / r)


def distance_to_focal(F: Fx0, x: Point, starts: int = 8, rng=None, tol: float = 1e-9,
                      agree: float = 1e-4, margin: float = BALL_MARGIN) -> float:
    """Riemannian distance from ``x`` to ``F`` by multi-start Nelder-Mead over the ball.

    Starts are the vertex, the vertical projection of ``x`` (when inside the
    ball) and random ball points.  Raises :class:`ConvergenceFailure` when the
    converged values spread by more than ``agree``.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    alg = F.alg

    x0, R = F.x0, F.radius * (1.0 - margin)
    # both brackets are linear in Vb: [Vb, V0] = -K0 Vb and [x.V, Vb] = Kx Vb
    K0, Kx = alg.j_all(x0.V), alg.j_all(x.V)

    def objective(u):
        # upsilon(ball(u)) and the stable distance formula, inlined for speed
        r = math.sqrt(u @ u)
        Vb = x0.V + (R * math.tanh(r) / r) * u if r > 0 else x0.V
        d = Vb - x0.V
        tb = -x0.t - 0.25 * (d @ d)
        if not tb > 0:
            return math.inf
        Zb = x0.Z + 0.5 * (K0 @ Vb)
        dV = x.V - Vb
        q = x.Z - Zb + 0.5 * (Kx @ Vb)
        vv = dV @ dV
        num = (x.t - tb) ** 2 + 0.5 * (x.t + tb) * vv + q @ q + vv * vv / 16.0
        return 2.0 * math.asinh(0.5 * math.sqrt(num / (x.t * tb)))

    inits = [np.zeros(alg.n)]
    if np.linalg.norm(x.V - F.x0.V) < F.radius * (1.0 - margin):
        inits.append(_ball_unmap(F, x.V, margin))
    while len(inits) < starts:
        inits.append(_ball_unmap(F, random_ball_point(F, rng), margin))

    values = []
    opts = {"adaptive": True, "maxiter": 200 * alg.n ** 2, "maxfev": 400 * alg.n ** 2}
    for u0 in inits[:starts]:
        res = optimize.minimize(objective, u0, method="Nelder-Mead", tol=tol, options=opts)
        if not res.success:
            # simplex searches can stall in higher dimensions; restart once from the best vertex
            res = optimize.minimize(objective, res.x, method="Nelder-Mead", tol=tol, options=opts)
        values.append(float(res.fun))
    values = np.array(values)
    if values.max() - values.min() > agree:
        raise ConvergenceFailure(f"starts disagree: {values.min():.3e} .. {values.max():.3e}")
    return float(values.min())


def focal_intersections(F: Fx0, g: ProlongedGeodesic, grid: int = 1000, tol: float = 1e-8) -> list[float]:
    """Parameters ``theta`` in (-1, 1) where the geodesic meets ``F``.

    Zeros of the non-negative ``D_{x0}`` along the curve are bracketed by
    local minima on a uniform grid and refined by bounded scalar search; only
    minima with ``D <= tol`` count.
    """
    D = F.function()
    th = np.linspace(-1.0, 1.0, grid + 2)[1:-1]
    V, Z, t = g.eta_arrays(th)
    vals = D.value(V, Z, t)

    def along(theta):
        Vs, Zs, ts = g.eta_arrays(np.array([theta]))
        return float(D.value(Vs, Zs, ts)[0])

    roots = []
    for i in range(grid):
        left = vals[i - 1] if i > 0 else math.inf
        right = vals[i + 1] if i < grid - 1 else math.inf
        if vals[i] <= left and vals[i] < right:
            lo, hi = th[max(i - 1, 0)], th[min(i + 1, grid - 1)]
            res = optimize.minimize_scalar(along, bounds=(lo, hi), method="bounded",
                                           options={"xatol": 1e-12})
            if res.fun <= tol:
                roots.append(float(res.x))
    return roots


def _fx0_directions(F: Fx0, Vbar, count: int, rng):
    """Unit tangent vectors at e of ``L_p^{-1}(F)``, ``p = upsilon(Vbar)``."""
    p = upsilon(F, Vbar)
    moved = Fx0(F.alg, left_translate(F.alg, inverse(F.alg, p), F.x0))
    out = []
    for k in range(count):
        vp = random_unit(rng, (F.alg.n,))
        out.append(tangent_at_identity(moved, vp).unit())
    return p, out


def _fstar_directions(F: FStar, count: int, rng):
    T = F.tangent_basis()
    return [TangentVec.from_array(random_unit(rng, (T.shape[0],)) @ T, F.alg.n) for _ in range(count)]


def escape_residual(F, p: Point, directions, thetas) -> np.ndarray:
    """Max membership residual along ``L_p o gamma_xi`` for each direction."""
    out = []
    for xi in directions:
        g = ProlongedGeodesic(F.alg, p, xi)
        V, Z, t = g.eta_arrays(thetas)
        out.append(float(np.max(F.residual(V, Z, t))))
    return np.array(out)


@dataclass
class GeodesicTest:
    flag: bool
    residual: float
    per_direction: np.ndarray
    j2_residual: float

    def consistent(self, tol: float = ESCAPE_TOL, threshold: float = ESCAPE_THRESHOLD) -> bool:
        """Flag-true needs every residual ``<= tol``; flag-false needs one ``>= threshold``."""
        if self.flag:
            return self.residual <= tol
        return self.residual >= threshold


def totally_geodesic_at(F, p=None, *, directions: int = 10, thetas: int = 10, rng=None,
                        j2_tol: float = SUBSPACE_TOL) -> GeodesicTest:
    """J^2 prediction and geodesic-escape residual of ``F`` at a point.

    For :class:`Fx0`, ``p`` is the ball parameter ``Vb`` of ``upsilon(Vb)``
    and the flag is the J^2-condition for ``Vb - V0``.  For :class:`FStar`,
    ``p`` is a member point (default: the one with ``w = 0``, ``Z = 0``,
    ``t = tb``) and the flag is the J^2-condition for ``v``.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    grid = np.linspace(-0.9, 0.9, thetas)
    if isinstance(F, Fx0):
        Vbar = F.x0.V if p is None else np.asarray(p, dtype=float)
        flag, j2r = j2_satisfied(F.alg, Vbar - F.x0.V, tol=j2_tol)
        point, dirs = _fx0_directions(F, Vbar, directions, rng)
    else:
        point = F.point(np.zeros(F.alg.n), np.zeros(F.alg.m), F.tbar) if p is None else p
        if membership_residual(F, point) > MEMBERSHIP_TOL * max(1.0, np.linalg.norm(point.V)):
            raise DomainError("base point is not on the focal variety")
        flag, j2r = j2_satisfied(F.alg, F.v, tol=j2_tol)
        dirs = _fstar_directions(F, directions, rng)
    per = escape_residual(F, point, dirs, grid)
    return GeodesicTest(bool(flag), float(per.max()), per, float(j2r))


def kahler_angles(alg: DamekRicciAlgebra, v, u, tol: float = 1e-10) -> np.ndarray:
    """Principal angles between ``J_z u`` and ``span{v, J_z v}``, ascending, in [0, pi/2]."""
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    if not np.any(v) or not np.any(u):
        raise SubspaceViolation("v and u must be nonzero")
    B = np.vstack([v[None], alg.j_all(v)]).T
    coef, *_ = np.linalg.lstsq(B, u, rcond=None)
    if np.linalg.norm(B @ coef - u) > tol * np.linalg.norm(u):
        raise SubspaceViolation("u is not in span{v, J_z v}")
    A = alg.j_all(u).T
    return np.sort(linalg.subspace_angles(A, B))


def kahler_angle_spread(alg: DamekRicciAlgebra, v, count: int = 50, rng=None) -> float:
    """Spread of all Kahler angles over ``u = v`` and ``count`` random ``u`` in ``span{v, J_z v}``."""
    rng = np.random.default_rng(0) if rng is None else rng
    v = np.asarray(v, dtype=float)
    B = np.vstack([v[None], alg.j_all(v)])
    angles = [kahler_angles(alg, v, v)]
    for _ in range(count):
        angles.append(kahler_angles(alg, v, random_unit(rng, (alg.m + 1,)) @ B))
    angles = np.concatenate(angles)
    return float(angles.max() - angles.min())


def fstar_tangent_rank(F: FStar, tol: float = 1e-10) -> int:
    """Numerical rank of the tangent space of ``F_star`` pulled back to e."""
    T = F.tangent_basis()
    return int(np.linalg.matrix_rank(T.T @ T, tol=tol))
