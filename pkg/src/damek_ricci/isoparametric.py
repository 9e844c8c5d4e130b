"""Isoparametric functions on the half-space model and their invariants.

Three families are provided: the distorted distance ``D_{x0}`` (any center
``x0`` of the affine space, including ``t0 <= 0``), its rescaled limit
``D_star`` along a parabola-shaped prolonged geodesic, and the coordinate
functions ``F_I = |P_I V|^2 / t``.  Each satisfies ``lap f = a(f)`` and
``|grad f|^2 = b(f)`` for explicit affine ``a`` and quadratic ``b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .clifford_algebra import DamekRicciAlgebra
from .errors import DomainError, NoMinimum
from .geodesic import ProlongedGeodesic, TangentVec
from .model import (AffinePoint, Point, ScalarField, frame_grad_sq, inverse, laplacian,
                    left_translate, multiply)


class IsoFn:
    """Common interface: vectorized value, analytic partials and the pair (a, b)."""

    alg: DamekRicciAlgebra

    def value(self, V, Z, t):
        raise NotImplementedError

    def partials(self, V, Z, t):
        raise NotImplementedError

    def a(self, x):
        raise NotImplementedError

    def b(self, x):
        raise NotImplementedError

    def b_prime(self, x):
        raise NotImplementedError

    def minimum(self) -> float:
        """Minimal value ``c0`` (attained on the focal variety)."""
        raise NoMinimum(f"{type(self).__name__} has no minimal value")

    def focal_minimum(self) -> float:
        """Minimal value when ``{f = c0}`` is a focal variety with tubes around it."""
        return self.minimum()

    def radius(self, c: float) -> float:
        """Closed-form tube radius of the level set ``{f = c}`` about ``{f = c0}``."""
        raise NoMinimum(f"{type(self).__name__} has no minimal value")

    def field(self) -> ScalarField:
        return ScalarField(self.value, self.partials, name=type(self).__name__)

    def __call__(self, x: AffinePoint) -> float:
        return float(self.value(x.V, x.Z, x.t))


@dataclass(frozen=True, eq=False)
class DistortedDistance(IsoFn):
    """``D_{x0}(V, Z, t) = ((t + t0 + |V - V0|^2/4)^2 + |Z - Z0 + [V, V0]/2|^2) / t``."""

    alg: DamekRicciAlgebra
    x0: AffinePoint

    def _pq(self, V, Z, t):
        dV = V - self.x0.V
        P = t + self.x0.t + 0.25 * np.sum(dV * dV, axis=-1)
        Q = Z - self.x0.Z + 0.5 * self.alg.bracket(V, self.x0.V)
        return dV, P, Q

    def value(self, V, Z, t):
        _, P, Q = self._pq(V, Z, t)
        return (P ** 2 + np.sum(Q * Q, axis=-1)) / t

    def partials(self, V, Z, t):
        dV, P, Q = self._pq(V, Z, t)
        D = (P ** 2 + Q @ Q) / t
        dv = (P * dV - self.alg.j(Q, self.x0.V)) / t
        return dv, 2.0 * Q / t, 2.0 * P / t - D / t

    @property
    def _k(self):
        return self.alg.m + self.alg.n / 2.0 + 1.0

    def a(self, x):
        return self._k * x - 2.0 * (self.alg.m + 1) * self.x0.t

    def b(self, x):
        return x * (x - 4.0 * self.x0.t)

    def b_prime(self, x):
        return 2.0 * x - 4.0 * self.x0.t

    def minimum(self) -> float:
        t0 = self.x0.t
        if t0 == 0.0:
            raise NoMinimum("t0 = 0: the level sets are horospheres")
        return 4.0 * t0 if t0 > 0 else 0.0

    def focal_minimum(self) -> float:
        if self.x0.t >= 0:
            raise NoMinimum("t0 >= 0: the level sets are spheres or horospheres, not tubes")
        return 0.0

    def radius(self, c: float) -> float:
        t0 = self.x0.t
        self.focal_minimum()
        if c < 0:
            raise DomainError(f"level {c} below the minimum 0")
        return 2.0 * math.asinh(math.sqrt(c / (-4.0 * t0)))

    def sphere_radius(self, c: float) -> float:
        """Radius of the geodesic sphere ``{D = c}`` about ``x0`` when ``t0 > 0``."""
        t0 = self.x0.t
        if t0 <= 0:
            raise NoMinimum("spheres need a center with t0 > 0")
        if c < 4.0 * t0:
            raise DomainError(f"level {c} below the minimum {4.0 * t0}")
        return 2.0 * math.acosh(math.sqrt(c / (4.0 * t0)))

    def translated(self, p: Point) -> "DistortedDistance":
        """Center ``L_{p^-1}(x0)``, so that ``D_{x0} o L_p = t_p * D_{translated}``."""
        return DistortedDistance(self.alg, left_translate(self.alg, inverse(self.alg, p), self.x0))


@dataclass(frozen=True, eq=False)
class DStar(IsoFn):
    """Limit of rescaled ``D_{eta(theta)}`` as ``eta(theta)`` runs off to STAR.

    ``D_star(V, Z, t) = ((2 s sqrt(tb) - <V - Vb, v>)^2 + |[V - Vb, v]|^2) / t``
    with ``(Vb, Zb, tb)`` the base point of the parabola-shaped geodesic and
    ``s^2 + |v|^2 = 1``.
    """

    alg: DamekRicciAlgebra
    base: Point
    v: np.ndarray
    s: float
    unit_tol: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        object.__setattr__(self, "s", float(self.s))
        if abs(self.s ** 2 + self.v @ self.v - 1.0) > self.unit_tol:
            raise DomainError("DStar needs s^2 + |v|^2 = 1")

    @classmethod
    def from_geodesic(cls, g: ProlongedGeodesic) -> "DStar":
        if np.linalg.norm(g.xi.z) > 1e-12:
            raise DomainError("the limit function needs a geodesic with z = 0")
        return cls(g.alg, g.base, g.xi.v, g.xi.s)

    @property
    def vv(self) -> float:
        return float(self.v @ self.v)

    def _pq(self, V, Z, t):
        dV = V - self.base.V
        P = 2.0 * self.s * math.sqrt(self.base.t) - dV @ self.v
        Q = self.alg.bracket(dV, self.v)
        return P, Q

    def value(self, V, Z, t):
        P, Q = self._pq(V, Z, t)
        return (P ** 2 + np.sum(Q * Q, axis=-1)) / t

    def partials(self, V, Z, t):
        P, Q = self._pq(V, Z, t)
        D = (P ** 2 + Q @ Q) / t
        dv = (-2.0 * P * self.v - 2.0 * self.alg.j(Q, self.v)) / t
        return dv, np.zeros(self.alg.m), -D / t

    def a(self, x):
        return (self.alg.m + self.alg.n / 2.0 + 1.0) * x + 2.0 * (self.alg.m + 1) * self.vv

    def b(self, x):
        return x * (x + 4.0 * self.vv)

    def b_prime(self, x):
        return 2.0 * x + 4.0 * self.vv

    def minimum(self) -> float:
        if self.vv == 0.0:
            raise NoMinimum("v = 0: the level sets are horospheres")
        return 0.0

    def radius(self, c: float) -> float:
        self.minimum()
        if c < 0:
            raise DomainError(f"level {c} below the minimum 0")
        return 2.0 * math.asinh(math.sqrt(c / (4.0 * self.vv)))

    def geodesic(self) -> ProlongedGeodesic:
        return ProlongedGeodesic(self.alg, self.base, TangentVec(self.v, np.zeros(self.alg.m), self.s))

    def limit_value(self, x: AffinePoint) -> float:
        """``tb * D_star(x)``, the limit of ``(1/theta - s)^2 D_{eta(theta)}(x)`` itself."""
        return self.base.t * self(x)

    def translated(self, p: Point) -> "DStar":
        """Data of ``L_{p^-1} o eta``.

        ``D_star o L_p`` equals ``D_star`` of the translated data, while the
        limit normalization picks up the factor ``t_p``:
        ``limit_value(L_p x) = t_p * translated(p).limit_value(x)``.
        """
        return DStar(self.alg, multiply(self.alg, inverse(self.alg, p), self.base), self.v, self.s)


@dataclass(frozen=True, eq=False)
class SubsetF(IsoFn):
    """``F(V, Z, t) = sum_{i in I} <V, E_i>^2 / t`` for an orthonormal basis ``E``."""

    alg: DamekRicciAlgebra
    I: tuple
    basis: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "I", tuple(sorted(set(int(i) for i in self.I))))
        E = np.eye(self.alg.n) if self.basis is None else np.asarray(self.basis, dtype=float)
        object.__setattr__(self, "basis", E)
        if any(i < 0 or i >= self.alg.n for i in self.I):
            raise DomainError(f"indices must lie in 0..{self.alg.n - 1}")

    @property
    def _rows(self):
        return self.basis[list(self.I)]

    def value(self, V, Z, t):
        if not self.I:
            return np.zeros(np.shape(t))
        c = V @ self._rows.T
        return np.sum(c * c, axis=-1) / t

    def partials(self, V, Z, t):
        F = self.value(V, Z, t)
        rows = self._rows
        dv = 2.0 * rows.T @ (rows @ V) / t if self.I else np.zeros(self.alg.n)
        return dv, np.zeros(self.alg.m), -F / t

    def a(self, x):
        return (self.alg.m + self.alg.n / 2.0 + 1.0) * x + 2.0 * len(self.I)

    def b(self, x):
        return x * (x + 4.0)

    def b_prime(self, x):
        return 2.0 * x + 4.0

    def minimum(self) -> float:
        if not self.I:
            raise NoMinimum("F vanishes identically")
        return 0.0

    def radius(self, c: float) -> float:
        self.minimum()
        if c < 0:
            raise DomainError(f"level {c} below the minimum 0")
        return 2.0 * math.asinh(math.sqrt(c / 4.0))


@dataclass(frozen=True, eq=False)
class ConstantFn(IsoFn):
    alg: DamekRicciAlgebra
    c: float = 1.0

    def value(self, V, Z, t):
        return np.full(np.shape(t), self.c)

    def partials(self, V, Z, t):
        return np.zeros(self.alg.n), np.zeros(self.alg.m), 0.0

    def a(self, x):
        return 0.0 * x

    def b(self, x):
        return 0.0 * x

    def b_prime(self, x):
        return 0.0 * x


def eval_D(alg: DamekRicciAlgebra, x0: AffinePoint, x: Point) -> float:
    return DistortedDistance(alg, x0)(x)


def eval_Dstar(fn: DStar, x: Point) -> float:
    return fn(x)


def eval_subsetF(alg: DamekRicciAlgebra, I, x: Point) -> float:
    return SubsetF(alg, tuple(I))(x)


def dstar_limit_residual(fn: DStar, theta: float, x: Point) -> float:
    """``|(1/theta - s)^2 D_{eta(theta)}(x) - tb D_star(x)|``."""
    center = fn.geodesic().eta(theta)
    scaled = (1.0 / theta - fn.s) ** 2 * DistortedDistance(fn.alg, center)(x)
    return abs(scaled - fn.base.t * fn(x))


@dataclass
class IsoReport:
    function: str
    samples: int
    grad_residuals: np.ndarray
    lap_residuals: np.ndarray
    tol_exact: float
    tol_fd: float

    @property
    def grad_max(self) -> float:
        return float(np.max(self.grad_residuals, initial=0.0))

    @property
    def grad_mean(self) -> float:
        return float(np.mean(self.grad_residuals)) if self.samples else 0.0

    @property
    def lap_max(self) -> float:
        return float(np.max(self.lap_residuals, initial=0.0))

    @property
    def lap_mean(self) -> float:
        return float(np.mean(self.lap_residuals)) if self.samples else 0.0

    @property
    def passed(self) -> bool:
        return self.grad_max <= self.tol_exact and self.lap_max <= self.tol_fd

    def records(self, seed=None) -> list[dict]:
        return [
            {"name": f"{self.function}:gradient", "function": self.function, "identity": "grad_sq = b(f)",
             "max_residual": self.grad_max, "mean_residual": self.grad_mean, "samples": self.samples,
             "seed": seed, "pass": self.grad_max <= self.tol_exact},
            {"name": f"{self.function}:laplacian", "function": self.function, "identity": "laplacian = a(f)",
             "max_residual": self.lap_max, "mean_residual": self.lap_mean, "samples": self.samples,
             "seed": seed, "pass": self.lap_max <= self.tol_fd},
        ]


def verify_isoparametric(fn: IsoFn, sample, tol_fd: float = 1e-5, tol_exact: float = 1e-9,
                         order: int = 4) -> IsoReport:
    """Residuals of ``lap f - a(f)`` (finite differences) and ``|grad f|^2 - b(f)``.

    The gradient uses the analytic partials of ``fn``; the Laplacian is the
    coordinate operator applied to finite-difference second partials.
    """
    f = fn.field()
    grad, lap = [], []
    for x in sample:
        val = fn(x)
        grad.append(abs(frame_grad_sq(fn.alg, f, x) - fn.b(val)))
        lap.append(abs(laplacian(fn.alg, f, x, order=order) - fn.a(val)))
    return IsoReport(type(fn).__name__, len(grad), np.array(grad), np.array(lap), tol_exact, tol_fd)


def tube_radius(fn: IsoFn, c: float) -> float:
    """Radius of the tube ``{fn = c}`` about the focal variety ``{fn = c0}``."""
    return fn.radius(c)


def tube_radius_quadrature(fn: IsoFn, c: float) -> float:
    """``int_{c0}^{c} dx / sqrt(b(x))`` by adaptive quadrature.

    With ``x = c0 + u^2`` and ``b`` monic with ``b(c0) = 0`` one has
    ``b(c0 + u^2) = u^2 (b'(c0) + u^2)``, so the integrand becomes the smooth
    ``2 / sqrt(b'(c0) + u^2)`` and the endpoint singularity disappears.
    """
    c0 = fn.focal_minimum()
    if c < c0:
        raise DomainError(f"level {c} below the minimum {c0}")
    if c == c0:
        return 0.0
    slope = fn.b_prime(c0)
    if abs(fn.b(c0)) > 1e-12 * max(1.0, abs(c0)) ** 2 or slope <= 0:
        raise DomainError("b must vanish simply at the minimum")

    def integrand(u):
        return 2.0 / math.sqrt(slope + u * u)

    val, _ = integrate.quad(integrand, 0.0, math.sqrt(c - c0), epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


MEAN_CURVATURE_KINDS = ("Sphere", "Horosphere", "Tube")


def mean_curvature(kind: str, r: float, m: int, n: int) -> float:
    """Trace of the shape operator of spheres, horospheres and tubes about focal varieties."""
    if kind == "Horosphere":
        return -(m + n / 2.0)
    if r <= 0:
        raise DomainError("radius must be positive")
    th, cth = math.tanh(r / 2.0), 1.0 / math.tanh(r / 2.0)
    if kind == "Sphere":
        return -(m + n) / 2.0 * cth - m / 2.0 * th
    if kind == "Tube":
        return -(m + n) / 2.0 * th - m / 2.0 * cth
    raise ValueError(f"unknown kind {kind!r}; expected one of {MEAN_CURVATURE_KINDS}")


def level_offset(fn: IsoFn, r: float) -> float:
    """``c - c0`` for the level at tube radius ``r``: ``b'(c0) sinh^2(r/2)``."""
    return fn.b_prime(fn.minimum()) * math.sinh(r / 2.0) ** 2


def mean_curvature_from_ab(fn: IsoFn, c: float | None = None, *, offset: float | None = None) -> float:
    """``(-2 a(c) + b'(c)) / (2 sqrt(b(c)))`` on the regular level ``c``.

    Passing ``offset = c - c0`` instead of ``c`` evaluates ``b`` as
    ``offset (offset + b'(c0))``, which keeps full precision on thin tubes
    where ``c`` sits close to the minimum.
    """
    if offset is not None:
        c0 = fn.minimum()
        c = c0 + offset
        bc = offset * (offset + fn.b_prime(c0))
        bp = fn.b_prime(c0) + 2.0 * offset
    elif c is None:
        raise ValueError("give either the level c or its offset from the minimum")
    else:
        bc, bp = fn.b(c), fn.b_prime(c)
    if not bc > 0:
        raise DomainError(f"level {c} is not regular (b = {bc})")
    return (-2.0 * fn.a(c) + bp) / (2.0 * math.sqrt(bc))


def volume_density(r, m: int, n: int):
    """``cosh^m(r/2) (sinh(r/2)/(r/2))^(m+n)``; accepts complex ``r``."""
    half = np.asarray(r) / 2.0
    if np.all(half == 0):
        return np.ones_like(half, dtype=float)
    return np.cosh(half) ** m * (np.sinh(half) / half) ** (m + n)


def _log_sphere_volume(r, m, n):
    # log(r^(m+n) omega(r)) kept in log form so large radii do not overflow
    half = r / 2.0
    return m * np.log(np.cosh(half)) + (m + n) * (np.log(np.sinh(half)) + math.log(2.0))


def sphere_h_from_density(r: float, m: int, n: int, step: float = 1e-30) -> float:
    """``-d/dr log(r^(m+n) omega(r))`` by complex-step differentiation."""
    if r <= 0:
        raise DomainError("radius must be positive")
    return -float(np.imag(_log_sphere_volume(complex(r, step), m, n)) / step)
