"""Half-space model v + z x R_+ of a Damek-Ricci space.

Points are triples ``(V, Z, t)``.  The group law is

    (V1, Z1, t1) (V2, Z2, t2) = (V1 + sqrt(t1) V2, Z1 + t1 Z2 + sqrt(t1)/2 [V1, V2], t1 t2)

and left translations extend to affine maps of the whole space v + z + R.
Scalar fields are handled through :class:`ScalarField`, which bundles a
vectorized evaluation callback with optional analytic first partials;
everything else is obtained by central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .clifford_algebra import DamekRicciAlgebra
from .errors import DomainError

ARCCOSH_SLACK = 1e-12
GRADIENT_STEP = 1e-5
LAPLACIAN_STEP = 1e-2
LAPLACIAN_T_STEP = 1e-3


@dataclass(frozen=True, eq=False)
class AffinePoint:
    """A point of the ambient affine space v + z + R (any sign of t)."""

    V: np.ndarray
    Z: np.ndarray
    t: float

    def __post_init__(self):
        object.__setattr__(self, "V", np.asarray(self.V, dtype=float))
        object.__setattr__(self, "Z", np.asarray(self.Z, dtype=float))
        object.__setattr__(self, "t", float(self.t))
        if not (np.all(np.isfinite(self.V)) and np.all(np.isfinite(self.Z)) and np.isfinite(self.t)):
            raise DomainError("point coordinates must be finite")

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.V, self.Z, [self.t]])

    @classmethod
    def from_array(cls, y, n: int):
        y = np.asarray(y, dtype=float)
        return cls(y[:n], y[n:-1], y[-1])

    def distance_to(self, other: "AffinePoint") -> float:
        """Euclidean distance in coordinates (not the Riemannian one)."""
        return float(np.linalg.norm(self.as_array() - other.as_array()))

    def __repr__(self):
        return f"{type(self).__name__}(V={self.V}, Z={self.Z}, t={self.t:g})"


@dataclass(frozen=True, eq=False, repr=False)
class Point(AffinePoint):
    """A point of the half-space model, ``t > 0``."""

    def __post_init__(self):
        super().__post_init__()
        if not self.t > 0:
            raise DomainError(f"half-space points need t > 0, got t={self.t}")


@dataclass(frozen=True, eq=False)
class TangentVec:
    """Element ``(v, z, s)`` of s = v + z + a, i.e. a tangent vector at e."""

    v: np.ndarray
    z: np.ndarray
    s: float

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        object.__setattr__(self, "z", np.asarray(self.z, dtype=float))
        object.__setattr__(self, "s", float(self.s))

    def norm(self) -> float:
        return float(np.sqrt(self.v @ self.v + self.z @ self.z + self.s ** 2))

    def unit(self) -> "TangentVec":
        r = self.norm()
        return TangentVec(self.v / r, self.z / r, self.s / r)

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.v, self.z, [self.s]])

    @classmethod
    def from_array(cls, y, n: int):
        y = np.asarray(y, dtype=float)
        return cls(y[:n], y[n:-1], y[-1])


def identity(alg: DamekRicciAlgebra) -> Point:
    return Point(np.zeros(alg.n), np.zeros(alg.m), 1.0)


def multiply(alg: DamekRicciAlgebra, p: Point, q: Point) -> Point:
    rt = np.sqrt(p.t)
    return Point(p.V + rt * q.V, p.Z + p.t * q.Z + 0.5 * rt * alg.bracket(p.V, q.V), p.t * q.t)


def inverse(alg: DamekRicciAlgebra, p: Point) -> Point:
    return Point(-p.V / np.sqrt(p.t), -p.Z / p.t, 1.0 / p.t)


def left_translate(alg: DamekRicciAlgebra, p: Point, x: AffinePoint) -> AffinePoint:
    """Affine extension of the left translation by ``p``.

    Returns a :class:`Point` when the image lies in the half-space.
    """
    rt = np.sqrt(p.t)
    V = rt * x.V + p.V
    Z = p.t * x.Z + 0.5 * rt * alg.bracket(p.V, x.V) + p.Z
    t = p.t * x.t
    return Point(V, Z, t) if t > 0 else AffinePoint(V, Z, t)


def translate_arrays(alg, p: Point, V, Z, t):
    """Vectorized :func:`left_translate` on coordinate arrays."""
    rt = np.sqrt(p.t)
    return rt * V + p.V, p.t * Z + 0.5 * rt * alg.bracket(p.V, V) + p.Z, p.t * t


def distance(alg: DamekRicciAlgebra, x1: Point, x0: Point) -> float:
    """Riemannian distance between two points of the half-space model.

    Uses ``4 sinh^2(d/2)`` written as a sum of non-negative terms; this is the
    same quantity as ``D_{x0}(x1)/t0 - 4`` without the cancellation at
    nearby points.
    """
    if not (x1.t > 0 and x0.t > 0):
        raise DomainError("distance is defined for points of the half-space only")
    t1, t0 = x1.t, x0.t
    dV = x1.V - x0.V
    q = x1.Z - x0.Z + 0.5 * alg.bracket(x1.V, x0.V)
    dv2 = dV @ dV
    s = ((t1 - t0) ** 2 + 0.5 * (t1 + t0) * dv2 + q @ q + dv2 ** 2 / 16.0) / (t1 * t0)
    if s < -ARCCOSH_SLACK:
        raise DomainError(f"negative squared half-distance {s}")
    return 2.0 * float(np.arcsinh(0.5 * np.sqrt(max(s, 0.0))))


def distance_via_D(alg: DamekRicciAlgebra, x1: Point, x0: Point) -> float:
    """``2 arccosh(sqrt(D_{x0}(x1)/t0)/2)``, clamped within the rounding slack."""
    q = x1.Z - x0.Z + 0.5 * alg.bracket(x1.V, x0.V)
    dV = x1.V - x0.V
    D = ((x1.t + x0.t + 0.25 * dV @ dV) ** 2 + q @ q) / x1.t
    arg = np.sqrt(D / x0.t) / 2.0
    if arg < 1.0 - ARCCOSH_SLACK:
        raise DomainError(f"arccosh argument {arg} below 1")
    return 2.0 * float(np.arccosh(max(arg, 1.0)))


@dataclass
class ScalarField:
    """A smooth function on the half-space model.

    ``value(V, Z, t)`` must broadcast over leading axes of ``V`` and ``Z``.
    ``partials(V, Z, t)``, when given, returns ``(dV, dZ, dt)`` for a single
    point.
    """

    value: Callable
    partials: Optional[Callable] = None
    name: str = "f"

    def __call__(self, x: AffinePoint) -> float:
        return float(self.value(x.V, x.Z, x.t))


def _pack_eval(f, Y, n, m):
    return np.asarray(f.value(Y[..., :n], Y[..., n:n + m], Y[..., -1]), dtype=float)


def _steps(y, n, m, step, t_step=None):
    h = step * np.maximum(1.0, np.abs(y))
    # relative step in t keeps the stencil well inside t > 0
    h[-1] = (step if t_step is None else t_step) * abs(y[-1])
    return h


_FIRST = {2: (np.array([-1, 1]), np.array([-0.5, 0.5])),
          4: (np.array([-2, -1, 1, 2]), np.array([1, -8, 8, -1]) / 12.0)}
_SECOND = {2: (np.array([-1, 0, 1]), np.array([1.0, -2.0, 1.0])),
           4: (np.array([-2, -1, 0, 1, 2]), np.array([-1, 16, -30, 16, -1]) / 12.0)}


def fd_partials(f: ScalarField, x: AffinePoint, order: int = 2, step: float = GRADIENT_STEP):
    """Central-difference first partials ``(dV, dZ, dt)``."""
    n, m = x.V.size, x.Z.size
    y = x.as_array()
    N = y.size
    h = _steps(y, n, m, step)
    offs, w = _FIRST[order]
    Y = y + (offs[:, None, None] * np.eye(N)[None, :, :] * h[None, :, None])
    vals = _pack_eval(f, Y, n, m)  # (len(offs), N)
    g = (w @ vals) / h
    return g[:n], g[n:n + m], float(g[-1])


def partials(f: ScalarField, x: AffinePoint, order: int = 2):
    if f.partials is not None:
        dV, dZ, dt = f.partials(x.V, x.Z, x.t)
        return np.asarray(dV, float), np.asarray(dZ, float), float(dt)
    return fd_partials(f, x, order)


def frame_derivatives(alg: DamekRicciAlgebra, f: ScalarField, x: Point, order: int = 2):
    """Derivatives of ``f`` along the left-invariant frame ``(E_i, F_a, A)``."""
    dV, dZ, dt = partials(f, x, order)
    rt = np.sqrt(x.t)
    E = rt * dV - 0.5 * rt * np.einsum("ija,j,a->i", alg.C, x.V, dZ)
    F = x.t * dZ
    A = x.t * dt
    return E, F, A


def frame_grad_sq(alg: DamekRicciAlgebra, f: ScalarField, x: Point, order: int = 2) -> float:
    """``|grad f|^2`` as the sum of squared left-invariant frame derivatives."""
    E, F, A = frame_derivatives(alg, f, x, order)
    return float(E @ E + F @ F + A * A)


def laplacian(alg: DamekRicciAlgebra, f: ScalarField, x: Point, order: int = 4,
              step: float = LAPLACIAN_STEP, t_step: float = LAPLACIAN_T_STEP) -> float:
    """Laplace-Beltrami operator by central finite differences.

    Evaluates ``t sum d2/dv_i^2 + t (t + |V|^2/4) sum d2/dz_a^2 + t^2 d2/dt^2
    - (m + n/2 - 1) t d/dt + t sum C_ija v_i d/dv_j d/dz_a`` with all partials
    taken by stencils of the given order, batched into one call of ``f.value``.
    The t-direction gets its own relative step: ``f`` is typically rational in
    ``t`` but polynomial in ``V`` and ``Z``, where a coarser step only cuts
    round-off.
    """
    n, m = alg.n, alg.m
    y = x.as_array()
    N = y.size
    h = _steps(y, n, m, step, t_step)
    eye = np.eye(N)

    offs2, w2 = _SECOND[order]
    offs1, w1 = _FIRST[order]
    batches = [y + offs2[:, None, None] * eye[None] * h[None, :, None],   # (k2, N, N)
               (y + offs1[:, None] * eye[-1] * h[-1])[:, None, :]]       # (k1, 1, N)

    # the mixed term is sum_a d/dz_a along the v-direction w_a, w_a[j] = sum_i C_ija v_i
    W = np.einsum("ija,i->aj", alg.C, x.V)
    wnorm = np.linalg.norm(W, axis=1)
    hv = step * max(1.0, float(np.max(np.abs(x.V), initial=0.0)))
    mixed_pts = None
    if m:
        dirs_v = np.zeros((m, N))
        live = wnorm > 0
        dirs_v[live, :n] = W[live] / wnorm[live, None]
        dirs_z = eye[n:n + m]
        hz = h[n:n + m]
        P, Q = np.meshgrid(offs1, offs1, indexing="ij")
        mixed_pts = (y + P[..., None, None] * hv * dirs_v[None, None]
                     + Q[..., None, None] * hz[None, None, :, None] * dirs_z[None, None])  # (k1, k1, m, N)

    vals2 = _pack_eval(f, batches[0], n, m)
    d2 = np.einsum("k,kj->j", w2, vals2) / h ** 2
    vals1 = _pack_eval(f, batches[1], n, m)[:, 0]
    dt = float(w1 @ vals1) / h[-1]

    mixed = 0.0
    if m:
        vm = _pack_eval(f, mixed_pts, n, m)
        dd = np.einsum("p,q,pqa->a", w1, w1, vm) / (hv * hz)
        mixed = float(np.sum(dd * wnorm))

    t = x.t
    VV = float(x.V @ x.V)
    return float(t * np.sum(d2[:n]) + t * (t + 0.25 * VV) * np.sum(d2[n:n + m]) + t * t * d2[-1]
                 - (m + n / 2.0 - 1.0) * t * dt + t * mixed)


def sample_points(alg: DamekRicciAlgebra, count: int, rng=None, t_range=(0.05, 20.0),
                  scale: float = 0.5) -> list[Point]:
    """Log-uniform ``t`` in ``t_range`` and Gaussian ``V``, ``Z`` with deviation ``scale``.

    The default ``scale`` keeps quartic quantities such as ``D^2`` below about
    1e5 so absolute residuals near 1e-9 stay above double round-off.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    lo, hi = np.log(t_range[0]), np.log(t_range[1])
    out = []
    for _ in range(count):
        V = scale * rng.standard_normal(alg.n)
        Z = scale * rng.standard_normal(alg.m)
        out.append(Point(V, Z, float(np.exp(rng.uniform(lo, hi)))))
    return out


def random_point(alg: DamekRicciAlgebra, rng, t_range=(0.2, 5.0), scale: float = 1.0) -> Point:
    return sample_points(alg, 1, rng, t_range, scale)[0]
