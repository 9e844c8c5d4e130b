"""Clifford-module input data and the 2-step nilpotent algebra n = v + z.

Generators ``J[alpha]`` are ``n x n`` real matrices acting on v = R^n.  They
are skew, orthogonal and satisfy ``J_a J_b + J_b J_a = -2 delta_ab I``.  The
bracket of two v-vectors is the z-vector with components ``<J_alpha U, V>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import DimensionMismatch, InvalidGenerators, NotApplicable, UnsupportedDimension

ALGEBRAIC_TOL = 1e-12
SUBSPACE_TOL = 1e-8

MODULE_TAGS = ("d", "d1", "d2")

# e_a e_b = e_c along each oriented line of the Fano plane
_OCTONION_LINES = ((1, 2, 4), (2, 3, 5), (3, 4, 6), (4, 5, 7), (5, 6, 1), (6, 7, 2), (7, 1, 3))
_QUATERNION_LINES = ((1, 2, 3),)


def irreducible_dim(m: int) -> int:
    """Dimension n0 of an irreducible module of Cl(z) with dim z = m."""
    if m < 0:
        raise UnsupportedDimension(f"center dimension must be non-negative, got {m}")
    p, r = divmod(m, 8)
    exponent = (0, 1, 2, 2, 3, 3, 3, 3)[r]
    return 2 ** (4 * p + exponent)


def _structure_tensor(dim, lines):
    """T[a, b, c] with e_a e_b = sum_c T[a, b, c] e_c for a unital division algebra."""
    T = np.zeros((dim, dim, dim))
    T[0, :, :] = np.eye(dim)
    T[:, 0, :] = np.eye(dim)
    for a in range(1, dim):
        T[a, a, 0] = -1.0
    for i, j, k in lines:
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            T[a, b, c] = 1.0
            T[b, a, c] = -1.0
    return T


def _division_algebra(m):
    if m == 1:
        return _structure_tensor(2, ())
    if m in (2, 3):
        return _structure_tensor(4, _QUATERNION_LINES)
    return _structure_tensor(8, _OCTONION_LINES)


def _table_generators(m, tag):
    """Left (tag d/d1) or right (tag d2) multiplication by the imaginary units e_1..e_m."""
    if m == 0:
        return np.zeros((0, 1, 1))
    T = _division_algebra(m)
    if tag == "d2":
        # column b of R_a holds e_b e_a
        return np.stack([T[:, a, :].T for a in range(1, m + 1)])
    return np.stack([T[a, :, :].T for a in range(1, m + 1)])


def _period_eight_generators():
    """Generators of the 16-dimensional irreducible module of Cl(R^8)."""
    L = _table_generators(7, "d1")
    eye = np.eye(8)
    zero = np.zeros((8, 8))
    K = [np.block([[zero, Li], [Li, zero]]) for Li in L]
    K.append(np.block([[zero, -eye], [eye, zero]]))
    return np.stack(K)


def irreducible_generators(m: int, tag: str = "d") -> np.ndarray:
    """Generators of an irreducible Cl(z)-module, shape ``(m, n0, n0)``.

    Small centers (m <= 7) use complex, quaternion and octonion multiplication
    tables.  Larger centers are built from the module for ``m - 8`` by tensoring
    with the 16-dimensional Cl(R^8) module twisted by its volume element.
    """
    if m < 0:
        raise UnsupportedDimension(f"center dimension must be non-negative, got {m}")
    if tag not in MODULE_TAGS:
        raise InvalidGenerators(f"unknown module tag {tag!r}")
    split = m % 4 == 3
    if split and tag == "d":
        tag = "d1"
    if not split and tag != "d":
        raise InvalidGenerators(f"tag {tag!r} only exists for m = 3 mod 4, got m={m}")
    if m <= 7:
        return _table_generators(m, tag)
    inner = irreducible_generators(m - 8, tag)
    K = _period_eight_generators()
    volume = np.linalg.multi_dot(list(K))
    N = inner.shape[1]
    outer = [np.kron(Ki, np.eye(N)) for Ki in K]
    outer += [np.kron(volume, Ja) for Ja in inner]
    return np.stack(outer)


@dataclass(frozen=True)
class CliffordSpec:
    """Description of the Clifford module v.

    Either ``modules`` (a list of ``(tag, multiplicity)`` pairs with tags among
    ``d``, ``d1``, ``d2``) or explicit ``generators`` of shape ``(m, n, n)``.
    """

    m: int
    modules: tuple = ()
    generators: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.m < 0:
            raise UnsupportedDimension(f"center dimension must be non-negative, got {self.m}")
        mods = tuple((str(tag), int(mult)) for tag, mult in self.modules)
        object.__setattr__(self, "modules", mods)
        if self.generators is not None:
            if mods:
                raise InvalidGenerators("give either modules or explicit generators, not both")
            J = np.asarray(self.generators, dtype=float)
            if J.ndim == 2 and J.size == 0:
                J = J.reshape(0, 0, 0)
            if J.ndim != 3 or J.shape[0] != self.m or J.shape[1] != J.shape[2]:
                raise InvalidGenerators(f"expected {self.m} square generator matrices, got shape {J.shape}")
            object.__setattr__(self, "generators", J)
            return
        split = self.m % 4 == 3
        for tag, mult in mods:
            if tag not in MODULE_TAGS:
                raise InvalidGenerators(f"unknown module tag {tag!r}")
            if mult < 0:
                raise InvalidGenerators("multiplicities must be non-negative")
            if split and tag == "d":
                raise InvalidGenerators(f"m={self.m} needs tags d1/d2")
            if not split and tag != "d":
                raise InvalidGenerators(f"tag {tag!r} only allowed when m = 3 mod 4")

    @property
    def explicit(self) -> bool:
        return self.generators is not None

    def blocks(self) -> list[tuple[str, slice]]:
        """Irreducible summands in order, as ``(tag, coordinate slice)``."""
        if self.explicit:
            raise NotApplicable("explicit-generator specs carry no module decomposition")
        n0 = irreducible_dim(self.m)
        out, start = [], 0
        for tag, mult in self.modules:
            for _ in range(mult):
                out.append((tag, slice(start, start + n0)))
                start += n0
        return out

    @property
    def n(self) -> int:
        if self.explicit:
            return self.generators.shape[1]
        return sum(mult for _, mult in self.modules) * irreducible_dim(self.m)

    @classmethod
    def from_tags(cls, m: int, *modules) -> "CliffordSpec":
        """``CliffordSpec.from_tags(3, ("d1", 1), ("d2", 1))``."""
        return cls(m=m, modules=tuple(modules))


class DamekRicciAlgebra:
    """The algebra s = v + z + a given by Clifford generators.

    Attributes
    ----------
    m, n : int
        Dimensions of the center z and of v.
    J : ndarray, shape (m, n, n)
        Generator matrices, ``J[a] @ V`` is ``J_{F_a} V``.
    C : ndarray, shape (n, n, m)
        Structure constants ``C[i, j, a] = <J_a E_i, E_j>``.
    spec : CliffordSpec or None
    """

    def __init__(self, J, spec: CliffordSpec | None = None):
        J = np.asarray(J, dtype=float)
        if J.ndim != 3 or J.shape[1] != J.shape[2]:
            raise InvalidGenerators(f"generators must have shape (m, n, n), got {J.shape}")
        J.setflags(write=False)
        self.J = J
        self.m, self.n = J.shape[0], J.shape[1]
        C = np.ascontiguousarray(np.transpose(J, (2, 1, 0)))
        C.setflags(write=False)
        self.C = C
        self.spec = spec

    def __repr__(self):
        return f"DamekRicciAlgebra(m={self.m}, n={self.n})"

    def _check_v(self, V):
        V = np.asarray(V, dtype=float)
        if V.shape[-1:] != (self.n,):
            raise DimensionMismatch(f"expected v-vector of length {self.n}, got shape {V.shape}")
        return V

    def _check_z(self, Z):
        Z = np.asarray(Z, dtype=float)
        if Z.shape[-1:] != (self.m,):
            raise DimensionMismatch(f"expected z-vector of length {self.m}, got shape {Z.shape}")
        return Z

    def j(self, Z, V):
        """``J_Z V``; broadcasts over leading axes."""
        Z, V = self._check_z(Z), self._check_v(V)
        return np.einsum("...a,aij,...j->...i", Z, self.J, V)

    def j_all(self, V):
        """Stack ``(J_1 V, ..., J_m V)`` along axis -2."""
        V = self._check_v(V)
        return np.einsum("aij,...j->...ai", self.J, V)

    def bracket(self, U, V):
        """``[U, V]`` in z, component a equal to ``<J_a U, V>``."""
        U, V = self._check_v(U), self._check_v(V)
        return np.einsum("...i,aij,...j->...a", V, self.J, U)

    def projection_onto_jz(self, V, W):
        """Orthogonal projection of W onto J_z V, computed by least squares."""
        basis = self.j_all(V).T
        if self.m == 0 or not np.any(basis):
            return np.zeros(self.n)
        Q, _ = np.linalg.qr(basis)
        return Q @ (Q.T @ W)


def j_apply(alg: DamekRicciAlgebra, Z, V) -> np.ndarray:
    return alg.j(Z, V)


def bracket_v(alg: DamekRicciAlgebra, U, V) -> np.ndarray:
    return alg.bracket(U, V)


def build_algebra(spec: CliffordSpec, validate: bool = True) -> DamekRicciAlgebra:
    """Realize the module described by ``spec`` as block-diagonal generators."""
    if spec.explicit:
        J = spec.generators
    else:
        blocks = [irreducible_generators(spec.m, tag) for tag, mult in spec.modules for _ in range(mult)]
        n = spec.n
        J = np.zeros((spec.m, n, n))
        start = 0
        for B in blocks:
            k = B.shape[1]
            J[:, start:start + k, start:start + k] = B
            start += k
    alg = DamekRicciAlgebra(J, spec)
    if validate:
        relations = clifford_relation_residuals(alg)
        worst = max(relations.values(), default=0.0)
        if worst > ALGEBRAIC_TOL:
            raise InvalidGenerators(f"Clifford relations violated: {relations}")
    return alg


def clifford_relation_residuals(alg: DamekRicciAlgebra) -> dict[str, float]:
    J, m, n = alg.J, alg.m, alg.n
    I = np.eye(n)
    anti = 0.0
    for a in range(m):
        for b in range(a, m):
            target = -2.0 * I if a == b else 0.0
            anti = max(anti, float(np.max(np.abs(J[a] @ J[b] + J[b] @ J[a] - target), initial=0.0)))
    skew = float(np.max(np.abs(J + np.transpose(J, (0, 2, 1))), initial=0.0))
    ortho = float(np.max(np.abs(np.einsum("aki,akj->aij", J, J) - I), initial=0.0)) if m else 0.0
    return {"anticommutation": anti, "skewness": skew, "orthogonality": ortho}


@dataclass
class ValidationReport:
    residuals: dict[str, float]
    tol: float = ALGEBRAIC_TOL
    samples: int = 0

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())

    def failures(self) -> list[str]:
        return [name for name, r in self.residuals.items() if r > self.tol]


def random_unit(rng, shape):
    x = rng.standard_normal(shape)
    if shape[-1] == 0:
        return x
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def validate_clifford(alg: DamekRicciAlgebra, samples: int = 1000, rng=None,
                      tol: float = ALGEBRAIC_TOL) -> ValidationReport:
    """Residuals of the algebraic identities of a Clifford module.

    Random inputs are unit vectors drawn from ``rng`` (seed 0 by default).
    """
    rng = np.random.default_rng(0) if rng is None else rng
    res = clifford_relation_residuals(alg)
    m, n, C = alg.m, alg.n, alg.C
    if m == 0 or n == 0:
        for name in ("structure_antisymmetry", "structure_square", "bracket_duality", "norm_product",
                     "twisted_bracket", "bracket_gram", "projection_identity", "bracket_trace"):
            res[name] = 0.0
        return ValidationReport(res, tol, samples)

    res["structure_antisymmetry"] = float(np.max(np.abs(C + np.transpose(C, (1, 0, 2)))))
    sq = np.einsum("ika,kja->ija", C, C) + np.eye(n)[:, :, None]
    res["structure_square"] = float(np.max(np.abs(sq)))

    U = random_unit(rng, (samples, n))
    V = random_unit(rng, (samples, n))
    W = random_unit(rng, (samples, n))
    Z = random_unit(rng, (samples, m))

    duality = np.einsum("sa,sa->s", alg.bracket(U, V), Z) - np.einsum("si,si->s", alg.j(Z, U), V)
    res["bracket_duality"] = float(np.max(np.abs(duality)))
    res["norm_product"] = float(np.max(np.abs(np.linalg.norm(alg.j(Z, V), axis=-1) - 1.0)))

    # [J_X U, V] - [U, J_X V] = -2 <U, V> X
    twisted = alg.bracket(alg.j(Z, U), V) - alg.bracket(U, alg.j(Z, V)) + 2.0 * np.sum(U * V, -1)[:, None] * Z
    res["twisted_bracket"] = float(np.max(np.abs(twisted)))

    gram = proj = 0.0
    for Vs, V1, V2 in zip(U, V, W):
        P1 = alg.projection_onto_jz(Vs, V1)
        P2 = alg.projection_onto_jz(Vs, V2)
        lhs = alg.bracket(Vs, V1) @ alg.bracket(Vs, V2)
        gram = max(gram, abs(lhs - (Vs @ Vs) * (P1 @ P2)))
        proj = max(proj, float(np.max(np.abs(alg.j(alg.bracket(Vs, V1), Vs) - (Vs @ Vs) * P1))))
    res["bracket_gram"] = float(gram)
    res["projection_identity"] = float(proj)

    # sum_i <[E_i, V], [E_i, W]> = m <V, W>
    E = np.eye(n)
    BV = alg.bracket(E[None, :, :], V[:, None, :])
    BW = alg.bracket(E[None, :, :], W[:, None, :])
    trace = np.einsum("sia,sia->s", BV, BW) - m * np.sum(V * W, -1)
    res["bracket_trace"] = float(np.max(np.abs(trace)))
    return ValidationReport(res, tol, samples)


def decomposition_ranks(alg: DamekRicciAlgebra, U, tol: float = SUBSPACE_TOL) -> dict[str, float]:
    """Check v = RU + (ker ad U cap U^perp) + J_z U for a nonzero U.

    Returns the three numerical ranks and the largest pairwise inner product
    between orthonormal bases of the summands.
    """
    U = alg._check_v(U)
    u = U / np.linalg.norm(U)
    ad = alg.bracket(np.eye(alg.n), U)  # row i is [E_i, U]
    A = np.vstack([ad.T, u[None, :]]) if alg.m else u[None, :]
    _, s, Vt = np.linalg.svd(A)
    rank_a = int(np.sum(s > tol * max(1.0, s[0])))
    kernel = Vt[rank_a:].T
    jz = alg.j_all(U).T if alg.m else np.zeros((alg.n, 0))
    if jz.shape[1]:
        qj, sj, _ = np.linalg.svd(jz, full_matrices=False)
        rank_j = int(np.sum(sj > tol * max(1.0, sj[0])))
        qj = qj[:, :rank_j]
    else:
        qj, rank_j = jz, 0
    pieces = [u[:, None], kernel, qj]
    overlap = 0.0
    for X, Y in combinations(pieces, 2):
        if X.size and Y.size:
            overlap = max(overlap, float(np.max(np.abs(X.T @ Y))))
    return {"line": 1, "kernel": kernel.shape[1], "jz": rank_j,
            "total": 1 + kernel.shape[1] + rank_j, "overlap": overlap}


def _orthonormal_z_pairs(m, rng, n_random):
    pairs = []
    E = np.eye(m)
    for a, b in combinations(range(m), 2):
        pairs.append((E[a], E[b]))
    for _ in range(n_random if m >= 2 else 0):
        z1 = random_unit(rng, (m,))
        z2 = rng.standard_normal(m)
        z2 -= (z2 @ z1) * z1
        pairs.append((z1, z2 / np.linalg.norm(z2)))
    return pairs


def j2_residual(alg: DamekRicciAlgebra, v, rng=None, n_random: int = 10) -> float:
    """Largest part of ``J_{z1} J_{z2} v`` outside ``Rv + J_z v`` over orthonormal pairs."""
    v = alg._check_v(v)
    vv = float(v @ v)
    if vv == 0.0 or alg.m < 2:
        return 0.0
    rng = np.random.default_rng(0) if rng is None else rng
    # v, J_1 v, ..., J_m v are orthogonal of length |v|
    span = np.vstack([v[None, :], alg.j_all(v)])
    worst = 0.0
    for z1, z2 in _orthonormal_z_pairs(alg.m, rng, n_random):
        w = alg.j(z1, alg.j(z2, v))
        w_perp = w - span.T @ (span @ w) / vv
        worst = max(worst, float(np.linalg.norm(w_perp)))
    return worst


def j2_satisfied(alg: DamekRicciAlgebra, v, tol: float = SUBSPACE_TOL, rng=None) -> tuple[bool, float]:
    """Whether v satisfies the J^2-condition.

    The residual is homogeneous of degree one in v, so it is compared
    against ``tol * |v|``.
    """
    residual = j2_residual(alg, v, rng)
    norm = float(np.linalg.norm(v))
    return residual <= tol * norm, residual


def j2_submodule_residual(alg: DamekRicciAlgebra, v, tol: float = SUBSPACE_TOL) -> float:
    """Cross-check: how far ``J_z (ker ad v cap v^perp)`` leaves ``ker ad v``."""
    v = alg._check_v(v)
    norm = np.linalg.norm(v)
    if norm == 0.0 or alg.m == 0:
        return 0.0
    span = np.vstack([v[None, :], alg.j_all(v)]) / norm
    _, s, Vt = np.linalg.svd(span)
    rank = int(np.sum(s > tol))
    W = Vt[rank:]  # rows span ker ad v cap v^perp
    if W.size == 0:
        return 0.0
    JW = np.einsum("aij,kj->aki", alg.J, W)
    # component of J_a w along J_b v (b = 1..m); the part along v vanishes identically
    return float(np.max(np.abs(JW @ span[1:].T)))


def predict_j2_set(spec: CliffordSpec, v, tol: float = SUBSPACE_TOL) -> bool:
    """Classification of J^2-vectors by module type.

    m in {0, 1}: every vector.  m = 3: isotypic vectors.  m = 7: isotypic
    vectors whose components in the copies of the irreducible module are real
    multiples of one common vector.  Other m: only v = 0.
    """
    if spec.explicit:
        raise NotApplicable("prediction needs a spec built from module tags")
    v = np.asarray(v, dtype=float)
    if v.shape != (spec.n,):
        raise DimensionMismatch(f"expected vector of length {spec.n}, got shape {v.shape}")
    norm = float(np.linalg.norm(v))
    if norm == 0.0 or spec.m in (0, 1):
        return True
    if spec.m not in (3, 7):
        return False
    cut = tol * norm
    live = [(tag, v[sl]) for tag, sl in spec.blocks() if np.linalg.norm(v[sl]) > cut]
    if len({tag for tag, _ in live}) > 1:
        return False
    if spec.m == 3 or len(live) < 2:
        return True
    s = np.linalg.svd(np.vstack([x for _, x in live]), compute_uv=False)
    return bool(s[1] <= cut)


def j2_sample_grid(spec: CliffordSpec, count: int, rng=None) -> np.ndarray:
    """Deterministic mix of generic, isotypic, proportional and mixed v-vectors.

    Rows cycle through the structured categories so that both outcomes of the
    J^2 classification are well represented.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    blocks = spec.blocks()
    n = spec.n
    by_tag: dict[str, list[slice]] = {}
    for tag, sl in blocks:
        by_tag.setdefault(tag, []).append(sl)
    n0 = irreducible_dim(spec.m)

    def generic():
        return rng.standard_normal(n)

    def single_block():
        v = np.zeros(n)
        _, sl = blocks[rng.integers(len(blocks))]
        v[sl] = rng.standard_normal(n0)
        return v

    def isotypic(tag):
        v = np.zeros(n)
        for sl in by_tag[tag]:
            v[sl] = rng.standard_normal(n0)
        return v

    def proportional(tags):
        v = np.zeros(n)
        w = rng.standard_normal(n0)
        for tag in tags:
            for sl in by_tag[tag]:
                v[sl] = rng.uniform(-2.0, 2.0) * w
        return v

    makers = [generic, single_block]
    for tag in by_tag:
        makers.append(lambda tag=tag: isotypic(tag))
        makers.append(lambda tag=tag: proportional([tag]))
    if len(by_tag) > 1:
        makers.append(lambda: proportional(list(by_tag)))
    rows = [np.zeros(n)]
    while len(rows) < count:
        rows.append(makers[(len(rows) - 1) % len(makers)]())
    return np.array(rows[:count])
