import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from damek_ricci.clifford_algebra import (CliffordSpec, DamekRicciAlgebra, build_algebra,
                                          clifford_relation_residuals, decomposition_ranks,
                                          irreducible_dim, irreducible_generators, j2_residual,
                                          j2_sample_grid, j2_satisfied, j2_submodule_residual,
                                          predict_j2_set, validate_clifford)
from damek_ricci.errors import (DimensionMismatch, InvalidGenerators, NotApplicable,
                                UnsupportedDimension)

from conftest import BENCHMARK_SPECS, algebra_for


# dimensions of irreducible Clifford modules, read off the periodicity table
@pytest.mark.parametrize("m,n0", [(0, 1), (1, 2), (2, 4), (3, 4), (4, 8), (5, 8), (6, 8), (7, 8),
                                  (8, 16), (9, 32), (10, 64), (11, 64), (12, 128)])
def test_irreducible_dimensions(m, n0):
    assert irreducible_dim(m) == n0


@pytest.mark.parametrize("m", range(0, 12))
def test_irreducible_generators_satisfy_relations(m):
    tags = ("d1", "d2") if m % 4 == 3 else ("d",)
    for tag in tags:
        J = irreducible_generators(m, tag)
        assert J.shape == (m, irreducible_dim(m), irreducible_dim(m))
        alg = DamekRicciAlgebra(J)
        assert max(clifford_relation_residuals(alg).values()) <= 1e-12


def test_inequivalent_modules_differ_by_volume_sign():
    # J_1 J_2 J_3 acts as +/- identity on the two irreducible modules for m = 3
    vols = []
    for tag in ("d1", "d2"):
        J = irreducible_generators(3, tag)
        vols.append(J[0] @ J[1] @ J[2])
    assert np.allclose(vols[0], -vols[1])
    assert np.allclose(np.abs(np.diag(vols[0])), 1.0)


def test_spec_rejects_bad_input():
    with pytest.raises(UnsupportedDimension):
        CliffordSpec(-1)
    with pytest.raises(InvalidGenerators):
        CliffordSpec.from_tags(3, ("d", 1))
    with pytest.raises(InvalidGenerators):
        CliffordSpec.from_tags(2, ("d1", 1))
    with pytest.raises(InvalidGenerators):
        CliffordSpec.from_tags(1, ("q", 1))
    with pytest.raises(InvalidGenerators):
        CliffordSpec(2, generators=np.zeros((1, 4, 4)))


def test_explicit_generators_are_checked():
    J = irreducible_generators(3, "d1").copy()
    J[0] *= 2.0
    with pytest.raises(InvalidGenerators):
        build_algebra(CliffordSpec(3, generators=J))
    alg = build_algebra(CliffordSpec(3, generators=irreducible_generators(3, "d1")))
    assert (alg.m, alg.n) == (3, 4)


def test_blocks_and_dimension():
    spec = BENCHMARK_SPECS["m3_d1d2"]
    assert spec.n == 8
    assert [(t, s.start, s.stop) for t, s in spec.blocks()] == [("d1", 0, 4), ("d2", 4, 8)]
    with pytest.raises(NotApplicable):
        CliffordSpec(1, generators=irreducible_generators(1)).blocks()


def test_validation_passes_on_benchmarks(bench):
    spec, alg = bench
    rep = validate_clifford(alg, samples=200, rng=np.random.default_rng(1))
    assert rep.passed, rep.failures()


def test_dimension_checks():
    alg = algebra_for("m3_d1")
    with pytest.raises(DimensionMismatch):
        alg.j(np.ones(2), np.ones(4))
    with pytest.raises(DimensionMismatch):
        alg.bracket(np.ones(3), np.ones(4))


def test_bracket_components_by_hand():
    # m = 1: J_1 is the complex structure, [U, V] = <J U, V>
    alg = algebra_for("m1_d")
    J = alg.J[0]
    U, V = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    assert alg.bracket(U, V)[0] == pytest.approx((J @ U) @ V)
    assert abs(alg.bracket(U, V)[0]) == pytest.approx(1.0)


vectors = st.lists(st.floats(-3, 3, allow_nan=False), min_size=8, max_size=8)
zvecs = st.lists(st.floats(-3, 3, allow_nan=False), min_size=3, max_size=3)


@settings(max_examples=60, deadline=None)
@given(vectors, vectors, zvecs)
def test_bracket_duality_and_norms(u, v, z):
    alg = algebra_for("m3_d1d2")
    U, V, Z = map(np.array, (u, v, z))
    assert alg.bracket(U, V) @ Z == pytest.approx(alg.j(Z, U) @ V, abs=1e-10)
    assert np.linalg.norm(alg.j(Z, V)) == pytest.approx(np.linalg.norm(Z) * np.linalg.norm(V), abs=1e-10)
    assert np.allclose(alg.bracket(U, V), -alg.bracket(V, U), atol=1e-12)
    # J_Z J_Z = -|Z|^2
    assert np.allclose(alg.j(Z, alg.j(Z, V)), -(Z @ Z) * V, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(vectors)
def test_decomposition_ranks_of_bracket_map(v):
    alg = algebra_for("m3_d1d2")
    V = np.array(v)
    if np.linalg.norm(V) < 1e-3:
        return
    ranks = decomposition_ranks(alg, V)
    # v = RV + (ker ad V cap V^perp) + J_z V, orthogonal, J_z V of full rank m
    assert ranks["jz"] == alg.m
    assert ranks["total"] == alg.n
    assert ranks["overlap"] <= 1e-8


def test_j2_all_true_for_m1():
    alg = algebra_for("m1_d")
    for v in np.random.default_rng(0).standard_normal((20, alg.n)):
        assert j2_satisfied(alg, v)[0]


def test_j2_m2_only_zero():
    spec = CliffordSpec.from_tags(2, ("d", 1))
    alg = build_algebra(spec)
    grid = j2_sample_grid(spec, 100, np.random.default_rng(2))
    flags = [j2_satisfied(alg, v)[0] for v in grid]
    assert flags[0] and not any(flags[1:])


@pytest.mark.parametrize("key", list(BENCHMARK_SPECS))
def test_j2_matches_prediction_and_submodule_check(key):
    spec, alg = BENCHMARK_SPECS[key], algebra_for(key)
    grid = j2_sample_grid(spec, 120, np.random.default_rng(3))
    for v in grid:
        flag, _ = j2_satisfied(alg, v)
        assert flag == predict_j2_set(spec, v)
        sub = j2_submodule_residual(alg, v)
        assert (sub <= 1e-8 * max(1.0, np.linalg.norm(v))) == flag


def test_j2_examples_m3_mixed_and_isotypic():
    spec, alg = BENCHMARK_SPECS["m3_d1d2"], algebra_for("m3_d1d2")
    iso_v = np.r_[np.ones(4), np.zeros(4)]
    mixed = np.r_[np.ones(4), np.ones(4)]
    assert j2_satisfied(alg, iso_v)[0] and predict_j2_set(spec, iso_v)
    assert not j2_satisfied(alg, mixed)[0] and not predict_j2_set(spec, mixed)
    assert j2_residual(alg, mixed) > 1e-2


def test_j2_m7_proportional_components():
    spec, alg = BENCHMARK_SPECS["m7_d1d1"], algebra_for("m7_d1d1")
    w = np.random.default_rng(4).standard_normal(8)
    assert j2_satisfied(alg, np.r_[w, -2.5 * w])[0]
    assert not j2_satisfied(alg, np.r_[w, w[::-1]])[0]
