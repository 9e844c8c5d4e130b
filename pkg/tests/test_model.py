import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from damek_ricci.errors import DomainError
from damek_ricci.model import (AffinePoint, Point, ScalarField, TangentVec, distance, distance_via_D,
                               fd_partials, frame_grad_sq, identity, inverse, laplacian, left_translate,
                               multiply, random_point, sample_points, translate_arrays)

from conftest import algebra_for


def test_point_requires_positive_t():
    with pytest.raises(DomainError):
        Point(np.zeros(2), np.zeros(1), 0.0)
    with pytest.raises(DomainError):
        AffinePoint(np.array([np.nan, 0.0]), np.zeros(1), 1.0)
    AffinePoint(np.zeros(2), np.zeros(1), -1.0)


def test_group_law_identity_inverse(bench, rng):
    _, alg = bench
    e = identity(alg)
    for _ in range(20):
        p, q, r = (random_point(alg, rng) for _ in range(3))
        for a, b in ((multiply(alg, p, e), p), (multiply(alg, e, p), p), (multiply(alg, p, inverse(alg, p)), e),
                     (multiply(alg, multiply(alg, p, q), r), multiply(alg, p, multiply(alg, q, r)))):
            assert np.allclose(a.as_array(), b.as_array(), atol=1e-12)


def test_left_translation_matches_product_and_extends(bench, rng):
    _, alg = bench
    p, q = random_point(alg, rng), random_point(alg, rng)
    assert np.allclose(left_translate(alg, p, q).as_array(), multiply(alg, p, q).as_array())
    x = AffinePoint(rng.standard_normal(alg.n), rng.standard_normal(alg.m), -2.0)
    y = left_translate(alg, p, x)
    assert type(y) is AffinePoint and y.t == pytest.approx(-2.0 * p.t)
    V, Z, t = translate_arrays(alg, p, x.V[None], x.Z[None], np.array([x.t]))
    assert np.allclose(np.r_[V[0], Z[0], t[0]], y.as_array())


def test_distance_along_vertical_line(bench):
    _, alg = bench
    e = identity(alg)
    for t in (0.01, 0.5, 3.0, 1e3):
        x = Point(np.zeros(alg.n), np.zeros(alg.m), t)
        assert distance(alg, x, e) == pytest.approx(abs(math.log(t)), abs=1e-13)


def test_distance_frozen_value():
    # mpmath oracle: 2 acosh(sqrt(D)/2) with D = ((t + 1 + |V|^2/4)^2 + |Z|^2)/t
    alg = algebra_for("m1_d")
    x = Point(np.array([1.0, 0.0]), np.array([0.5]), 2.0)
    assert distance(alg, x, identity(alg)) == pytest.approx(1.12550089794178098563610162934, abs=1e-14)


def test_distance_agrees_with_arccosh_form(bench, rng):
    _, alg = bench
    for _ in range(30):
        x, y = random_point(alg, rng), random_point(alg, rng)
        assert distance(alg, x, y) == pytest.approx(distance_via_D(alg, x, y), rel=1e-9, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_distance_left_invariant_and_symmetric(seed):
    alg = algebra_for("m3_d1d2")
    rng = np.random.default_rng(seed)
    p, x, y = (random_point(alg, rng) for _ in range(3))
    d = distance(alg, x, y)
    assert distance(alg, y, x) == pytest.approx(d, abs=1e-10)
    assert distance(alg, multiply(alg, p, x), multiply(alg, p, y)) == pytest.approx(d, abs=1e-9)
    assert distance(alg, x, x) == pytest.approx(0.0, abs=1e-12)


def test_fd_partials_of_polynomial(rng):
    alg = algebra_for("m3_d1")
    f = ScalarField(lambda V, Z, t: np.sum(V ** 2, -1) * t + Z[..., 0] ** 3)
    x = random_point(alg, rng)
    dV, dZ, dt = fd_partials(f, x, order=4)
    assert np.allclose(dV, 2 * x.V * x.t, atol=1e-8)
    assert dZ[0] == pytest.approx(3 * x.Z[0] ** 2, abs=1e-8)
    assert dt == pytest.approx(x.V @ x.V, abs=1e-8)


def test_laplacian_of_log_t(bench, rng):
    # log t has |grad|^2 = 1 and Laplacian -(m + n/2)
    _, alg = bench
    f = ScalarField(lambda V, Z, t: np.log(t))
    for x in sample_points(alg, 10, rng):
        assert laplacian(alg, f, x) == pytest.approx(-(alg.m + alg.n / 2.0), abs=1e-7)
        assert frame_grad_sq(alg, f, x, order=4) == pytest.approx(1.0, abs=1e-8)


def test_laplacian_of_constant_is_zero(bench, rng):
    _, alg = bench
    f = ScalarField(lambda V, Z, t: np.full(np.shape(t), 3.0))
    x = random_point(alg, rng)
    assert laplacian(alg, f, x) == pytest.approx(0.0, abs=1e-9)


def test_tangent_vec_unit():
    xi = TangentVec(np.array([3.0, 0.0]), np.array([0.0]), 4.0)
    assert xi.norm() == 5.0
    assert xi.unit().norm() == pytest.approx(1.0)
    assert np.array_equal(TangentVec.from_array(xi.as_array(), 2).as_array(), xi.as_array())


def test_sample_points_deterministic():
    alg = algebra_for("m1_d")
    a = sample_points(alg, 5, np.random.default_rng(9))
    b = sample_points(alg, 5, np.random.default_rng(9))
    assert all(np.array_equal(p.as_array(), q.as_array()) for p, q in zip(a, b))
    assert all(0.05 <= p.t <= 20.0 for p in sample_points(alg, 200, np.random.default_rng(1)))
