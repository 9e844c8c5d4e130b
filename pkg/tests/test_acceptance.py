"""Acceptance gate: ten criteria, one reported pass/fail line each."""

import math

import numpy as np
import pytest

from damek_ricci.clifford_algebra import (CliffordSpec, build_algebra, j2_sample_grid, j2_satisfied,
                                          predict_j2_set, random_unit, validate_clifford)
from damek_ricci.focal import (FStar, Fx0, distance_to_focal, focal_center_through_identity,
                               focal_intersections, kahler_angle_spread, membership_residual,
                               random_ball_point, sample_orthogonal_velocity, totally_geodesic_at, upsilon)
from damek_ricci.geodesic import (STAR, classify_conic, cross_ratio, geodesic_from, point_at_infinity,
                                  safe_theta_grid)
from damek_ricci.isoparametric import (DistortedDistance, DStar, SubsetF, dstar_limit_residual, level_offset,
                                       mean_curvature, mean_curvature_from_ab, sphere_h_from_density,
                                       tube_radius, tube_radius_quadrature, verify_isoparametric)
from damek_ricci.model import AffinePoint, TangentVec, distance, left_translate, random_point, sample_points

from conftest import ACCEPTANCE_LINES, BENCHMARK_SPECS, algebra_for

SPECS = list(BENCHMARK_SPECS)


def report(number, title, ok, detail):
    line = f"criterion {number:2d} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def center(alg, rng, t0):
    return AffinePoint(0.5 * rng.standard_normal(alg.n), 0.5 * rng.standard_normal(alg.m), t0)


def test_criterion_01_clifford_validation():
    worst = {}
    for key in SPECS:
        rep = validate_clifford(algebra_for(key), samples=1000, rng=np.random.default_rng(1))
        worst[key] = max(rep.residuals.values())
    top = max(worst.values())
    report(1, "Clifford relations and bracket identities, 1000 inputs per spec", top <= 1e-12,
           f"max residual {top:.2e} (tol 1e-12)")


def test_criterion_02_distorted_distance_identities():
    g_max = l_max = 0.0
    for key in SPECS:
        alg = algebra_for(key)
        rng = np.random.default_rng(2)
        pts = sample_points(alg, 100, rng)
        for t0 in (-2.0, -1.0, 0.0, 1.0):
            rep = verify_isoparametric(DistortedDistance(alg, center(alg, rng, t0)), pts)
            g_max, l_max = max(g_max, rep.grad_max), max(l_max, rep.lap_max)
    report(2, "D_x0 gradient and Laplacian identities, t0 in {-2,-1,0,1}, 100 points",
           g_max <= 1e-9 and l_max <= 1e-5, f"gradient {g_max:.2e} (tol 1e-9), Laplacian {l_max:.2e} (tol 1e-5)")


def test_criterion_03_subset_function_identities():
    g_max = l_max = 0.0
    for key in SPECS:
        alg = algebra_for(key)
        rng = np.random.default_rng(3)
        pts = sample_points(alg, 100, rng)
        for I in ((0,), tuple(range(0, alg.n, 2)), tuple(range(alg.n))):
            rep = verify_isoparametric(SubsetF(alg, I), pts)
            g_max, l_max = max(g_max, rep.grad_max), max(l_max, rep.lap_max)
    report(3, "coordinate-subset function identities, three index sets", g_max <= 1e-9 and l_max <= 1e-5,
           f"gradient {g_max:.2e} (tol 1e-9), Laplacian {l_max:.2e} (tol 1e-5)")


def test_criterion_04_dstar_limit():
    gaps = np.logspace(-2, -6, 9)
    monotone, orders = True, []
    for key in SPECS:
        alg = algebra_for(key)
        rng = np.random.default_rng(4)
        s = 0.6
        fn = DStar(alg, random_point(alg, rng), random_unit(rng, (alg.n,)) * math.sqrt(1 - s * s), s)
        for _ in range(10):
            x = random_point(alg, rng)
            res = np.array([dstar_limit_residual(fn, 1 / s - g, x) for g in gaps])
            monotone &= bool(np.all(np.diff(res) < 0))
            orders.append(np.polyfit(np.log(gaps), np.log(res), 1)[0])
    low = min(orders)
    report(4, "rescaled D_x0 tends to the limit function along a parabola", monotone and low >= 0.9,
           f"monotone={monotone}, smallest empirical order {low:.3f} (need >= 0.9)")


def test_criterion_05_geodesics():
    speed = conic = 0.0
    split_ok = True
    for key in SPECS:
        alg = algebra_for(key)
        rng = np.random.default_rng(5)
        for k in range(100):
            xi = TangentVec.from_array(random_unit(rng, (alg.n + alg.m + 1,)), alg.n)
            if k % 3 == 1:
                xi = TangentVec(xi.v, np.zeros(alg.m), xi.s).unit()
            g = geodesic_from(alg, xi, random_point(alg, rng))
            for _ in range(5):
                t1, t2 = rng.uniform(-3, 3, 2)
                speed = max(speed, abs(distance(alg, g.point(t1), g.point(t2)) - abs(t1 - t2)))
            conic = max(conic, classify_conic(alg, xi).residual(safe_theta_grid(xi, count=50)))
            far = point_at_infinity(alg, xi)
            split_ok &= (far is STAR) == (abs(np.linalg.norm(xi.v) - 1) <= 1e-12)
        v = random_unit(rng, (alg.n,))
        split_ok &= point_at_infinity(alg, TangentVec(v, np.zeros(alg.m), 0.0)) is STAR
        line = TangentVec(np.zeros(alg.n), np.zeros(alg.m), 1.0)
        conic = max(conic, classify_conic(alg, line).residual(safe_theta_grid(line, count=50)))
    ok = speed <= 1e-9 and conic <= 1e-10 and split_ok
    report(5, "unit speed, conic equations, point at infinity", ok,
           f"speed {speed:.2e} (tol 1e-9), conic {conic:.2e} (tol 1e-10), case split ok={split_ok}")


def test_criterion_06_orthogonality_and_harmonic_range():
    endpoint = harmonic = 0.0
    counts = []
    for key in SPECS:
        alg = algebra_for(key)
        rng = np.random.default_rng(6)
        for _ in range(10):
            F = Fx0(alg, focal_center_through_identity(alg, 0.8 * rng.standard_normal(alg.n)))
            xi = sample_orthogonal_velocity(F, rng)
            endpoint = max(endpoint, point_at_infinity(alg, xi).distance_to(F.x0))
            counts.append(len(focal_intersections(F, geodesic_from(alg, xi), grid=1000)))
    for th in np.random.default_rng(6).uniform(-20, 20, 200):
        harmonic = max(harmonic, abs(cross_ratio(th, 1 / th, 1.0, -1.0) + 1.0))
    ok = endpoint <= 1e-10 and harmonic <= 1e-12 and all(c == 1 for c in counts)
    report(6, "orthogonal velocities reach x0, harmonic range, unique foot", ok,
           f"endpoint {endpoint:.2e} (tol 1e-10), cross-ratio {harmonic:.2e} (tol 1e-12), "
           f"intersections per geodesic {sorted(set(counts))}")


def test_criterion_07_j2_classification():
    mismatches = 0
    for key in SPECS:
        spec, alg = BENCHMARK_SPECS[key], algebra_for(key)
        for v in j2_sample_grid(spec, 500, np.random.default_rng(7)):
            mismatches += j2_satisfied(alg, v)[0] != predict_j2_set(spec, v)
    spec2 = CliffordSpec.from_tags(2, ("d", 2))
    alg2 = build_algebra(spec2)
    grid2 = j2_sample_grid(spec2, 500, np.random.default_rng(7))
    m2_true = sum(j2_satisfied(alg2, v)[0] for v in grid2 if np.linalg.norm(v) > 0)
    ok = mismatches == 0 and m2_true == 0
    report(7, "J^2 test against the module classification, 500-point grids", ok,
           f"mismatches {mismatches}, nonzero m=2 vectors passing {m2_true}")


def test_criterion_08_totally_geodesic():
    true_max, false_min, spread_ok, agree = 0.0, math.inf, True, True
    for key in SPECS:
        spec, alg = BENCHMARK_SPECS[key], algebra_for(key)
        rng = np.random.default_rng(8)
        F = Fx0(alg, center(alg, rng, -2.0))
        for w in j2_sample_grid(spec, 12, rng):
            nw = np.linalg.norm(w)
            Vbar = F.x0.V + (0.6 * F.radius * w / nw if nw else 0.0)
            test = totally_geodesic_at(F, Vbar, rng=rng)
            if test.flag:
                true_max = max(true_max, test.residual)
            else:
                false_min = min(false_min, test.residual)
        for v in j2_sample_grid(spec, 12, rng)[1:]:
            v = 0.6 * v / np.linalg.norm(v)
            Fs = FStar(alg, v, rng.standard_normal(alg.n), 0.8, rng.uniform(0.5, 2.0))
            test = totally_geodesic_at(Fs, rng=rng)
            agree &= test.flag == j2_satisfied(alg, v)[0]
            spread = kahler_angle_spread(alg, v, count=30, rng=rng)
            spread_ok &= (spread <= 1e-6) if test.flag else (spread >= 1e-2)
            if test.flag:
                true_max = max(true_max, test.residual)
            else:
                false_min = min(false_min, test.residual)
    ok = true_max <= 1e-8 and false_min >= 1e-3 and spread_ok and agree
    report(8, "totally geodesic flags vs geodesic escape and Kahler angles", ok,
           f"flag-true escape {true_max:.2e} (tol 1e-8), flag-false escape {false_min:.2e} (need >= 1e-3), "
           f"Kahler spread consistent={spread_ok}")


def test_criterion_09_mean_curvature_and_tube_radius():
    radii = (0.1, 0.5, 1.0, 2.0, 5.0)
    h_err = dens_err = quad_err = dist_err = 0.0
    for key in SPECS:
        alg = algebra_for(key)
        m, n = alg.m, alg.n
        zero = (np.zeros(n), np.zeros(m))
        sphere = DistortedDistance(alg, AffinePoint(*zero, 1.0))
        tube = DistortedDistance(alg, AffinePoint(*zero, -1.0))
        for r in radii:
            h_err = max(h_err,
                        abs(mean_curvature_from_ab(sphere, offset=level_offset(sphere, r))
                            - mean_curvature("Sphere", r, m, n)),
                        abs(mean_curvature_from_ab(tube, offset=level_offset(tube, r)) - mean_curvature("Tube", r, m, n)))
            dens_err = max(dens_err, abs(sphere_h_from_density(r, m, n) - mean_curvature("Sphere", r, m, n)))
            c = 4 * math.sinh(r / 2) ** 2
            quad_err = max(quad_err, abs(tube_radius_quadrature(tube, c) - tube_radius(tube, c)))
        rng = np.random.default_rng(9)
        F = Fx0(alg, center(alg, rng, -1.5))
        fn = F.function()
        for _ in range(20):
            x = random_point(alg, rng)
            dist_err = max(dist_err, abs(distance_to_focal(F, x, rng=rng) - tube_radius(fn, fn(x))))
    ok = h_err <= 1e-12 and dens_err <= 1e-12 and quad_err <= 1e-8 and dist_err <= 1e-6
    report(9, "mean curvature, density route, tube radius, distance to focal variety", ok,
           f"from (a,b) {h_err:.2e}, density {dens_err:.2e} (tol 1e-12), quadrature {quad_err:.2e} (tol 1e-8), "
           f"distance {dist_err:.2e} (tol 1e-6)")


def test_criterion_10_translation_laws():
    d_err = star_err = focal_err = 0.0
    for key in SPECS:
        alg = algebra_for(key)
        rng = np.random.default_rng(10)
        for _ in range(100):
            p, x = random_point(alg, rng), random_point(alg, rng)
            moved = left_translate(alg, p, x)
            fn = DistortedDistance(alg, center(alg, rng, rng.uniform(-2, 2)))
            d_err = max(d_err, abs(fn(moved) - p.t * fn.translated(p)(x)) / max(1.0, fn(moved)))
            s = rng.uniform(-0.9, 0.9)
            ds = DStar(alg, random_point(alg, rng), random_unit(rng, (alg.n,)) * math.sqrt(1 - s * s), s)
            star_err = max(star_err, abs(ds.limit_value(moved) - p.t * ds.translated(p).limit_value(x))
                           / max(1.0, ds.limit_value(moved)))
            F = Fx0(alg, center(alg, rng, -rng.uniform(0.5, 2)))
            q = upsilon(F, random_ball_point(F, rng))
            focal_err = max(focal_err, membership_residual(F.translated(p), left_translate(alg, p, q)))
    ok = max(d_err, star_err, focal_err) <= 1e-10
    report(10, "left translation laws for D_x0, the limit function and focal varieties", ok,
           f"D_x0 {d_err:.2e}, limit function {star_err:.2e}, focal membership {focal_err:.2e} (tol 1e-10)")
