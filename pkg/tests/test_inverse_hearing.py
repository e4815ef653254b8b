import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hearshape.heat_trace import HeatInvariants, geometric_heat_invariants, parallelogram_a0
from hearshape.inverse_hearing import (
    NotInClassError, TrapezoidSystem, _v, _v_prime, angle_residuals, beta_of_alpha, detect_regular,
    find_isoinvariant_trapezoids, g_function, g_prime, hear_acute_trapezoid, hear_parallelogram, hear_report,
    is_nontrivial_pair, isosceles_angle, parallelogram_angle, solve_angle_system, trapezoid_invariants,
    trapezoid_system_from_invariants, u_function, u_second_derivative, uniqueness_scan,
)
from hearshape.polygon import ParallelogramParams, TrapezoidParams, congruent
from helpers import random_acute

PI = math.pi
WORKED = TrapezoidParams.from_base(6, 1, PI / 5, PI / 10)


def test_parallelogram_worked_example():
    inv = HeatInvariants(2 * math.sin(PI / 3), 6, 7 / 24)
    pp = hear_parallelogram(inv)
    assert (pp.L, pp.W, pp.alpha) == pytest.approx((2, 1, PI / 3), abs=1e-10)


def test_parallelogram_square():
    pp = hear_parallelogram(HeatInvariants(1, 4, 0.25))
    assert (pp.L, pp.W, pp.alpha) == pytest.approx((1, 1, PI / 2), abs=1e-12)


def test_parallelogram_not_in_class():
    with pytest.raises(NotInClassError):
        hear_parallelogram(HeatInvariants(1, 4, 0.2))  # a0 below 1/4
    with pytest.raises(NotInClassError):
        hear_parallelogram(HeatInvariants(1, 4, 7 / 24))  # area too large for the angle


def test_parallelogram_random_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(200):
        L = rng.uniform(0.1, 10)
        pp = ParallelogramParams(L, L * rng.uniform(0.01, 1), rng.uniform(0.05, PI / 2))
        got = hear_parallelogram(geometric_heat_invariants(pp.polygon()))
        assert congruent(got.polygon(), pp.polygon(), 1e-9)


def test_parallelogram_angle_monotone_in_a0():
    a0 = np.linspace(0.25, 5, 500)
    alpha = np.array([parallelogram_angle(x) for x in a0])
    assert np.all(np.diff(alpha) < 0)
    assert np.allclose([parallelogram_a0(a) for a in alpha], a0, rtol=1e-12)


def test_trapezoid_system_worked_example():
    inv, geo = trapezoid_invariants(WORKED)
    assert inv.area == pytest.approx(3.77297, abs=1e-5)
    assert inv.perimeter == pytest.approx(12.48330, abs=1e-5)
    system, h, s, legs = trapezoid_system_from_invariants(inv, geo)
    assert h == 1 and s == pytest.approx(6 + WORKED.b)
    assert system.p == pytest.approx(4.93737, abs=1e-5)
    assert system.q == pytest.approx(25 / (4 * PI**2) + 100 / (9 * PI**2), rel=1e-13)
    assert system.q == pytest.approx(1.75905, abs=1e-5)


def test_trapezoid_system_isosceles():
    t = TrapezoidParams.from_base(4, 1, 0.6, 0.6)
    system, *_ = trapezoid_system_from_invariants(*trapezoid_invariants(t))
    assert system.p == pytest.approx(2 / math.sin(0.6), rel=1e-13)
    assert system.q == pytest.approx(2 / (0.6 * (PI - 0.6)), rel=1e-13)


def test_mismatched_geodesic():
    inv, _ = trapezoid_invariants(WORKED)
    with pytest.raises(NotInClassError):
        trapezoid_system_from_invariants(inv, 0.8)  # leg sum would be negative
    with pytest.raises(NotInClassError):
        hear_acute_trapezoid(inv, 2.4)


def test_solve_worked_example():
    system, *_ = trapezoid_system_from_invariants(*trapezoid_invariants(WORKED))
    a, b = solve_angle_system(system)
    assert (a, b) == pytest.approx((PI / 5, PI / 10), abs=1e-8)
    assert max(map(abs, angle_residuals(a, b, system))) < 1e-10


def test_solve_isosceles():
    q = 2 / (0.6 * (PI - 0.6))
    a, b = solve_angle_system(TrapezoidSystem(2 / math.sin(0.6), q))
    assert a == b == pytest.approx(0.6, abs=1e-12)


def test_solve_below_isosceles_bound():
    q = 1.75905
    p = 2 / math.sin(isosceles_angle(q)) * (1 - 1e-3)
    with pytest.raises(NotInClassError, match="no acute trapezoid"):
        solve_angle_system(TrapezoidSystem(p, q))


def test_solve_independent_of_scan_resolution():
    system, *_ = trapezoid_system_from_invariants(*trapezoid_invariants(WORKED))
    a1 = solve_angle_system(system, scan_points=1000)
    a2 = solve_angle_system(system, scan_points=10_000)
    assert a1 == pytest.approx(a2, abs=1e-13)


def test_beta_solves_corner_equation():
    q = 1.75905
    alpha = np.linspace(isosceles_angle(q), 1.2, 50)
    beta = beta_of_alpha(alpha, q)
    ok = np.isfinite(beta)
    lhs = 1 / (alpha * (PI - alpha)) + 1 / (beta * (PI - beta))
    assert np.allclose(lhs[ok], q, rtol=1e-12)


def test_g_prime_matches_finite_differences():
    q = 1.75905
    for a in np.linspace(isosceles_angle(q) + 0.01, 1.0, 12):
        fd = (g_function(a + 1e-6, q) - g_function(a - 1e-6, q)) / 2e-6
        assert float(g_prime(a, q)) == pytest.approx(float(fd), rel=1e-5, abs=1e-8)


def test_uniqueness_scan_claims():
    rep = uniqueness_scan(1000)
    assert rep.ok and rep.u_max < 0 and rep.u_second_min > 0 and rep.v_prime_min >= 0
    assert u_function(PI / 4) < 0
    assert _v_prime(0.5) >= 0
    # endpoint limits u(0+) = u(pi/2-) = 0
    assert abs(u_function(1e-7)) < 1e-6 and abs(u_function(PI / 2 - 1e-7)) < 1e-6
    with pytest.raises(ValueError):
        uniqueness_scan(50)
    assert json.dumps(rep.to_dict())


def _u_mp(a):
    return (2 / (PI - 2 * a) + 2 / a + 2 / (a - PI) - 2 * mpmath.cot(a) - mpmath.tan(a))


def test_u_second_derivative_against_mpmath():
    mpmath.mp.dps = 40
    try:
        for a in (0.05, 0.3, 0.8, 1.2, 1.5):
            exact = mpmath.diff(lambda x: 2 / (mpmath.pi - 2 * x) + 2 / x + 2 / (x - mpmath.pi)
                                - 2 * mpmath.cot(x) - mpmath.tan(x), mpmath.mpf(a), 2)
            assert float(u_second_derivative(a)) == pytest.approx(float(exact), rel=1e-8, abs=1e-12)
    finally:
        mpmath.mp.dps = 15


def test_v_series_against_mpmath():
    mpmath.mp.dps = 40
    try:
        for x in (1e-4, 0.05, 0.099, 0.2, 1.0):
            xm = mpmath.mpf(x)
            exact = 1 / xm**3 - mpmath.cos(xm) / mpmath.sin(xm) ** 3
            assert float(_v(x)) == pytest.approx(float(exact), rel=1e-12)
            assert float(_v_prime(x)) == pytest.approx(float(mpmath.diff(lambda y: 1 / y**3 - mpmath.cos(y) / mpmath.sin(y) ** 3, xm)), rel=1e-10)
    finally:
        mpmath.mp.dps = 15


def test_hear_trapezoid_worked_and_isosceles():
    got = hear_acute_trapezoid(*trapezoid_invariants(WORKED))
    assert (got.B, got.b, got.h, got.alpha, got.beta) == pytest.approx((6, 1.54593, 1, PI / 5, PI / 10), abs=1e-5)
    iso = TrapezoidParams.from_base(4, 1, 0.6, 0.6)
    got = hear_acute_trapezoid(*trapezoid_invariants(iso))
    assert got.alpha == got.beta
    assert congruent(got.polygon(), iso.polygon(), 1e-10)


def test_hear_trapezoid_random_round_trip():
    rng = np.random.default_rng(2)
    for _ in range(100):
        t = random_acute(rng)
        inv, geo = trapezoid_invariants(t)
        got = hear_acute_trapezoid(inv, geo)
        assert congruent(got.polygon(), t.polygon(), 1e-7)
        regen, geo2 = trapezoid_invariants(got)
        assert regen.area == pytest.approx(inv.area, rel=1e-8)
        assert regen.perimeter == pytest.approx(inv.perimeter, rel=1e-8)
        assert regen.a0 == pytest.approx(inv.a0, rel=1e-8)
        assert geo2 == pytest.approx(geo, rel=1e-8)


def test_detect_regular_examples():
    assert detect_regular(4, 1, 4) == 1
    assert detect_regular(4, 1, 4.2, 1e-9) is None
    assert detect_regular(3, math.sqrt(3) / 4, 3) == pytest.approx(1)
    with pytest.raises(ValueError):
        detect_regular(2, 1, 4)


@given(st.integers(3, 12), st.floats(0.01, 100), st.booleans())
def test_detect_regular_scale_invariant(n, c, regular):
    area = n / (4 * math.tan(PI / n)) if regular else 0.9 * n / (4 * math.tan(PI / n))
    base = detect_regular(n, area, n) is not None
    assert (detect_regular(n, c * c * area, c * n) is not None) == base == regular


def test_trapezoid_pair():
    found = find_isoinvariant_trapezoids(WORKED)
    assert found is not None
    t1, t2, mismatch = found
    assert t2.is_acute and mismatch <= 1e-8
    assert not congruent(t1.polygon(), t2.polygon(), 1e-6)
    assert abs(t1.h - t2.h) > 1e-6
    i1, i2 = geometric_heat_invariants(t1.polygon()), geometric_heat_invariants(t2.polygon())
    assert (i2.area, i2.perimeter, i2.a0) == pytest.approx((i1.area, i1.perimeter, i1.a0), rel=1e-8)


def test_trapezoid_pair_guards():
    assert not is_nontrivial_pair(WORKED, WORKED)
    assert find_isoinvariant_trapezoids(WORKED, tol=0) is None


def test_hear_report_json():
    inv, geo = trapezoid_invariants(WORKED)
    got = hear_acute_trapezoid(inv, geo)
    rep = json.loads(hear_report("trapezoid", inv.to_dict(), got, {"r": 0.0}, WORKED.polygon(), got.polygon()))
    assert rep["congruent_to_truth"] is True
    assert rep["reconstructed"]["B"] == pytest.approx(6)
