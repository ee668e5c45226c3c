import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chebylab.poly import ComplexPoly
from chebylab.potential import (
    EmpiricalMeasure,
    balayage_residual,
    capacity,
    equilibrium_measure,
    far_ring,
    green,
    green_model,
    leja_capacity,
    leja_points,
    leja_sequence,
    log_potential,
    pw_sum,
)
from chebylab.sets import (
    ConfocalEllipse,
    Disk,
    Interval,
    JuliaCauliflower,
    Lemniscate,
    LevelSet,
    Polygon,
    PolynomialPreimage,
    RealIntervalUnion,
    sample_boundary,
)

GOLDEN = (3 + math.sqrt(5)) / 2
BERN = ComplexPoly([-1, 0, 1])
P2 = ComplexPoly([-3, 0, 1])

CLOSED_FAMILIES = [
    Interval(-2, 2),
    Interval(-1, 3),
    Disk(0.5, 2.0),
    ConfocalEllipse(0.5),
    Lemniscate(BERN, 1.0),
    PolynomialPreimage(P2),
    LevelSet(PolynomialPreimage(P2), 0.3),
    RealIntervalUnion(((-3.0, -1.0), (0.5, 2.0))),
]


# capacity ---------------------------------------------------------------


@pytest.mark.parametrize(
    "spec, expected",
    [
        (Interval(-2, 2), 1.0),
        (Interval(0, 1), 0.25),
        (Lemniscate(BERN, 1.0), 1.0),
        (Lemniscate(BERN, 0.25), 0.5),
        (ConfocalEllipse(0.5), math.exp(0.5)),
        (Disk(3j, 0.7), 0.7),
        (PolynomialPreimage(P2), 1.0),
        (LevelSet(PolynomialPreimage(P2), 0.3), math.exp(0.3)),
        (JuliaCauliflower(14), 1.0),
    ],
    ids=lambda v: getattr(v, "variant", ""),
)
def test_capacity_closed_forms(spec, expected):
    assert capacity(spec) == pytest.approx(expected, rel=1e-14)


def test_finite_gap_capacity_symmetric_union():
    # [-sqrt5,-1] u [1,sqrt5] is the period-two preimage, capacity 1
    u = RealIntervalUnion(((-math.sqrt(5), -1.0), (1.0, math.sqrt(5))))
    assert capacity(u) == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize(
    "spec",
    [Disk(0, 1), Interval(-2, 2), Lemniscate(BERN, 1.0)],
    ids=lambda s: s.variant,
)
def test_leja_capacity_within_one_percent(spec):
    est, converged = leja_capacity(spec, 200)
    assert converged
    assert est == pytest.approx(capacity(spec), rel=0.01)


@pytest.mark.parametrize("a", [0.2, 0.7])
def test_level_set_capacity_scaling(a):
    sq = Polygon((1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j))
    assert capacity(LevelSet(PolynomialPreimage(P2), a)) == pytest.approx(math.exp(a) * capacity(PolynomialPreimage(P2)), rel=1e-14)
    # Leja estimate of a scaled square stands in for an empirical level-set family
    big = Polygon(tuple(math.exp(a) * v for v in sq.vertices))
    assert capacity(big) == pytest.approx(math.exp(a) * capacity(sq), rel=0.01)


# Leja points ----------------------------------------------------------------


def _brute_leja(points, n):
    chosen = [int(np.argmax(np.abs(points)))]
    for _ in range(1, n):
        best, arg = -np.inf, None
        for i, p in enumerate(points):
            if i in chosen:
                continue
            v = sum(math.log(abs(p - points[j])) for j in chosen)
            if v > best:
                best, arg = v, i
        chosen.append(arg)
    return points[chosen]


def test_leja_matches_brute_force_on_disk():
    pts = sample_boundary(Disk(0, 1), 128).points
    got, _ = leja_sequence(pts, 8)
    np.testing.assert_allclose(got, _brute_leja(pts, 8), atol=1e-14)
    ang = np.sort(np.angle(got) % (2 * np.pi))
    np.testing.assert_allclose(np.diff(np.append(ang, ang[0] + 2 * np.pi)), np.pi / 4, atol=1e-12)


def test_leja_first_point_convention():
    pts = np.array([0.5, -2.0, 2.0, 1j])
    got, _ = leja_sequence(pts, 1)
    assert got[0] == -2.0
    assert leja_points(Interval(-2, 2), 1).size == 1


def test_leja_too_many_points():
    with pytest.raises(ValueError):
        leja_sequence(np.arange(5.0), 6)


def test_leja_interval_counting_follows_arcsine():
    a = leja_points(Interval(-2, 2), 400)
    frac = np.mean(np.abs(a) <= 0.5)
    assert frac == pytest.approx(2 / math.pi * math.asin(0.25), abs=0.01)


# Green's functions ------------------------------------------------------------


def test_green_examples():
    assert green(green_model(Interval(-2, 2)), 3.0) == pytest.approx(math.log(GOLDEN), rel=1e-14)
    lem = green_model(Lemniscate(BERN, 1.0))
    z = np.sqrt(1 + math.e)  # |z^2 - 1| = e
    assert green(lem, z) == pytest.approx(0.5, rel=1e-14)
    ell = ConfocalEllipse(0.4)
    b = sample_boundary(ell, 64).points
    np.testing.assert_allclose(green(green_model(ell), b), 0.0, atol=1e-12)
    assert green(green_model(Interval(-2, 2)), 0.3) == 0.0


def test_green_preimage_via_interval():
    g = green_model(PolynomialPreimage(P2))
    z = np.array([0.0, 3.0, 1 + 1j])
    expected = 0.5 * np.log(np.abs(((z**2 - 3) + np.sqrt((z**2 - 3) ** 2 - 4 + 0j)) / 2))
    # pick the branch with modulus >= 1
    alt = 0.5 * np.log(np.abs(((z**2 - 3) - np.sqrt((z**2 - 3) ** 2 - 4 + 0j)) / 2))
    np.testing.assert_allclose(g.green(z), np.maximum(expected, alt), rtol=1e-12)


@pytest.mark.parametrize("spec", CLOSED_FAMILIES + [JuliaCauliflower(14)], ids=lambda s: s.variant)
def test_green_asymptotics(spec):
    m = green_model(spec)
    z = 1e4 * np.exp(2j * np.pi * np.arange(7) / 7)
    np.testing.assert_allclose(m.green(z), np.log(np.abs(z)) - math.log(m.capacity), atol=1e-3)


@pytest.mark.parametrize("spec", CLOSED_FAMILIES + [JuliaCauliflower(14)], ids=lambda s: s.variant)
def test_green_mean_value_property(spec):
    m = green_model(spec)
    rng = np.random.default_rng(4)
    r = 3.0 + 2.0 * rng.uniform(size=50)
    centers = r * np.exp(2j * np.pi * rng.uniform(size=50))
    # trapezoid rule is spectrally accurate for periodic harmonic data
    ring = 0.01 * np.exp(2j * np.pi * np.arange(64) / 64)
    for c in centers:
        assert abs(np.mean(m.green(c + ring)) - m.green(c)) <= 1e-6


@given(st.floats(-6, 6), st.floats(-6, 6))
def test_green_nonnegative(x, y):
    for spec in (Interval(-2, 2), Lemniscate(BERN, 1.0), PolynomialPreimage(P2)):
        assert green_model(spec).green(complex(x, y)) >= 0.0


def test_green_vanishes_on_julia_interior():
    m = green_model(JuliaCauliflower(14))
    assert m.green(-0.5) == 0.0
    assert m.green(3.0) > 0.0


# measures and potentials ----------------------------------------------------------


def test_measure_normalization():
    mu = EmpiricalMeasure([0, 1, 2], [1, 1, 2])
    assert abs(mu.masses.sum() - 1) <= 1e-12
    with pytest.raises(ValueError):
        EmpiricalMeasure([0, 1], [1, -1])


def test_measure_csv_roundtrip():
    mu = EmpiricalMeasure([1 + 2j, -0.5], [0.25, 0.75])
    back = EmpiricalMeasure.from_csv(mu.to_csv())
    np.testing.assert_array_equal(back.atoms, mu.atoms)
    np.testing.assert_array_equal(back.masses, mu.masses)
    assert mu.to_csv().splitlines()[0] == "re,im,mass"


def test_equilibrium_interval_arcsine():
    mu = equilibrium_measure(Interval(-2, 2), 4000)
    assert mu.mass_where(np.abs(mu.atoms) <= 0.5) == pytest.approx(2 / math.pi * math.asin(0.25), abs=1e-3)


def test_equilibrium_disk_quarter():
    mu = equilibrium_measure(Disk(0, 1), 400)
    ang = np.angle(mu.atoms) % (2 * np.pi)
    assert mu.mass_where(ang < np.pi / 2) == pytest.approx(0.25, abs=1e-12)


def test_equilibrium_bernoulli_components():
    mu = equilibrium_measure(Lemniscate(BERN, 1.0), 200)
    assert mu.mass_where(mu.atoms.real > 0) == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(np.abs(mu.atoms**2 - 1), 1.0, atol=1e-10)


def test_equilibrium_fallback_is_leja():
    sq = Polygon((1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j))
    mu = equilibrium_measure(sq, 50)
    assert mu.meta["kind"] == "LejaEmpirical" and len(mu) == 50


def test_log_potential_examples():
    assert log_potential(EmpiricalMeasure([0], [1]), math.e) == pytest.approx(1.0)
    mu = EmpiricalMeasure([1, -1], [0.5, 0.5])
    assert log_potential(mu, 3.0) == pytest.approx(0.5 * math.log(8))
    assert log_potential(mu, 1.0) == -math.inf
    eq = equilibrium_measure(Interval(-2, 2), 4000)
    assert log_potential(eq, 3.0) == pytest.approx(math.log(GOLDEN), abs=1e-6)


@given(st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_log_potential_near_infinity(k, seed):
    r = np.random.default_rng(seed)
    mu = EmpiricalMeasure(r.uniform(-1, 1, k) + 1j * r.uniform(-1, 1, k), r.uniform(0.1, 1, k))
    z = 1e4 * np.exp(1j * r.uniform(0, 2 * np.pi))
    assert abs(log_potential(mu, z) - math.log(abs(z))) <= 3 / abs(z)


def test_balayage_examples():
    disk = Disk(0, 1)
    ring = far_ring(disk)
    assert balayage_residual(EmpiricalMeasure([0], [1]), disk, ring) <= 1e-12
    assert balayage_residual(EmpiricalMeasure([0], [1]), disk, [1.5, 3j]) <= 1e-12
    assert balayage_residual(equilibrium_measure(disk, 256), disk, ring) <= 1e-12
    lem = Lemniscate(BERN, 1.0)
    ring4 = 4 * np.exp(2j * np.pi * np.arange(64) / 64)
    assert balayage_residual(EmpiricalMeasure([1, -1], [0.5, 0.5]), lem, ring4) <= 1e-2
    with pytest.raises(ValueError):
        balayage_residual(EmpiricalMeasure([0], [1]), disk, [0.5])


# Parreau-Widom sums -------------------------------------------------------------


def test_pw_examples():
    assert pw_sum(Interval(-1, 4)).pw_sum == 0.0
    r = pw_sum(PolynomialPreimage(P2))
    np.testing.assert_allclose(r.critical_points, [0.0], atol=1e-10)
    assert r.pw_sum == pytest.approx(0.5 * math.log(GOLDEN), abs=1e-8)
    d = pw_sum(Disk(0, 1))
    assert d.pw_sum == 0.0 and "CSC" in d.flags


def test_pw_union_consistency():
    u = RealIntervalUnion(((-math.sqrt(5), -1.0), (1.0, math.sqrt(5))))
    assert pw_sum(u).pw_sum == pytest.approx(0.5 * math.log(GOLDEN), abs=1e-7)


def test_pw_report_invariants():
    u = RealIntervalUnion(((-3.0, -2.0), (-1.0, 0.5), (1.0, 2.5)))
    r = pw_sum(u)
    assert r.pw_sum == pytest.approx(float(np.sum(r.green_values)))
    for x, (a, b) in zip(r.critical_points, u.gaps):
        assert a < x < b
    assert np.all(r.green_values > 0)
