import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chebylab.chebsolve import solve_complex
from chebylab.poly import ComplexPoly
from chebylab.sets import ConfocalEllipse, Disk, Interval, KochAntenna, Lemniscate, Polygon, PolynomialPreimage
from chebylab.widomlab import (
    CSV_COLUMNS,
    TWBoundReport,
    antenna_scan,
    antenna_schedule,
    interval_levelset_ratio,
    lemniscate_bound,
    levelset_monotonicity,
    levelset_real_bound,
    reports_to_csv,
    tw_real_bound,
    widom_scan,
)

BERN = ComplexPoly([-1, 0, 1])
P2 = ComplexPoly([-3, 0, 1])
PW2 = 0.5 * math.log((3 + math.sqrt(5)) / 2)


def test_scan_interval():
    scan = widom_scan(Interval(-2, 2), range(1, 9))
    np.testing.assert_allclose(list(scan.widoms().values()), 2.0, rtol=1e-12)
    assert all(r.method == "ClosedForm" for r in scan.rows)
    assert scan.check() == []


def test_scan_lemniscate_even_degrees():
    scan = widom_scan(Lemniscate(BERN, 1.0), [2, 4, 6])
    np.testing.assert_allclose(list(scan.widoms().values()), 1.0, rtol=1e-14)


def test_scan_ellipse():
    scan = widom_scan(ConfocalEllipse(0.5), range(1, 7))
    for r in scan.rows:
        assert r.widom == pytest.approx(1 + math.exp(-r.n), rel=1e-12)


def test_scan_csv_layout():
    text = widom_scan(Interval(-2, 2), [1, 2]).to_csv()
    lines = text.split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1].startswith("Interval,1,0,2,1,2,")
    assert "\r" not in text


def test_scan_records_failures():
    from chebylab.chebsolve import SolverConfig

    scan = widom_scan(Polygon((1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j)), [3, 70], SolverConfig(m0=1024))
    assert scan.rows[1].method == "failed" and scan.rows[1].error
    assert 3 in scan.widoms() and 70 not in scan.widoms()


def test_bound_report_pass_rule():
    assert TWBoundReport("x", 1.0, 1.0).passed
    assert TWBoundReport("x", 1.0 + 5e-10, 1.0).passed
    assert not TWBoundReport("x", 1.0 + 2e-9, 1.0).passed
    assert TWBoundReport("x", 1.0, 3.0).slack == 2.0


def test_lemniscate_bound_bernoulli():
    reports, Q, base = lemniscate_bound(BERN, 1.0)
    assert base[0] == 1.0
    assert Q == max(base) == pytest.approx(base[1])
    assert all(r.passed for r in reports)
    for r in reports:
        if r.n % 2 == 0:
            assert r.lhs / r.cap_pow == pytest.approx(1.0)
            assert r.slack / r.cap_pow == pytest.approx(Q - 1.0)
    w = {r.n: r.lhs / r.cap_pow for r in reports}
    for m in w:
        if m > 2:
            j = m % 2
            assert w[m] <= (w[j] if j else 1.0) * (1 + 1e-7)


def test_lemniscate_bound_rejects_linear():
    with pytest.raises(ValueError):
        lemniscate_bound(ComplexPoly([0, 1]), 1.0)


def test_monotonicity_interval():
    ok, table = levelset_monotonicity(Interval(-2, 2), [0.1, 0.3, 0.5], 4)
    assert ok
    np.testing.assert_allclose([w for _, w, _ in table], [1 + math.exp(-8 * a) for a in (0.1, 0.3, 0.5)], rtol=1e-12)


def test_monotonicity_lemniscate_constant():
    ok, table = levelset_monotonicity(Lemniscate(BERN, 1.0), [0.1, 0.2, 0.4], 4)
    assert ok
    np.testing.assert_allclose([w for _, w, _ in table], 1.0, rtol=1e-12)


def test_monotonicity_period_two():
    ok, table = levelset_monotonicity(PolynomialPreimage(P2), [0.05, 0.1, 0.2, 0.4], 2)
    assert ok
    np.testing.assert_allclose([w for _, w, _ in table], [1 + math.exp(-4 * a) for a in (0.05, 0.1, 0.2, 0.4)], rtol=1e-12)


def test_monotonicity_requires_increasing():
    with pytest.raises(ValueError):
        levelset_monotonicity(Interval(-2, 2), [0.3, 0.1], 2)


def test_levelset_real_bound_period_two():
    reports = levelset_real_bound(PolynomialPreimage(P2), [0.1, 0.3], [2])
    assert len(reports) == 4 and all(r.passed for r in reports)
    for r in reports:
        assert r.lhs == pytest.approx(2 * math.cosh(2 * r.alpha))
        if r.bound_name == "levelset-nalpha":
            assert r.rhs == pytest.approx((1 + math.exp(-2 * r.alpha)) * math.exp(PW2) * math.exp(2 * r.alpha))


def test_levelset_real_bound_interval_slack():
    for r in levelset_real_bound(Interval(-2, 2), [0.2], [1, 3, 5]):
        cp = r.cap_pow
        if r.bound_name == "levelset-nalpha":
            assert r.slack == pytest.approx((math.exp(-r.n * r.alpha) - math.exp(-2 * r.n * r.alpha)) * cp)
        else:
            assert r.slack == pytest.approx(0.0, abs=1e-12 * cp)
        assert r.passed


def test_levelset_real_bound_large_alpha_limit():
    (r, _) = levelset_real_bound(PolynomialPreimage(P2), [8.0], [2])
    assert r.rhs / r.cap_pow == pytest.approx(math.exp(PW2), rel=1e-6)
    assert r.lhs / r.cap_pow <= math.exp(PW2)


def test_tw_real_bound():
    for r in tw_real_bound(Interval(-2, 2), range(1, 7)):
        assert r.slack == pytest.approx(0.0, abs=1e-12) and r.passed
    reps = tw_real_bound(PolynomialPreimage(P2), [2, 3, 4])
    assert all(r.passed for r in reps)
    assert reps[0].rhs == pytest.approx(2 * math.exp(PW2))
    assert reps[1].method == "Remez"


def test_tw_real_bound_rejects_complex_sets():
    with pytest.raises(TypeError):
        tw_real_bound(Disk(0, 1), [1])


def test_reports_csv():
    text = reports_to_csv(tw_real_bound(Interval(-2, 2), [1]), "Interval")
    head, row = text.strip().split("\n")
    assert head.endswith("bound_name,pass") and row.endswith("tw-real,true")


def test_interval_levelset_ratio():
    for n in (1, 4, 9):
        for a in (0.1, 0.7):
            assert interval_levelset_ratio(n, a) == pytest.approx(0.5 * (1 + math.exp(-2 * n * a)), rel=1e-10)


@given(st.floats(0.2, 5.0), st.integers(1, 10))
def test_widom_scale_covariance(lam, n):
    for spec, scaled in ((Disk(0, 1), Disk(0, lam)), (Interval(-2, 2), Interval(-2 * lam, 2 * lam))):
        a = widom_scan(spec, [n]).rows[0].widom
        b = widom_scan(scaled, [n]).rows[0].widom
        assert b == pytest.approx(a, rel=1e-8)


def test_scale_covariance_of_solver():
    sq = Polygon((1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j))
    big = Polygon(tuple(2.5 * v for v in sq.vertices))
    for n in (3, 5):
        a, b = solve_complex(sq, n), solve_complex(big, n)
        assert b.t_n == pytest.approx(a.t_n * 2.5**n, rel=1e-6)


def test_antenna_schedules():
    assert antenna_schedule("snowflake", 3) == (1.0, 1.0)
    np.testing.assert_allclose(antenna_schedule("geometric", 4), [1 / 3, 1 / 9, 1 / 27])
    with pytest.raises(ValueError):
        antenna_schedule("bogus", 2)


def test_antenna_scan_shapes():
    scans = antenna_scan("geometric", [1, 2], 0.4, [2, 3])
    assert [s.label for s in scans] == ["koch-geometric-d1", "koch-geometric-d2"]
    for s in scans:
        assert [r.n for r in s.rows] == [2, 3]
        assert all("estimated-capacity" in r.method for r in s.rows)


def test_antenna_matches_hexagram_polygon():
    koch = KochAntenna((1.0,), 2)
    hexagram = Polygon(tuple(koch.boundary_vertices()))
    for n in (2, 3, 4):
        a = solve_complex(koch, n).t_n
        b = solve_complex(hexagram, n).t_n
        assert a == pytest.approx(b, rel=1e-3)
