import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from chebylab.estimators import ChebyshevPolynomial, LejaCapacity, check_complex_points
from chebylab.poly import ComplexPoly
from chebylab.sets import Disk, Interval, Lemniscate, Polygon, sample_boundary


def test_check_complex_points_layouts():
    z = np.array([1 + 2j, -1j])
    np.testing.assert_array_equal(check_complex_points(z), z)
    np.testing.assert_array_equal(check_complex_points([[1, 2], [0, -1]]), z)
    np.testing.assert_array_equal(check_complex_points([1.0, 2.0]), [1, 2])
    with pytest.raises(ValueError):
        check_complex_points(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        check_complex_points([np.nan])


def test_leja_capacity_estimator():
    pts = sample_boundary(Disk(0, 2), 3200).points
    est = LejaCapacity(n_points=200).fit(pts)
    assert est.capacity_ == pytest.approx(2.0, rel=0.01) and est.converged_
    g = est.predict([6.0, 0.0])
    assert g[0] == pytest.approx(math.log(3), abs=0.02) and g[1] <= 1e-3
    assert est.score(pts) > -0.01


def test_leja_estimator_not_fitted():
    with pytest.raises(NotFittedError):
        LejaCapacity().predict([1.0])


def test_chebyshev_estimator_methods():
    m = ChebyshevPolynomial(degree=4).fit(Interval(-2, 2))
    assert m.solution_.method == "ClosedForm" and m.norm_ == pytest.approx(2)
    m = ChebyshevPolynomial(degree=3, method="remez").fit(Interval(-2, 2))
    np.testing.assert_allclose(m.coef_.real, [0, -3, 0, 1], atol=1e-9)
    m = ChebyshevPolynomial(degree=2, method="lawson").fit(Lemniscate(ComplexPoly([-1, 0, 1]), 1.0))
    assert m.widom_ == pytest.approx(1.0, abs=1e-6)
    pts = sample_boundary(Disk(0, 1), 64).points
    m = ChebyshevPolynomial(degree=3).fit(Disk(0, 1))
    np.testing.assert_allclose(m.predict(pts), pts**3, atol=1e-12)
    assert m.score(pts) == pytest.approx(-1.0)


def test_chebyshev_estimator_errors():
    with pytest.raises(TypeError):
        ChebyshevPolynomial().fit(np.zeros(5))
    with pytest.raises(ValueError):
        ChebyshevPolynomial(method="newton").fit(Polygon((1, 1j, -1)))


def test_sklearn_params_and_clone():
    m = ChebyshevPolynomial(degree=7, method="lawson")
    assert m.get_params() == {"degree": 7, "method": "lawson", "rel_tol": 1e-8, "seed": 0}
    c = clone(m).set_params(degree=3)
    assert c.degree == 3 and m.degree == 7
    assert clone(LejaCapacity(n_points=50)).get_params() == {"n_points": 50}
