"""Scikit-learn style wrappers.

Only two objects fit the estimator shape naturally: a capacity estimate
learned from a boundary point cloud, and a Chebyshev polynomial fitted to a
set.  Both follow ``fit`` / ``predict`` / ``score`` with hyperparameters in
``__init__`` and learned state in trailing-underscore attributes.
"""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .chebsolve import SolverConfig, closed_form, has_closed_form, solve_complex, solve_real
from .poly import evaluate
from .potential import _extrapolated_log_capacity, leja_sequence
from .sets import SetSpec, level_set_reduce


def check_complex_points(X):
    """Accept complex arrays of any shape or real ``(m, 2)`` arrays of ``(re, im)``."""
    X = np.asarray(X)
    if np.iscomplexobj(X):
        z = X.ravel()
    elif X.ndim == 2 and X.shape[1] == 2:
        z = X[:, 0] + 1j * X[:, 1]
    elif X.ndim == 1 or (X.ndim == 2 and X.shape[1] == 1):
        z = X.ravel().astype(complex)
    else:
        raise ValueError(f"expected complex points or an (m, 2) real array, got shape {X.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("points must be finite")
    return z.astype(complex)


class LejaCapacity(BaseEstimator):
    """Capacity and Green's function estimated from Leja points of a cloud.

    Parameters
    ----------
    n_points : int, default=200
        Number of Leja points drawn from the training cloud.

    Attributes
    ----------
    leja_points_ : ndarray of complex
    capacity_ : float
    converged_ : bool
        Whether the two last extrapolations agree within 1 percent.
    """

    def __init__(self, n_points=200):
        self.n_points = n_points

    def fit(self, X, y=None):
        z = check_complex_points(X)
        if self.n_points < 4:
            raise ValueError("n_points must be at least 4")
        pts, logd = leja_sequence(z, min(self.n_points, z.size))
        est, prev = _extrapolated_log_capacity(logd)
        self.leja_points_ = pts
        self.log_capacity_ = est
        self.capacity_ = math.exp(est)
        self.converged_ = abs(math.expm1(est - prev)) <= 0.01
        return self

    def predict(self, X):
        """Green's function estimate, clamped at zero."""
        check_is_fitted(self, "leja_points_")
        z = check_complex_points(X)
        with np.errstate(divide="ignore"):
            u = np.mean(np.log(np.abs(z[:, None] - self.leja_points_)), axis=1)
        return np.maximum(u - self.log_capacity_, 0.0)

    def score(self, X, y=None):
        """Negative mean Green value on ``X``; zero when ``X`` lies on the set."""
        return -float(np.mean(self.predict(X)))


class ChebyshevPolynomial(BaseEstimator):
    """The degree-``degree`` Chebyshev polynomial of a set.

    ``fit`` takes the set itself (a :class:`SetSpec`); point clouds are not
    enough because the solver refines its own boundary sample.

    Parameters
    ----------
    degree : int
    method : {"auto", "closed", "remez", "lawson"}
    rel_tol : float
    seed : int

    Attributes
    ----------
    solution_ : ChebyshevSolution
    coef_ : ndarray of complex
        Ascending power coefficients.
    norm_ : float
    widom_ : float
    """

    def __init__(self, degree=4, method="auto", rel_tol=1e-8, seed=0):
        self.degree = degree
        self.method = method
        self.rel_tol = rel_tol
        self.seed = seed

    def fit(self, X, y=None):
        if not isinstance(X, SetSpec):
            raise TypeError("ChebyshevPolynomial.fit expects a SetSpec")
        cfg = SolverConfig(rel_tol=self.rel_tol)
        method = self.method
        if method == "auto":
            if has_closed_form(X, self.degree):
                method = "closed"
            elif level_set_reduce(X).is_real:
                method = "remez"
            else:
                method = "lawson"
        if method == "closed":
            sol = closed_form(X, self.degree)
        elif method == "remez":
            sol = solve_real(level_set_reduce(X), self.degree, cfg)
        elif method == "lawson":
            sol = solve_complex(X, self.degree, cfg, seed=self.seed)
        else:
            raise ValueError(f"unknown method {self.method!r}")
        self.solution_ = sol
        self.coef_ = np.asarray(sol.T.coeffs)
        self.norm_ = sol.t_n
        self.widom_ = sol.widom
        return self

    def predict(self, X):
        """``T_n`` evaluated at the points."""
        check_is_fitted(self, "solution_")
        return evaluate(self.solution_.T, check_complex_points(X))

    def score(self, X, y=None):
        """``-max |T_n(X)| / t_n``; equals ``-1`` on a sample hitting an extreme point."""
        return -float(np.max(np.abs(self.predict(X)))) / self.norm_
