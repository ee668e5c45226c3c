"""Exact Chebyshev polynomials for the families where they are known."""
from __future__ import annotations

import math

import numpy as np

from ..poly import ComplexPoly, compose
from ..sets import (
    ConfocalEllipse,
    Disk,
    Interval,
    Lemniscate,
    LevelSet,
    PolynomialPreimage,
    chebyshev_interval_poly,
    level_set_reduce,
)
from .types import ChebyshevSolution, NotAvailable, capacity_of, extreme_points_on


def _affine_interval_poly(n, mid, quarter):
    """``quarter^n T_n((z - mid) / quarter)`` for the ``[-2, 2]`` polynomial ``T_n``."""
    inner = ComplexPoly([-mid / quarter, 1.0 / quarter])
    return ComplexPoly.monic((compose(chebyshev_interval_poly(n), inner) * quarter**n).coeffs)


def _family_polynomial(spec, n):
    """Return ``(T, t_n)`` or raise :class:`NotAvailable`."""
    if isinstance(spec, Disk):
        return ComplexPoly.monomial(n, spec.center), spec.radius**n
    if isinstance(spec, Interval):
        q = spec.half / 2
        return _affine_interval_poly(n, spec.mid, q), 2.0 * q**n
    if isinstance(spec, ConfocalEllipse):
        a = spec.alpha
        return chebyshev_interval_poly(n), math.exp(n * a) + math.exp(-n * a)
    if isinstance(spec, Lemniscate):
        d = spec.P.degree
        if n % d:
            raise NotAvailable(f"lemniscate of degree {d}: no closed form at n={n}")
        k = n // d
        return spec.P**k, spec.alpha**k
    if isinstance(spec, PolynomialPreimage):
        d = spec.P.degree
        if n % d:
            raise NotAvailable(f"preimage of degree {d}: no closed form at n={n}")
        return compose(chebyshev_interval_poly(n // d), spec.P), 2.0
    if isinstance(spec, LevelSet):
        base, a = spec.base, spec.alpha
        if isinstance(base, PolynomialPreimage):
            T, _ = _family_polynomial(base, n)
            return T, 2.0 * math.cosh(n * a)
        if isinstance(base, Interval):
            q = base.half / 2
            return _affine_interval_poly(n, base.mid, q), q**n * (math.exp(n * a) + math.exp(-n * a))
    raise NotAvailable(f"no closed form for {spec.variant} at n={n}")


def closed_form(spec, n):
    """Exact Chebyshev polynomial of degree ``n``.

    Covers disks, intervals, confocal ellipses, lemniscates and polynomial
    preimages of ``[-2, 2]`` at multiples of their degree, and level sets of
    the last two (and of intervals).

    Raises
    ------
    NotAvailable
        For every other (family, n) pair; nothing is approximated.
    """
    if n < 1:
        raise ValueError("degree must be at least 1")
    spec = level_set_reduce(spec)
    T, t = _family_polynomial(spec, n)
    cap, est = capacity_of(spec)
    ext = extreme_points_on(T, t, spec)
    return ChebyshevSolution(
        n=n,
        T=T,
        t_n=float(t),
        widom=float(t / cap**n),
        extreme_points=ext,
        method="ClosedForm",
        diagnostics={"iterations": 0, "discretization": 0, "residual_spread": 0.0},
        capacity=cap,
        capacity_estimated=est,
    )


def has_closed_form(spec, n):
    try:
        _family_polynomial(level_set_reduce(spec), n)
    except NotAvailable:
        return False
    return True


def interval_nodes(n):
    """Extreme points ``2 cos(pi k / n)`` of the ``[-2, 2]`` polynomial."""
    return 2 * np.cos(np.pi * np.arange(n + 1) / n)
