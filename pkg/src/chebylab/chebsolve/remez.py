"""Remez exchange for monic minimax polynomials on finite unions of intervals."""
from __future__ import annotations

import numpy as np
from numpy.polynomial import chebyshev as C

from ..poly import ComplexPoly, compose
from ..sets import Interval, PolynomialPreimage, RealIntervalUnion, level_set_reduce
from .types import (
    ChebyshevSolution,
    DefectStagnationError,
    ExchangeCyclingError,
    IterationCapError,
    SolverConfig,
    capacity_of,
)


def real_intervals(spec):
    """Sorted list of ``(a, b)`` pieces for a real set."""
    spec = level_set_reduce(spec)
    if isinstance(spec, Interval):
        return [(spec.a, spec.b)]
    if isinstance(spec, RealIntervalUnion):
        return [tuple(map(float, iv)) for iv in spec.intervals]
    if isinstance(spec, PolynomialPreimage) and spec.is_real:
        return [tuple(map(float, b)) for b in spec.bands()]
    raise TypeError(f"solve_real needs a real set, got {spec.variant}")


class _Scaled:
    """Monic polynomial on ``[lo, hi]`` written in the Chebyshev basis of ``u``."""

    def __init__(self, lo, hi, n):
        self.mid, self.half, self.n = (lo + hi) / 2, (hi - lo) / 2, n
        lead = np.zeros(n + 1)
        lead[n] = 2.0 ** (1 - n) if n else 1.0
        self.lead = lead

    def u(self, x):
        return (np.asarray(x, float) - self.mid) / self.half

    def series(self, c):
        return self.lead + np.concatenate([c, [0.0]])

    def values(self, c, x):
        return C.chebval(self.u(x), self.series(c))

    def solve_reference(self, ref):
        """Coefficients and levelled error ``h`` with ``p(x_j) = (-1)^j h``."""
        n = self.n
        V = C.chebvander(self.u(ref), n)
        M = np.column_stack([V[:, :n], -((-1.0) ** np.arange(n + 1))])
        sol = np.linalg.solve(M, -V @ self.lead)
        return sol[:n], sol[n]

    def local_extrema(self, c, pieces):
        """Interval endpoints plus interior critical points inside each piece."""
        d = C.chebder(self.series(c))
        crit = C.chebroots(d) if len(d) > 1 else np.array([])
        crit = crit[np.abs(crit.imag) < 1e-10].real * self.half + self.mid
        pts = []
        for a, b in pieces:
            pts.extend([a, b])
            pts.extend(crit[(crit > a) & (crit < b)])
        return np.unique(np.asarray(pts, float))

    def to_power(self, c):
        coeffs = C.cheb2poly(self.series(c)) * self.half**self.n
        px = ComplexPoly(coeffs / coeffs[-1])
        T = compose(px, ComplexPoly([-self.mid / self.half, 1.0 / self.half]))
        return ComplexPoly.monic(T.coeffs.real.astype(complex))


def _exchange(x, vals, n):
    """Pick ``n + 1`` alternating points keeping the global maximum."""
    s = np.sign(vals)
    keep_x, keep_v = [x[0]], [vals[0]]
    for xi, vi, si in zip(x[1:], vals[1:], s[1:]):
        if si == np.sign(keep_v[-1]):
            if abs(vi) > abs(keep_v[-1]):
                keep_x[-1], keep_v[-1] = xi, vi
        else:
            keep_x.append(xi)
            keep_v.append(vi)
    keep_x, keep_v = np.array(keep_x), np.array(keep_v)
    if keep_x.size < n + 1:
        return None
    while keep_x.size > n + 1:
        imax = int(np.argmax(np.abs(keep_v)))
        # drop the smaller end unless it holds the global maximum
        if abs(keep_v[0]) <= abs(keep_v[-1]) and imax != 0 or imax == keep_x.size - 1:
            keep_x, keep_v = keep_x[1:], keep_v[1:]
        else:
            keep_x, keep_v = keep_x[:-1], keep_v[:-1]
    return keep_x


def _initial_reference(pieces, n):
    """``n + 1`` points spread like the equilibrium measure (Leja on a fine grid)."""
    from ..potential import leja_sequence

    grid = []
    for a, b in pieces:
        t = np.cos(np.pi * np.arange(400) / 399)
        grid.append((a + b) / 2 + (b - a) / 2 * t)
    grid = np.unique(np.concatenate(grid))
    return np.sort(leja_sequence(grid.astype(complex), n + 1)[0].real)


def solve_real(spec, n, cfg=None):
    """Monic minimax polynomial on a real set by multi-point Remez exchange.

    Parameters
    ----------
    spec : Interval, RealIntervalUnion or real PolynomialPreimage
    n : int
    cfg : SolverConfig, optional

    Returns
    -------
    ChebyshevSolution
        Real coefficients; converged when the alternation defect
        ``(max|p| - |h|) / max|p|`` falls below ``rel_tol``.

    Raises
    ------
    ExchangeCyclingError, DefectStagnationError, IterationCapError
    """
    cfg = cfg or SolverConfig()
    cfg.check_degree(n)
    pieces = real_intervals(spec)
    lo, hi = pieces[0][0], pieces[-1][1]
    S = _Scaled(lo, hi, n)
    ref = _initial_reference(pieces, n)
    rng = np.random.default_rng(0)
    seen = set()
    restarts, best_defect, stall = 0, np.inf, 0
    max_iters = min(cfg.max_iters, 500)
    for it in range(1, max_iters + 1):
        c, h = S.solve_reference(ref)
        ext = S.local_extrema(c, pieces)
        vals = S.values(c, ext)
        pmax = float(np.max(np.abs(vals)))
        defect = (pmax - abs(h)) / pmax
        if defect < cfg.rel_tol:
            break
        new = _exchange(ext, vals, n)
        key = tuple(np.round(new, 14)) if new is not None else None
        if new is None or key in seen:
            restarts += 1
            if restarts > 5:
                raise ExchangeCyclingError(f"Remez reference cycled ({restarts} restarts)", {"defect": defect})
            width = hi - lo
            new = np.sort(np.clip(ref + 1e-3 * width * rng.standard_normal(ref.size), lo, hi))
            seen.clear()
        else:
            seen.add(key)
        if defect < best_defect * (1 - 1e-3):
            best_defect, stall = defect, 0
        else:
            stall += 1
            if stall > 50:
                raise DefectStagnationError(f"alternation defect stuck at {defect:.3e}", {"defect": defect})
        ref = new
    else:
        raise IterationCapError(f"Remez did not converge in {max_iters} exchanges", {"defect": defect})

    T = S.to_power(c)
    ext_pts = ext[np.abs(vals) >= (1 - cfg.extreme_tol) * pmax]
    unit = S.half**n
    pmax, h = pmax * unit, h * unit
    cap, est = capacity_of(spec)
    return ChebyshevSolution(
        n=n,
        T=T,
        t_n=pmax,
        widom=pmax / cap**n,
        extreme_points=ext_pts.astype(complex),
        method="Remez",
        diagnostics={
            "iterations": it,
            "discretization": int(ext.size),
            "residual_spread": float(defect),
            "levelled_error": float(abs(h)),
            "restarts": restarts,
        },
        capacity=cap,
        capacity_estimated=est,
    )
