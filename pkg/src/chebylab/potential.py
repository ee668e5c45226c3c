"""Capacities, Green's functions, equilibrium measures and potentials.

Closed forms are used for every family where they are known; anything
else falls back to an empirical model built from Leja points on a dense
boundary sample.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .poly import evaluate
from .sets import (
    ConfocalEllipse,
    Disk,
    DiskPlusSpike,
    Interval,
    JuliaCauliflower,
    KochAntenna,
    Lemniscate,
    LevelSet,
    Polygon,
    PolynomialPreimage,
    RealIntervalUnion,
    convex_hull,
    joukowski_inverse,
    level_set_reduce,
    sample_boundary,
)

LEJA_DEFAULT = 200


@dataclass(frozen=True)
class GreenModel:
    """Capacity plus a Green's function evaluator.

    ``raw`` is the unclamped harmonic extension; :meth:`green` clamps it at
    zero, which encodes regularity (the Green's function vanishes on and
    inside the set).
    """

    capacity: float
    raw: Callable
    kind: str
    variant: str
    leja_points: np.ndarray | None = None
    estimate: bool = False
    converged: bool = True

    def green(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.maximum(np.nan_to_num(self.raw(z), nan=0.0, neginf=0.0), 0.0)
        return g if g.ndim else float(g)

    def interior(self, z):
        """Points the model places on or inside the set."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.asarray(self.raw(np.asarray(z, complex))) <= 0.0

    @property
    def log_capacity(self):
        return math.log(self.capacity)


def green(model, z):
    return model.green(z)


# ---------------------------------------------------------------------------
# Leja points
# ---------------------------------------------------------------------------


def leja_sequence(points, n):
    """Greedy Leja ordering of ``n`` points from a candidate cloud.

    The first point is the earliest one of maximal modulus; each next point
    maximizes the sum of log distances to those already chosen (earliest
    index on ties).  Returns the points and ``log d_k`` for ``k = 1..n-1``,
    where ``d_k`` is the ``k``-th root of the product of distances.
    """
    pts = np.asarray(points, complex)
    if n > pts.size:
        raise ValueError(f"requested {n} Leja points from {pts.size} candidates")
    chosen = [int(np.argmax(np.abs(pts)))]
    with np.errstate(divide="ignore"):
        U = np.log(np.abs(pts - pts[chosen[0]]))
    U[chosen[0]] = -np.inf
    logd = np.empty(max(n - 1, 0))
    for k in range(1, n):
        i = int(np.argmax(U))
        logd[k - 1] = U[i] / k
        chosen.append(i)
        with np.errstate(divide="ignore"):
            U += np.log(np.abs(pts - pts[i]))
        U[i] = -np.inf
    return pts[chosen], logd


def leja_points(spec, n):
    """``n`` Leja points from a boundary sample of density ``16 n``."""
    s = sample_boundary(spec, max(16 * n, 16))
    return leja_sequence(s.points, n)[0]


def _extrapolated_log_capacity(logd):
    """Richardson step on the running minimum of ``log d_k``.

    ``d_k`` overshoots the capacity by roughly ``O(1/k)``; the envelope
    ``e(n) = min_{n/2 <= k <= n} d_k`` is extrapolated as ``2 e(n) - e(n/2)``
    in log scale.  Returns ``(estimate, previous_estimate)``.
    """
    n = logd.size + 1

    def env(m):
        m = max(m, 2)
        return float(np.min(logd[m // 2 - 1 : m - 1]))

    def extrap(m):
        return 2 * env(m) - env(m // 2)

    return extrap(n), extrap(n // 2)


def leja_capacity(spec, n=LEJA_DEFAULT):
    """Leja estimate of the capacity; returns ``(capacity, converged)``."""
    _, logd = leja_sequence(sample_boundary(spec, 16 * n).points, n)
    est, prev = _extrapolated_log_capacity(logd)
    return math.exp(est), abs(math.expm1(est - prev)) <= 0.01


def _leja_model(spec, n):
    a, logd = leja_sequence(sample_boundary(spec, 16 * n).points, n)
    log_cap, prev = _extrapolated_log_capacity(logd)
    converged = abs(math.expm1(log_cap - prev)) <= 0.01

    def raw(z):
        z = np.asarray(z, complex)
        with np.errstate(divide="ignore"):
            u = np.mean(np.log(np.abs(z[..., None] - a)), axis=-1)
        return u - log_cap

    return GreenModel(math.exp(log_cap), raw, "LejaEmpirical", spec.variant, a, True, converged)


# ---------------------------------------------------------------------------
# Green's functions
# ---------------------------------------------------------------------------


def _log_abs(z):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(z))


class FiniteGapGreen:
    """Green's function of a finite union of real intervals by quadrature.

    ``G(z) = Re int_{b} ^z q(s) / sqrt(R(s)) ds`` where ``R`` is the product of
    ``(s - e)`` over all endpoints, ``b`` is the rightmost endpoint and the
    monic ``q`` of degree ``#gaps`` is fixed by requiring the integral over
    every gap to vanish (so ``G`` is single valued).
    """

    def __init__(self, intervals, nodes=96):
        self.intervals = [tuple(map(float, iv)) for iv in intervals]
        self.ends = np.array([e for iv in self.intervals for e in iv])
        self.right = self.ends[-1]
        self.span = self.ends[-1] - self.ends[0]
        th, wt = np.polynomial.legendre.leggauss(nodes)
        th, wt = 0.5 * np.pi * (th + 1), 0.5 * np.pi * wt
        gaps = [(b0, a1) for (_, b0), (a1, _) in zip(self.intervals, self.intervals[1:])]
        g = len(gaps)
        M = np.zeros((g, g))
        rhs = np.zeros(g)
        for j, (b0, a1) in enumerate(gaps):
            mid, half = (a1 + b0) / 2, (a1 - b0) / 2
            x = mid + half * np.cos(th)
            others = self.ends[(self.ends != b0) & (self.ends != a1)]
            phi = 1.0 / np.sqrt(np.abs(np.prod(x[:, None] - others[None, :], axis=1)))
            for k in range(g):
                M[j, k] = np.sum(wt * phi * x**k)
            rhs[j] = -np.sum(wt * phi * x**g)
        beta = np.linalg.solve(M, rhs) if g else np.array([])
        self.q = np.concatenate([beta, [1.0]])
        self.log_capacity = -self._robin_integral()
        self._base = self._first_leg()

    def _qval(self, s):
        return np.polynomial.polynomial.polyval(s, self.q)

    def _sqrtR(self, s, skip_right=False):
        ends = self.ends[:-1] if skip_right else self.ends
        out = np.ones(np.shape(s), complex)
        for e in ends:
            out = out * np.sqrt(s - e + 0j)
        return out

    def _robin_integral(self):
        b = self.right

        def near(u):  # s = b + u^2 removes the endpoint singularity
            s = b + u * u
            return float((2 * self._qval(s) / self._sqrtR(s, True)).real - 2 * u / (u * u + 1))

        def far(s):
            return float((self._qval(s) / self._sqrtR(s)).real - 1 / (s - b + 1))

        i1 = integrate.quad(near, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        i2 = integrate.quad(far, b + 1.0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        return i1 + i2

    def _first_leg(self):
        b, L = self.right, self.span

        def f(u):
            s = b + u * u
            return float((2 * self._qval(s) / self._sqrtR(s, True)).real)

        return integrate.quad(f, 0.0, np.sqrt(L), epsabs=1e-14, epsrel=1e-13, limit=200)[0]

    def _segment(self, A, B):
        d = B - A

        def f(t):
            s = A + t * d
            return (self._qval(s) / self._sqrtR(s) * d).real

        return integrate.quad_vec(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=400)[0]

    def raw(self, z):
        z = np.asarray(z, complex)
        shape = z.shape
        z = z.ravel()
        z = np.where(z.imag < 0, np.conj(z), z)
        out = np.full(z.shape, float(self._base))
        if z.size:
            P0 = np.full(z.shape, self.right + self.span, complex)
            H = np.maximum(z.imag, self.span)
            P1 = P0 + 1j * H
            P2 = z.real + 1j * H
            out += self._segment(P0, P1) + self._segment(P1, P2) + self._segment(P2, z)
        return out.reshape(shape)

    def critical_points(self):
        """Zeros of ``q``: one inside each gap."""
        r = np.polynomial.polynomial.polyroots(self.q)
        return np.sort(r.real)


def green_model(spec, n_leja=LEJA_DEFAULT):
    """Closed-form Green's model when the family has one, Leja otherwise."""
    spec = level_set_reduce(spec)
    v = spec.variant
    if isinstance(spec, Interval):
        mid, quarter = spec.mid, spec.half / 2
        return GreenModel(quarter, lambda z: _log_abs(joukowski_inverse((z - mid) / quarter)), "ClosedForm", v)
    if isinstance(spec, Disk):
        c, r = spec.center, spec.radius
        return GreenModel(r, lambda z: _log_abs((z - c) / r), "ClosedForm", v)
    if isinstance(spec, ConfocalEllipse):
        a = spec.alpha
        return GreenModel(math.exp(a), lambda z: _log_abs(joukowski_inverse(z)) - a, "ClosedForm", v)
    if isinstance(spec, Lemniscate):
        P, a, n = spec.P, spec.alpha, spec.P.degree
        return GreenModel(a ** (1.0 / n), lambda z: _log_abs(evaluate(P, z) / a) / n, "ClosedForm", v)
    if isinstance(spec, PolynomialPreimage):
        P, n = spec.P, spec.P.degree
        return GreenModel(1.0, lambda z: _log_abs(joukowski_inverse(evaluate(P, z))) / n, "ClosedForm", v)
    if isinstance(spec, LevelSet):
        base = green_model(spec.base, n_leja)
        a = spec.alpha
        return GreenModel(
            math.exp(a) * base.capacity,
            lambda z: base.raw(z) - a,
            base.kind,
            v,
            base.leja_points,
            base.estimate,
            base.converged,
        )
    if isinstance(spec, RealIntervalUnion):
        fg = FiniteGapGreen(spec.intervals)
        return GreenModel(math.exp(fg.log_capacity), fg.raw, "FiniteGapQuadrature", v)
    if isinstance(spec, JuliaCauliflower):
        return GreenModel(1.0, _cauliflower_green, "ClosedForm", v)
    return _leja_model(spec, n_leja)


def _cauliflower_green(z, iters=200, escape=1e8):
    """Escape-rate Green's function of ``z^2 + z``: ``lim 2^-k log|f^k(z)|``."""
    z = np.array(z, dtype=complex, copy=True)
    shape = z.shape
    z = z.ravel()
    g = np.full(z.shape, -np.inf)
    alive = np.ones(z.shape, bool)
    for k in range(1, iters + 1):
        z[alive] = z[alive] * z[alive] + z[alive]
        out = alive & (np.abs(z) > escape)
        # log|f^k| ~ 2^k G + log|1 + O(1/z)|; one more exact step sharpens it
        g[out] = np.log(np.abs(z[out] + 0.5)) / 2.0**k
        alive &= ~out
        if not alive.any():
            break
    return g.reshape(shape)


def capacity(spec, n_leja=LEJA_DEFAULT):
    """Logarithmic capacity: closed form per family or a Leja estimate."""
    return green_model(spec, n_leja).capacity


# ---------------------------------------------------------------------------
# measures and potentials
# ---------------------------------------------------------------------------


@dataclass
class EmpiricalMeasure:
    """Weighted point cloud; masses are normalized to sum to one."""

    atoms: np.ndarray
    masses: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.atoms = np.atleast_1d(np.asarray(self.atoms, complex))
        m = np.atleast_1d(np.asarray(self.masses, float))
        if m.shape != self.atoms.shape:
            raise ValueError("atoms and masses must have the same length")
        if np.any(m <= 0):
            raise ValueError("masses must be positive")
        total = m.sum()
        if abs(total - 1.0) > 1e-12:
            m = m / total
        self.masses = m

    @classmethod
    def uniform(cls, atoms, **meta):
        atoms = np.atleast_1d(np.asarray(atoms, complex))
        return cls(atoms, np.full(atoms.size, 1.0 / atoms.size), dict(meta))

    def __len__(self):
        return self.atoms.size

    def mass_where(self, mask):
        return float(np.sum(self.masses[np.asarray(mask, bool)]))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re", "im", "mass"])
        for a, m in zip(self.atoms, self.masses):
            w.writerow([f"{a.real:.17g}", f"{a.imag:.17g}", f"{m:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.DictReader(io.StringIO(text)))
        atoms = [complex(float(r["re"]), float(r["im"])) for r in rows]
        return cls(np.array(atoms), np.array([float(r["mass"]) for r in rows]))


def log_potential(mu, z):
    """``sum_j m_j log|z - a_j|``; equals ``-inf`` exactly at an atom."""
    z = np.asarray(z, complex)
    with np.errstate(divide="ignore"):
        vals = np.log(np.abs(z[..., None] - mu.atoms)) @ mu.masses
    return vals if np.ndim(vals) else float(vals)


def equilibrium_measure(spec, n):
    """Closed-form discretization of the equilibrium measure, else Leja counting."""
    spec = level_set_reduce(spec)
    if isinstance(spec, Interval):
        k = np.arange(n)
        return EmpiricalMeasure.uniform(spec.mid + spec.half * np.cos(np.pi * (k + 0.5) / n), kind="ClosedForm")
    if isinstance(spec, Disk):
        t = (np.arange(n) + 0.5) / n
        return EmpiricalMeasure.uniform(spec.center + spec.radius * np.exp(2j * np.pi * t), kind="ClosedForm")
    if isinstance(spec, ConfocalEllipse):
        w = np.exp(spec.alpha + 2j * np.pi * (np.arange(n) + 0.5) / n)
        return EmpiricalMeasure.uniform(w + 1 / w, kind="ClosedForm")
    if isinstance(spec, Lemniscate):
        from .sets import _batch_preimages

        k = max(1, int(np.ceil(n / spec.P.degree)))
        w = spec.alpha * np.exp(2j * np.pi * (np.arange(k) + 0.5) / k)
        return EmpiricalMeasure.uniform(_batch_preimages(spec.P, w).ravel(), kind="ClosedForm")
    if isinstance(spec, PolynomialPreimage):
        from .sets import _batch_preimages, _snap_real

        k = max(1, int(np.ceil(n / spec.P.degree)))
        x = 2 * np.cos(np.pi * (np.arange(k) + 0.5) / k)
        return EmpiricalMeasure.uniform(_snap_real(_batch_preimages(spec.P, x), spec.P).ravel(), kind="ClosedForm")
    if isinstance(spec, LevelSet) and isinstance(spec.base, PolynomialPreimage):
        from .sets import _batch_preimages

        P = spec.base.P
        k = max(1, int(np.ceil(n / P.degree)))
        w = np.exp(P.degree * spec.alpha + 2j * np.pi * (np.arange(k) + 0.5) / k)
        return EmpiricalMeasure.uniform(_batch_preimages(P, w + 1 / w).ravel(), kind="ClosedForm")
    if isinstance(spec, LevelSet) and isinstance(spec.base, Interval):
        t = (np.arange(n) + 0.5) / n
        return EmpiricalMeasure.uniform(spec._at(t), kind="ClosedForm")
    if isinstance(spec, JuliaCauliflower):
        depth = max(1, int(np.ceil(np.log2(max(n, 2)))))
        level = np.array([0.0 + 0j])
        for _ in range(depth):
            s = np.sqrt(1 + 4 * level)
            level = np.concatenate([(-1 + s) / 2, (-1 - s) / 2])
        return EmpiricalMeasure.uniform(level, kind="BackwardOrbit")
    return EmpiricalMeasure.uniform(leja_points(spec, n), kind="LejaEmpirical")


def far_ring(spec, k=64, factor=2.0):
    """Test points on a circle of radius ``factor`` times the hull diameter."""
    hull = convex_hull(sample_boundary(spec, 512).points)
    center = np.mean(hull.vertices)
    r = factor * max(hull.diameter, 1e-12)
    return center + r * np.exp(2j * np.pi * (np.arange(k) + 0.5) / k)


def balayage_residual(mu, spec, test_points, model=None):
    """Max exterior discrepancy between the potential of ``mu`` and of ``mu_e``.

    Outside the set the equilibrium potential equals ``G + log C``.

    Raises
    ------
    ValueError
        If any test point lies inside the convex hull of the set.
    """
    z = np.atleast_1d(np.asarray(test_points, complex))
    hull = convex_hull(sample_boundary(spec, 1024).points)
    if np.any(hull.contains(z, slack=1e-9)):
        raise ValueError("balayage test points must lie outside the convex hull")
    model = model or green_model(spec)
    ref = model.green(z) + model.log_capacity
    return float(np.max(np.abs(log_potential(mu, z) - ref)))


# ---------------------------------------------------------------------------
# Parreau-Widom sums
# ---------------------------------------------------------------------------


@dataclass
class PWReport:
    critical_points: np.ndarray
    green_values: np.ndarray
    pw_sum: float
    flags: tuple = ()


_CSC = (Interval, Disk, ConfocalEllipse, Polygon, KochAntenna, DiskPlusSpike, JuliaCauliflower)


def golden_max(f, a, b, tol=1e-10, max_iter=200):
    """Golden-section search for the maximizer of a unimodal ``f`` on ``[a, b]``."""
    invphi = (math.sqrt(5) - 1) / 2
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _polish_critical(slope, x, a, b):
    # golden section stalls near sqrt(eps) in position because G is flat at
    # its maximum; the derivative factor (P' or q) changes sign there, so a
    # bracketed root of it pins the point down to ~1e-15
    d = 1e-6 * (b - a)
    lo, hi = max(a, x - d), min(b, x + d)
    if slope(lo) * slope(hi) < 0:
        return optimize.brentq(slope, lo, hi, xtol=1e-15 * max(1.0, abs(x)), rtol=4 * np.finfo(float).eps)
    return x


def pw_sum(spec):
    """Sum of the Green's function over its critical points in the exterior.

    Real finite-gap sets get one golden-section search per bounded gap
    (there is exactly one critical point per gap).  Connected, simply connected
    sets have no critical points and report 0 with a ``"CSC"`` flag.
    """
    spec = level_set_reduce(spec)
    if isinstance(spec, _CSC):
        return PWReport(np.array([]), np.array([]), 0.0, ("CSC",))
    flags = []
    if isinstance(spec, PolynomialPreimage):
        bands = spec.bands()
        gaps = [(b0, a1) for (_, b0), (a1, _) in zip(bands, bands[1:])]
        model = green_model(spec)
        dP = spec.P.derivative()
        slope = lambda x: evaluate(dP, x).real  # noqa: E731
    elif isinstance(spec, RealIntervalUnion):
        gaps = spec.gaps
        fg = FiniteGapGreen(spec.intervals)
        model = GreenModel(math.exp(fg.log_capacity), fg.raw, "FiniteGapQuadrature", spec.variant)
        slope = lambda x: float(np.polynomial.polynomial.polyval(x, fg.q))  # noqa: E731
    elif isinstance(spec, Lemniscate):
        model = green_model(spec)
        dP = spec.P.derivative()
        if dP.degree < 1:
            return PWReport(np.array([]), np.array([]), 0.0, ())
        from .poly import roots

        rs = roots(dP)
        crit = rs.expanded()
        vals = model.green(crit)
        keep = vals > 0
        return PWReport(crit[keep], vals[keep], float(np.sum(vals[keep])), ())
    else:
        raise TypeError(f"pw_sum is not available for {spec.variant}")

    def g(x):
        return float(model.green(complex(x, 0.0)))

    crit, vals = [], []
    for a, b in gaps:
        x = _polish_critical(slope, golden_max(g, a, b), a, b)
        v = g(x)
        if v <= 0.0:
            flags.append("degenerate-gap")
        crit.append(x)
        vals.append(v)
    vals = np.array(vals)
    return PWReport(np.array(crit), vals, float(vals.sum()), tuple(flags))
