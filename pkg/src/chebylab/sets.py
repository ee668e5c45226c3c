"""Catalog of compact planar sets and samplers for their outer boundaries.

Only outer boundaries are ever sampled: the sup norm of a polynomial over
a compact set equals its sup norm over the filled-in set, so holes and
interior structure never affect Chebyshev polynomials, capacities or
Green's functions in the unbounded component.

Every set variant is a frozen dataclass with a ``variant`` tag.  Sampling
is parametric: each boundary point carries a parameter ``t`` so that
:func:`refine_boundary` can zoom in on local maxima of ``|p|``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial import cKDTree

from .poly import ComplexPoly, evaluate

MIN_SAMPLE = 16
REFINE_CAP = 8


class SamplingError(RuntimeError):
    """A boundary point could not be located (e.g. a ray failed to bracket)."""


class RefinementCapError(RuntimeError):
    """Adaptive refinement did not settle within the allowed rounds."""


def joukowski_inverse(x):
    """``z(x) = (x + sqrt(x^2 - 4)) / 2`` with the branch ``z(x) ~ x`` at infinity.

    Written as ``sqrt(x - 2) * sqrt(x + 2)`` so the cut is exactly ``[-2, 2]``.
    """
    x = np.asarray(x, dtype=complex)
    return 0.5 * (x + np.sqrt(x - 2) * np.sqrt(x + 2))


def chebyshev_interval_poly(k):
    """Monic Chebyshev polynomial of ``[-2, 2]``: ``z(x)^k + z(x)^-k``.

    Degree zero returns the constant ``1`` (empty-product convention).
    """
    if k == 0:
        return ComplexPoly([1.0])
    prev, cur = ComplexPoly([2.0]), ComplexPoly([0.0, 1.0])
    x = ComplexPoly([0.0, 1.0])
    for _ in range(k - 1):
        prev, cur = cur, x * cur - prev
    return cur


def _poly_to_json(p):
    return [[float(c.real), float(c.imag)] for c in p.coeffs]


def _poly_from_json(data):
    return ComplexPoly([complex(re, im) for re, im in data])


def _batch_preimages(P, w):
    """All roots of ``P(z) = w`` for each target ``w``; shape ``(len(w), deg P)``.

    Eigenvalues of stacked companion matrices, then Newton polishing on
    ``P - w``.
    """
    c = P.coeffs / P.leading
    n = P.degree
    w = np.atleast_1d(np.asarray(w, dtype=complex)) / P.leading
    if n == 1:
        return ((w - c[0]) / c[1])[:, None]
    comp = np.zeros((w.size, n, n), dtype=complex)
    comp[:, 1:, :-1] = np.eye(n - 1)
    comp[:, :, -1] = -c[:-1]
    comp[:, 0, -1] += w
    z = np.linalg.eigvals(comp)
    dP = ComplexPoly(c).derivative()
    for _ in range(3):
        f = evaluate(ComplexPoly(c), z) - w[:, None]
        df = evaluate(dP, z)
        ok = np.abs(df) > 1e-8 * np.max(np.abs(c))
        step = np.where(ok, f / np.where(ok, df, 1.0), 0.0)
        z = z - step
    return z


def _nearest_choice(cands, near):
    """Pick, per row, the candidate closest to ``near``."""
    idx = np.argmin(np.abs(cands - np.asarray(near)[..., None]), axis=-1)
    return np.take_along_axis(cands, idx[..., None], axis=-1)[..., 0]


def _knn_weights(points):
    pts = np.column_stack([points.real, points.imag])
    if len(pts) < 3:
        return np.full(len(pts), 1.0 / max(len(pts), 1))
    d, _ = cKDTree(pts).query(pts, k=3)
    w = 0.5 * (d[:, 1] + d[:, 2])
    w = np.where(w > 0, w, np.max(w) if np.max(w) > 0 else 1.0)
    return w / w.sum()


def _chebyshev_params(m):
    return np.arange(m) / (m - 1)


def _periodic_params(m):
    return np.arange(m) / m


class SetSpec:
    """Base class of all set variants."""

    variant = "abstract"
    params_periodic = False

    # subclasses implement _sample(m) -> (points, weights, params) and _at(params, near)
    def _sample(self, m):  # pragma: no cover - abstract
        raise NotImplementedError

    def _at(self, params, near=None):
        raise NotImplementedError(f"{self.variant} has no parametrization")

    def _param_bounds(self, t):
        """Clamp range of the parameter piece containing ``t``."""
        return 0.0, 1.0

    def contains(self, z, tol=1e-9):
        raise NotImplementedError

    @property
    def is_real(self):
        return False

    def to_dict(self):
        raise NotImplementedError


def _register(cls):
    _VARIANTS[cls.variant] = cls
    return cls


_VARIANTS = {}


@_register
@dataclass(frozen=True)
class Interval(SetSpec):
    a: float
    b: float
    variant = "Interval"

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("Interval requires a < b")

    @property
    def is_real(self):
        return True

    @property
    def mid(self):
        return 0.5 * (self.a + self.b)

    @property
    def half(self):
        return 0.5 * (self.b - self.a)

    def _at(self, params, near=None):
        t = np.clip(np.asarray(params, float), 0.0, 1.0)
        return self.mid + self.half * np.cos(np.pi * t) + 0j

    def _sample(self, m):
        t = _chebyshev_params(m)
        pts = self._at(t)
        return pts, _knn_weights(pts), t

    def contains(self, z, tol=1e-9):
        z = np.asarray(z, complex)
        return (np.abs(z.imag) <= tol) & (z.real >= self.a - tol) & (z.real <= self.b + tol)

    def to_dict(self):
        return {"variant": self.variant, "a": self.a, "b": self.b}


@_register
@dataclass(frozen=True)
class RealIntervalUnion(SetSpec):
    intervals: tuple
    variant = "RealIntervalUnion"

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        object.__setattr__(self, "intervals", ivs)
        if not ivs:
            raise ValueError("RealIntervalUnion needs at least one interval")
        for a, b in ivs:
            if not a < b:
                raise ValueError("each interval requires a < b")
        for (_, b0), (a1, _) in zip(ivs, ivs[1:]):
            if not b0 < a1:
                raise ValueError("intervals must be disjoint and ordered")

    @property
    def is_real(self):
        return True

    @property
    def gaps(self):
        return [(b0, a1) for (_, b0), (a1, _) in zip(self.intervals, self.intervals[1:])]

    # piece i owns the parameter range [2 i, 2 i + 1]; the unit gaps keep
    # the right end of one piece from aliasing the left end of the next
    def _param_bounds(self, t):
        i = min(max(int(np.floor(t / 2)), 0), len(self.intervals) - 1)
        return 2.0 * i, 2.0 * i + 1.0

    def _at(self, params, near=None):
        t = np.asarray(params, float)
        i = np.clip(np.floor(t / 2).astype(int), 0, len(self.intervals) - 1)
        local = np.clip(t - 2 * i, 0.0, 1.0)
        a = np.array([iv[0] for iv in self.intervals])[i]
        b = np.array([iv[1] for iv in self.intervals])[i]
        return 0.5 * (a + b) + 0.5 * (b - a) * np.cos(np.pi * local) + 0j

    def _sample(self, m):
        lengths = np.array([b - a for a, b in self.intervals])
        k = len(lengths)
        counts = np.maximum(4, np.floor(m * lengths / lengths.sum()).astype(int))
        while counts.sum() > m and counts.max() > 4:
            counts[np.argmax(counts)] -= 1
        counts[np.argmax(lengths)] += m - counts.sum()
        params = np.concatenate([2 * i + _chebyshev_params(c) for i, c in zip(range(k), counts)])
        pts = self._at(params)
        return pts, _knn_weights(pts), params

    def contains(self, z, tol=1e-9):
        z = np.asarray(z, complex)
        out = np.zeros(z.shape, bool)
        for a, b in self.intervals:
            out |= Interval(a, b).contains(z, tol)
        return out

    def to_dict(self):
        return {"variant": self.variant, "intervals": [list(iv) for iv in self.intervals]}


@_register
@dataclass(frozen=True)
class Disk(SetSpec):
    center: complex = 0j
    radius: float = 1.0
    variant = "Disk"
    params_periodic = True

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not self.radius > 0:
            raise ValueError("Disk radius must be positive")

    def _at(self, params, near=None):
        return self.center + self.radius * np.exp(2j * np.pi * np.asarray(params, float))

    def _sample(self, m):
        t = _periodic_params(m)
        return self._at(t), np.full(m, 1.0 / m), t

    def contains(self, z, tol=1e-9):
        return np.abs(np.asarray(z, complex) - self.center) <= self.radius + tol

    def to_dict(self):
        c = complex(self.center)
        return {"variant": self.variant, "center": [c.real, c.imag], "radius": self.radius}


@_register
@dataclass(frozen=True)
class ConfocalEllipse(SetSpec):
    """Filled ellipse ``{x : |z(x)| <= e^alpha}`` with foci at +-2."""

    alpha: float
    variant = "ConfocalEllipse"
    params_periodic = True

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("ConfocalEllipse requires alpha > 0")

    def _at(self, params, near=None):
        w = np.exp(self.alpha + 2j * np.pi * np.asarray(params, float))
        return w + 1.0 / w

    def _sample(self, m):
        t = _periodic_params(m)
        pts = self._at(t)
        return pts, _knn_weights(pts), t

    def contains(self, z, tol=1e-9):
        return np.log(np.abs(joukowski_inverse(z))) <= self.alpha + tol

    def to_dict(self):
        return {"variant": self.variant, "alpha": self.alpha}


@_register
@dataclass(frozen=True)
class Lemniscate(SetSpec):
    """Solid lemniscate ``{z : |P(z)| <= alpha}`` for monic ``P``."""

    P: ComplexPoly
    alpha: float
    variant = "Lemniscate"
    params_periodic = True

    def __post_init__(self):
        if not isinstance(self.P, ComplexPoly):
            object.__setattr__(self, "P", ComplexPoly(self.P))
        if not self.P.is_monic() or self.P.degree < 1:
            raise ValueError("Lemniscate requires a monic polynomial of degree >= 1")
        if not self.alpha > 0:
            raise ValueError("Lemniscate requires alpha > 0")

    def _at(self, params, near=None):
        t = np.asarray(params, float)
        cands = _batch_preimages(self.P, self.alpha * np.exp(2j * np.pi * t.ravel()))
        if near is None:
            raise ValueError("lemniscate parametrization needs a reference point")
        near = np.broadcast_to(np.asarray(near, complex), t.shape).ravel()
        return _nearest_choice(cands, near).reshape(t.shape)

    def _sample(self, m):
        n = self.P.degree
        k = max(int(np.ceil(m / n)), 4)
        t = _periodic_params(k)
        pts = _batch_preimages(self.P, self.alpha * np.exp(2j * np.pi * t))
        params = np.repeat(t, n)
        pts = pts.ravel()
        return pts, _knn_weights(pts), params

    def contains(self, z, tol=1e-9):
        return np.abs(evaluate(self.P, np.asarray(z, complex))) <= self.alpha * (1 + tol)

    def to_dict(self):
        return {"variant": self.variant, "P": _poly_to_json(self.P), "alpha": self.alpha}


def _snap_real(z, P):
    tol = 1e-6 * max(1.0, np.max(np.abs(z)))
    return np.where(np.abs(z.imag) <= tol, z.real + 0j, z)


@_register
@dataclass(frozen=True)
class PolynomialPreimage(SetSpec):
    """Period-n set ``P^{-1}([-2, 2])`` for a monic real polynomial ``P``."""

    P: ComplexPoly
    variant = "PolynomialPreimage"

    def __post_init__(self):
        if not isinstance(self.P, ComplexPoly):
            object.__setattr__(self, "P", ComplexPoly(self.P))
        if not self.P.is_monic() or self.P.degree < 1:
            raise ValueError("PolynomialPreimage requires a monic polynomial of degree >= 1")
        if not self.P.is_real():
            raise ValueError("PolynomialPreimage requires real coefficients")

    @property
    def is_real(self):
        return True

    def _at(self, params, near=None):
        t = np.clip(np.asarray(params, float), 0.0, 1.0)
        cands = _snap_real(_batch_preimages(self.P, 2 * np.cos(np.pi * t.ravel())), self.P)
        if near is None:
            raise ValueError("preimage parametrization needs a reference point")
        near = np.broadcast_to(np.asarray(near, complex), t.shape).ravel()
        return _nearest_choice(cands, near).reshape(t.shape)

    def _sample(self, m):
        n = self.P.degree
        k = max(int(np.ceil(m / n)), 4)
        t = _chebyshev_params(k)
        pts = _snap_real(_batch_preimages(self.P, 2 * np.cos(np.pi * t)), self.P).ravel()
        params = np.repeat(t, n)
        return pts, _knn_weights(pts), params

    def bands(self):
        """Maximal intervals of ``P^{-1}([-2, 2])`` on the real line."""
        ends = []
        for s in (2.0, -2.0):
            r = np.roots((self.P - s).coeffs[::-1])
            ends.extend(r.real[np.abs(r.imag) <= 1e-7 * max(1.0, np.max(np.abs(r)))])
        ends = np.sort(ends)
        ends = ends[np.concatenate([[True], np.diff(ends) > 1e-9])]
        bands = []
        for a, b in zip(ends[:-1], ends[1:]):
            mid = evaluate(self.P, 0.5 * (a + b)).real
            if abs(mid) <= 2.0:
                if bands and abs(bands[-1][1] - a) <= 1e-9:
                    bands[-1] = (bands[-1][0], float(b))
                else:
                    bands.append((float(a), float(b)))
        return bands

    def contains(self, z, tol=1e-9):
        g = np.log(np.abs(joukowski_inverse(evaluate(self.P, np.asarray(z, complex)))))
        return g / self.P.degree <= tol

    def to_dict(self):
        return {"variant": self.variant, "P": _poly_to_json(self.P)}


@_register
@dataclass(frozen=True)
class LevelSet(SetSpec):
    """Region bounded by ``{z : G_base(z) = alpha}``."""

    base: SetSpec
    alpha: float
    variant = "LevelSet"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("LevelSet requires alpha > 0")

    @property
    def params_periodic(self):
        return True

    def _preimage_base(self):
        return isinstance(self.base, PolynomialPreimage)

    def _at(self, params, near=None):
        t = np.asarray(params, float)
        base = self.base
        if isinstance(base, Interval):
            w = np.exp(self.alpha + 2j * np.pi * t)
            return base.mid + 0.5 * base.half * (w + 1.0 / w)
        if isinstance(base, PolynomialPreimage):
            n = base.P.degree
            w = np.exp(n * self.alpha + 2j * np.pi * t.ravel())
            cands = _batch_preimages(base.P, w + 1.0 / w)
            if near is None:
                raise ValueError("level-set parametrization needs a reference point")
            near = np.broadcast_to(np.asarray(near, complex), t.shape).ravel()
            return _nearest_choice(cands, near).reshape(t.shape)
        return _ray_points(self, t)

    def _sample(self, m):
        base = self.base
        if isinstance(base, PolynomialPreimage):
            n = base.P.degree
            k = max(int(np.ceil(m / n)), 4)
            t = _periodic_params(k)
            w = np.exp(n * self.alpha + 2j * np.pi * t)
            pts = _batch_preimages(base.P, w + 1.0 / w).ravel()
            params = np.repeat(t, n)
            return pts, _knn_weights(pts), params
        t = _periodic_params(m)
        pts = self._at(t)
        return pts, _knn_weights(pts), t

    def contains(self, z, tol=1e-9):
        from .potential import green_model

        return green_model(self.base).green(z) <= self.alpha + tol

    def to_dict(self):
        return {"variant": self.variant, "base": self.base.to_dict(), "alpha": self.alpha}


def _ray_points(spec, t):
    """Ray shooting for level sets of an empirical Green's function."""
    from .potential import green_model

    model = green_model(spec.base)
    base_pts = sample_boundary(spec.base, 256).points
    center = np.mean(base_pts)
    r0 = np.max(np.abs(base_pts - center))
    g = model.green
    out = np.empty(t.shape, complex)
    for i, ti in np.ndenumerate(t):
        d = np.exp(2j * np.pi * ti)
        hi = r0 * np.exp(spec.alpha + 1.0) + r0
        if g(center + hi * d) <= spec.alpha:
            raise SamplingError("ray failed to bracket the level curve")
        # outermost crossing: march inward from far away
        radii = np.linspace(hi, 0.0, 200)
        vals = g(center + radii * d) - spec.alpha
        below = np.flatnonzero(vals <= 0)
        if below.size == 0:
            raise SamplingError("ray failed to bracket the level curve")
        lo_r, hi_r = radii[below[0]], radii[below[0] - 1]
        for _ in range(60):
            mid = 0.5 * (lo_r + hi_r)
            if g(center + mid * d) > spec.alpha:
                hi_r = mid
            else:
                lo_r = mid
        out[i] = center + 0.5 * (lo_r + hi_r) * d
    return out


class _PolylineMixin:
    """Boundary parametrized by normalized arc length along closed vertices."""

    params_periodic = True

    def _polyline(self):
        v = np.asarray(self.boundary_vertices(), complex)
        closed = np.concatenate([v, v[:1]])
        seg = np.abs(np.diff(closed))
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        return closed, seg, cum

    def _at(self, params, near=None):
        closed, seg, cum = self._polyline()
        s = (np.asarray(params, float) % 1.0) * cum[-1]
        i = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg) - 1)
        frac = np.where(seg[i] > 0, (s - cum[i]) / np.where(seg[i] > 0, seg[i], 1.0), 0.0)
        return closed[i] + frac * (closed[i + 1] - closed[i])

    def _sample(self, m):
        closed, seg, cum = self._polyline()
        counts = np.maximum(1, np.round(m * seg / cum[-1]).astype(int))
        params, weights = [], []
        for i, c in enumerate(counts):
            params.append((cum[i] + seg[i] * np.arange(c) / c) / cum[-1])
            weights.append(np.full(c, seg[i] / c))
        params = np.concatenate(params)
        w = np.concatenate(weights)
        return self._at(params), w / w.sum(), params

    def contains(self, z, tol=1e-9):
        z = np.asarray(z, complex)
        closed, _, _ = self._polyline()
        return _point_in_polygon(z, closed[:-1]) | (_dist_to_polyline(z, closed) <= tol)


def _point_in_polygon(z, v):
    z = np.atleast_1d(z)
    inside = np.zeros(z.shape, bool)
    x, y = z.real, z.imag
    n = len(v)
    for i in range(n):
        a, b = v[i], v[(i + 1) % n]
        cond = (a.imag > y) != (b.imag > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = a.real + (y - a.imag) * (b.real - a.real) / (b.imag - a.imag)
        inside ^= cond & (x < xint)
    return inside


def _dist_to_polyline(z, closed):
    z = np.atleast_1d(z)[..., None]
    a, b = closed[:-1], closed[1:]
    d = b - a
    L2 = np.abs(d) ** 2
    t = np.clip(np.real((z - a) * np.conj(d)) / np.where(L2 > 0, L2, 1.0), 0, 1)
    return np.min(np.abs(z - (a + t * d)), axis=-1)


@_register
@dataclass(frozen=True)
class Polygon(_PolylineMixin, SetSpec):
    vertices: tuple
    variant = "Polygon"

    def __post_init__(self):
        v = tuple(complex(x) for x in self.vertices)
        if len(v) < 3:
            raise ValueError("Polygon needs at least three vertices")
        area = 0.5 * sum((a.conjugate() * b).imag for a, b in zip(v, v[1:] + v[:1]))
        if area < 0:
            v = v[::-1]
        object.__setattr__(self, "vertices", v)

    def boundary_vertices(self):
        return self.vertices

    def to_dict(self):
        return {"variant": self.variant, "vertices": [[z.real, z.imag] for z in self.vertices]}


@_register
@dataclass(frozen=True)
class KochAntenna(_PolylineMixin, SetSpec):
    """Koch-type antenna with per-stage shape parameters ``a_j``.

    Stage one is the unit equilateral triangle.  Every later stage replaces
    each side of length ``s`` by four sides: two of length
    ``(1 - a/3) s / 2`` flanking an isosceles spike with base ``a s / 3``
    and legs ``(1 - a/3) s / 2``.  When ``a = 0`` the spike degenerates to a
    doubled segment of length ``beta * s``.
    """

    a_schedule: tuple
    depth: int
    beta: float = 0.4
    variant = "KochAntenna"

    def __post_init__(self):
        a = tuple(float(x) for x in np.atleast_1d(self.a_schedule))
        object.__setattr__(self, "a_schedule", a)
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.depth > 1 and not a:
            raise ValueError("a_schedule must be non-empty for depth > 1")
        if any(not 0.0 <= x <= 1.0 for x in a):
            raise ValueError("a_j must lie in [0, 1]")
        if not 0.0 < self.beta <= 0.5:
            raise ValueError("beta must lie in (0, 1/2]")

    def a_at(self, j):
        """Shape parameter used when building stage ``j + 1`` (``j >= 1``)."""
        return self.a_schedule[min(j - 1, len(self.a_schedule) - 1)]

    def boundary_vertices(self):
        return koch_vertices(self.a_schedule, self.depth, self.beta)

    def side_lengths(self):
        v = np.asarray(self.boundary_vertices())
        return np.abs(np.diff(np.concatenate([v, v[:1]])))

    def to_dict(self):
        return {
            "variant": self.variant,
            "a_schedule": list(self.a_schedule),
            "depth": self.depth,
            "beta": self.beta,
        }


def koch_vertices(a_schedule, depth, beta=0.4):
    a_schedule = tuple(np.atleast_1d(a_schedule))
    v = [np.exp(1j * (np.pi / 2 + 2 * np.pi * k / 3)) / np.sqrt(3) for k in range(3)]
    for j in range(1, depth):
        a = float(a_schedule[min(j - 1, len(a_schedule) - 1)])
        new = []
        for p, q in zip(v, v[1:] + v[:1]):
            s = abs(q - p)
            d = (q - p) / s
            normal = -1j * d
            half = 0.5 * (1 - a / 3) * s
            leg = half if a > 0 else beta * s
            h = np.sqrt(max(leg**2 - (a * s / 6) ** 2, 0.0))
            mid = 0.5 * (p + q)
            new.extend([p, p + half * d, mid + h * normal, q - half * d])
        v = new
    return v


@_register
@dataclass(frozen=True)
class DiskPlusSpike(SetSpec):
    """Closed disk ``|z| <= radius`` with the segment ``[radius, spike_end]``."""

    radius: float = 1.0
    spike_end: float = 2.0
    variant = "DiskPlusSpike"

    def __post_init__(self):
        if not 0 < self.radius < self.spike_end:
            raise ValueError("DiskPlusSpike requires 0 < radius < spike_end")

    def _param_bounds(self, t):
        return (0.0, 1.0) if t < 1.0 else (1.0, 2.0)

    def _at(self, params, near=None):
        t = np.asarray(params, float)
        circ = self.radius * np.exp(2j * np.pi * (t % 1.0))
        seg = self.radius + np.clip(t - 1.0, 0, 1) * (self.spike_end - self.radius) + 0j
        return np.where(t < 1.0, circ, seg)

    def _sample(self, m):
        L = self.spike_end - self.radius
        per = 2 * np.pi * self.radius
        ms = max(4, int(round(m * L / (per + 2 * L))))
        mc = max(8, m - 2 * ms)
        tc = _periodic_params(mc)
        ts = 1.0 + (np.arange(ms) + 1.0) / ms  # includes the tip
        params = np.concatenate([tc, ts, ts])
        pts = self._at(params)
        w = np.concatenate([np.full(mc, per / mc), np.full(2 * ms, 0.5 * L / ms)])
        return pts, w / w.sum(), params

    def contains(self, z, tol=1e-9):
        z = np.asarray(z, complex)
        seg = (np.abs(z.imag) <= tol) & (z.real >= self.radius - tol) & (z.real <= self.spike_end + tol)
        return (np.abs(z) <= self.radius + tol) | seg

    def to_dict(self):
        return {"variant": self.variant, "radius": self.radius, "spike_end": self.spike_end}


@_register
@dataclass(frozen=True)
class JuliaCauliflower(SetSpec):
    """Julia set of ``z^2 + z``, sampled by backward iteration."""

    sample_depth: int = 14
    variant = "JuliaCauliflower"

    def __post_init__(self):
        if self.sample_depth < 1:
            raise ValueError("sample_depth must be >= 1")

    def tree_points(self, depth=None):
        depth = self.sample_depth if depth is None else depth
        level = np.array([0.0 + 0j])
        allpts = [level]
        for _ in range(depth):
            s = np.sqrt(1 + 4 * level)
            level = np.concatenate([(-1 + s) / 2, (-1 - s) / 2])
            level = _dedupe(level, 1e-9)
            allpts.append(level)
        return _dedupe(np.concatenate(allpts), 1e-9)

    def _sample(self, m):
        pts = self.tree_points()
        order = np.argsort(np.angle(pts + 0.5))
        pts = pts[order]
        if m < pts.size:
            pts = pts[np.linspace(0, pts.size - 1, m).round().astype(int)]
        return pts, np.full(pts.size, 1.0 / pts.size), np.full(pts.size, np.nan)

    def contains(self, z, tol=1e-9):
        from .potential import green_model

        return green_model(self).green(z) <= tol

    def to_dict(self):
        return {"variant": self.variant, "sample_depth": self.sample_depth}


def _dedupe(z, tol):
    key = np.round(np.column_stack([z.real, z.imag]) / tol).astype(np.int64)
    _, idx = np.unique(key, axis=0, return_index=True)
    return z[np.sort(idx)]


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def spec_from_dict(data):
    """Inverse of ``spec.to_dict()``."""
    data = dict(data)
    name = data.pop("variant")
    if name not in _VARIANTS:
        raise ValueError(f"unknown set variant {name!r}")
    if name == "Disk":
        c = data.get("center", [0.0, 0.0])
        data["center"] = complex(*c) if isinstance(c, (list, tuple)) else complex(c)
    elif name in ("Lemniscate", "PolynomialPreimage"):
        data["P"] = _poly_from_json(data["P"])
    elif name == "LevelSet":
        data["base"] = spec_from_dict(data["base"])
    elif name == "Polygon":
        data["vertices"] = tuple(complex(re, im) for re, im in data["vertices"])
    elif name == "RealIntervalUnion":
        data["intervals"] = tuple(tuple(iv) for iv in data["intervals"])
    elif name == "KochAntenna":
        data["a_schedule"] = tuple(data["a_schedule"])
    return _VARIANTS[name](**data)


def spec_to_json(spec):
    return json.dumps(spec.to_dict(), sort_keys=True)


def spec_from_json(text):
    return spec_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# boundary samples
# ---------------------------------------------------------------------------


@dataclass
class BoundarySample:
    points: np.ndarray
    weights: np.ndarray
    generation: int = 0
    params: np.ndarray = field(default=None, repr=False)
    inserted: int = 0

    def __len__(self):
        return len(self.points)

    def __post_init__(self):
        self.points = np.asarray(self.points, complex)
        self.weights = np.asarray(self.weights, float)
        if self.params is None:
            self.params = np.full(self.points.size, np.nan)


def sample_boundary(spec, m, seed=0):
    """Sample ``m`` points (approximately, per variant) of the outer boundary.

    Sampling is deterministic; ``seed`` is accepted for interface stability
    and only perturbs nothing at present because every sampler is a
    deterministic grid.
    """
    if m < MIN_SAMPLE:
        raise ValueError(f"boundary samples need m >= {MIN_SAMPLE}")
    spec = level_set_reduce(spec)
    pts, w, params = spec._sample(int(m))
    return BoundarySample(pts, w, 0, params)


def refine_boundary(sample, p, spec, tol=1e-8, zoom_rounds=8, cap=REFINE_CAP):
    """Insert points where ``|p|`` exceeds the current discrete maximum.

    ``|p|`` is evaluated on a sampling four times finer.  Fine-grid local
    maxima that beat the current maximum by more than ``tol`` (relative)
    are zoomed along the boundary parametrization when one exists and then
    inserted.  Returns a new sample; ``inserted`` counts new points.
    """
    spec = level_set_reduce(spec)
    if sample.generation >= cap:
        raise RefinementCapError(f"refinement exceeded {cap} rounds")
    current = float(np.max(np.abs(evaluate(p, sample.points))))
    new_pts, new_params = boundary_peaks(
        spec, lambda z: np.abs(evaluate(p, z)), max(4 * len(sample), MIN_SAMPLE), current * (1 + tol), zoom_rounds
    )
    if new_pts.size == 0:
        return replace(sample, inserted=0)
    new_pts = np.asarray(new_pts, complex)
    w_new = np.full(new_pts.size, np.max(sample.weights))
    return BoundarySample(
        np.concatenate([sample.points, new_pts]),
        np.concatenate([sample.weights, w_new]),
        sample.generation + 1,
        np.concatenate([sample.params, np.asarray(new_params, float)]),
        inserted=int(new_pts.size),
    )


def boundary_peaks(spec, f, m, threshold, zoom_rounds=8):
    """Local maxima of ``f`` on an ``m``-point boundary grid above ``threshold``.

    ``f`` maps complex points to nonnegative values.  Each maximum is zoomed
    along the parametrization when one exists.  Returns ``(points, params)``.
    """
    spec = level_set_reduce(spec)
    fine = sample_boundary(spec, max(m, MIN_SAMPLE))
    vals = f(fine.points)
    # zooming can lift a grid maximum by a few percent, so filter afterwards
    exceed = vals > 0.9 * threshold
    if not exceed.any():
        return np.empty(0, complex), np.empty(0)
    pts2 = np.column_stack([fine.points.real, fine.points.imag])
    k = min(7, len(pts2))
    _, nbr = cKDTree(pts2).query(pts2, k=k)
    cand = np.flatnonzero(exceed & (vals >= np.max(vals[nbr], axis=1)))
    grid = np.unique(fine.params[np.isfinite(fine.params)])
    pts, params = [], []
    for i in cand:
        z, t = fine.points[i], fine.params[i]
        if np.isfinite(t) and grid.size > 1 and zoom_rounds:
            z, t = _zoom(spec, f, z, t, _local_spacing(grid, t), zoom_rounds)
        pts.append(z)
        params.append(t)
    pts, params = np.asarray(pts, complex), np.asarray(params, float)
    if pts.size:
        above = f(pts) > threshold
        pts, params = pts[above], params[above]
    # slits and doubled segments are sampled from both sides
    scale = float(np.max(np.abs(fine.points - fine.points.mean()))) or 1.0
    _, first = np.unique(np.round(pts / (1e-9 * scale)), return_index=True)
    first = np.sort(first)
    return pts[first], params[first]


def _local_spacing(grid, t):
    j = int(np.clip(np.searchsorted(grid, t), 1, grid.size - 1))
    gaps = np.diff(grid[max(j - 2, 0) : j + 2])
    return float(np.max(gaps)) if gaps.size else float(grid[-1] - grid[0])


def _zoom(spec, f, z, t, h, rounds):
    best_z, best_t, best_v = z, t, float(f(np.atleast_1d(z))[0])
    periodic = spec.params_periodic
    lo, hi = spec._param_bounds(t)
    for _ in range(rounds):
        ts = best_t + h * np.linspace(-1.0, 1.0, 9)
        if not periodic:
            ts = np.clip(ts, lo, hi)
        try:
            zs = spec._at(ts, near=np.full(ts.shape, best_z))
        except NotImplementedError:
            break
        vs = f(zs)
        j = int(np.argmax(vs))
        if vs[j] > best_v:
            best_z, best_t, best_v = zs[j], float(ts[j]), vs[j]
        h *= 0.25
    return best_z, best_t


# ---------------------------------------------------------------------------
# level sets and hulls
# ---------------------------------------------------------------------------


def level_set(spec, alpha):
    """``{z : G_spec(z) = alpha}`` with nesting and known families collapsed."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return level_set_reduce(LevelSet(spec, float(alpha)))


def level_set_reduce(spec):
    """Rewrite ``LevelSet`` specs into an equivalent closed-form variant if one exists."""
    if not isinstance(spec, LevelSet):
        return spec
    base = level_set_reduce(spec.base)
    a = spec.alpha
    if isinstance(base, LevelSet):
        return level_set_reduce(LevelSet(base.base, base.alpha + a))
    if isinstance(base, Disk):
        return Disk(base.center, base.radius * np.exp(a))
    if isinstance(base, ConfocalEllipse):
        return ConfocalEllipse(base.alpha + a)
    if isinstance(base, Lemniscate):
        return Lemniscate(base.P, base.alpha * np.exp(base.P.degree * a))
    if isinstance(base, Interval) and base.a == -2.0 and base.b == 2.0:
        return ConfocalEllipse(a)
    if base is spec.base:
        return spec
    return LevelSet(base, a)


@dataclass(frozen=True)
class Hull:
    """Counterclockwise convex hull; ``degenerate`` marks a segment or point."""

    vertices: np.ndarray
    degenerate: bool

    def violation(self, z, slack=0.0):
        """Distance by which each point lies outside the hull (0 inside)."""
        z = np.atleast_1d(np.asarray(z, complex))
        v = self.vertices
        if self.degenerate:
            closed = np.concatenate([v, v[:1]]) if len(v) > 1 else np.array([v[0], v[0]])
            d = _dist_to_polyline(z, closed)
            return np.maximum(d - slack, 0.0)
        e = np.roll(v, -1) - v
        # positive: left of the directed edge, i.e. inside for a ccw hull
        side = np.imag(np.conj(e)[None, :] * (z[:, None] - v[None, :])) / np.abs(e)[None, :]
        inside = np.all(side >= -slack, axis=1)
        far = _dist_to_polyline(z, np.concatenate([v, v[:1]]))
        return np.where(inside, 0.0, np.maximum(far - slack, 0.0))

    def contains(self, z, slack=1e-9):
        return self.violation(z, slack) <= 0.0

    @property
    def diameter(self):
        v = self.vertices
        return float(np.max(np.abs(v[:, None] - v[None, :]))) if len(v) else 0.0


def convex_hull(points):
    """Andrew's monotone chain on complex points."""
    z = np.unique(np.asarray(points, complex))
    if z.size < 3:
        if z.size == 0:
            raise ValueError("convex_hull needs points")
        return Hull(z, True)
    pts = sorted(set((float(p.real), float(p.imag)) for p in z))

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    scale = max(max(abs(x), abs(y)) for x, y in pts) or 1.0
    eps = 1e-12 * scale * scale
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= eps:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= eps:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    verts = np.array([complex(x, y) for x, y in hull])
    return Hull(verts, len(verts) < 3)


def boundary_diameter(spec, m=512):
    return convex_hull(sample_boundary(spec, m).points).diameter


def distance_to_set(spec, z, m=4096):
    """Euclidean distance to the filled set (0 for points it contains)."""
    z = np.atleast_1d(np.asarray(z, complex))
    pts = sample_boundary(spec, m).points
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    d, _ = tree.query(np.column_stack([z.real, z.imag]))
    return np.where(level_set_reduce(spec).contains(z), 0.0, d)


def is_odd_symmetric(spec):
    """True when the set is invariant under ``z -> -z``."""
    spec = level_set_reduce(spec)
    if isinstance(spec, (Disk,)):
        return spec.center == 0
    if isinstance(spec, ConfocalEllipse):
        return True
    if isinstance(spec, Interval):
        return spec.a == -spec.b
    if isinstance(spec, (Lemniscate, PolynomialPreimage)):
        c = spec.P.coeffs
        n = spec.P.degree
        return bool(np.all(c[(n - np.arange(c.size)) % 2 == 1] == 0))
    if isinstance(spec, LevelSet):
        return is_odd_symmetric(spec.base)
    return False


def is_conjugation_symmetric(spec):
    spec = level_set_reduce(spec)
    if isinstance(spec, (Interval, RealIntervalUnion, ConfocalEllipse, PolynomialPreimage, DiskPlusSpike, JuliaCauliflower)):
        return True
    if isinstance(spec, Disk):
        return spec.center.imag == 0
    if isinstance(spec, Lemniscate):
        return spec.P.is_real()
    if isinstance(spec, LevelSet):
        return is_conjugation_symmetric(spec.base)
    return False
