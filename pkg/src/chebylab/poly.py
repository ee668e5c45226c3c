"""Dense complex polynomials: arithmetic, evaluation, composition and roots.

Coefficients are stored in ascending degree order.  Every other module of
the package builds on :class:`ComplexPoly`, so this module has no internal
dependencies.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import linkage
from scipy.special import comb

DEGREE_CAP = 512


class DegreeOverflowError(ValueError):
    """Raised when an operation would exceed :data:`DEGREE_CAP`."""


class RootFindingError(RuntimeError):
    """Raised when the simultaneous iteration fails to produce valid roots.

    The partially converged approximations are attached for inspection.
    """

    def __init__(self, message, approximations=None, residuals=None, iterations=0):
        super().__init__(message)
        self.approximations = approximations
        self.residuals = residuals
        self.iterations = iterations


class ComplexPoly:
    """Complex polynomial in canonical (trimmed) ascending form.

    The zero polynomial has an empty coefficient array and degree ``-1``.

    Parameters
    ----------
    coeffs : array_like
        Coefficients ``c[0] + c[1] z + ... + c[d] z**d``.  Trailing exact
        zeros are dropped.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).copy()
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        if c.size - 1 > DEGREE_CAP:
            raise DegreeOverflowError(f"degree {c.size - 1} exceeds cap {DEGREE_CAP}")
        c.setflags(write=False)
        self._c = c

    # -- constructors ----------------------------------------------------
    @classmethod
    def monic(cls, coeffs):
        """Normalize by the leading coefficient so it is exactly one."""
        p = cls(coeffs)
        if p.degree < 0:
            raise ValueError("the zero polynomial has no monic normalization")
        c = np.array(p._c / p._c[-1])
        c[-1] = 1.0
        return cls(c)

    @classmethod
    def from_roots(cls, roots):
        """Expand ``prod (z - r)`` into a monic polynomial."""
        c = np.array([1.0 + 0j])
        for r in np.atleast_1d(np.asarray(roots, dtype=complex)):
            nxt = np.zeros(c.size + 1, dtype=complex)
            nxt[1:] += c
            nxt[:-1] -= r * c
            c = nxt
        return cls(c)

    @classmethod
    def monomial(cls, n, center=0.0):
        """``(z - center)**n``."""
        return cls.from_roots(np.full(n, center, dtype=complex))

    @classmethod
    def linear(cls, slope, intercept=0.0):
        return cls([intercept, slope])

    # -- basic properties -------------------------------------------------
    @property
    def coeffs(self):
        return self._c

    @property
    def degree(self):
        return self._c.size - 1

    @property
    def leading(self):
        return self._c[-1] if self._c.size else 0j

    def is_monic(self):
        return self._c.size > 0 and self._c[-1] == 1.0

    def scale(self):
        """Largest coefficient modulus; makes residual tolerances dimensionless."""
        return float(np.max(np.abs(self._c))) if self._c.size else 0.0

    def is_real(self, tol=0.0):
        return bool(np.all(np.abs(self._c.imag) <= tol * max(self.scale(), 1.0)))

    def __repr__(self):
        return f"ComplexPoly({np.array2string(self._c, precision=6)})"

    def __eq__(self, other):
        if not isinstance(other, ComplexPoly):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def allclose(self, other, atol=1e-12, rtol=0.0):
        other = _as_poly(other)
        n = max(self._c.size, other._c.size)
        a = np.zeros(n, complex)
        b = np.zeros(n, complex)
        a[: self._c.size] = self._c
        b[: other._c.size] = other._c
        return bool(np.allclose(a, b, atol=atol, rtol=rtol))

    # -- evaluation -------------------------------------------------------
    def __call__(self, z):
        return evaluate(self, z)

    def derivative(self, k=1):
        c = self._c
        for _ in range(k):
            if c.size <= 1:
                return ComplexPoly([])
            c = c[1:] * np.arange(1, c.size)
        return ComplexPoly(c)

    def taylor(self, center):
        """Coefficients of ``p(center + u)`` in powers of ``u``."""
        return np.asarray(compose(self, ComplexPoly([center, 1.0])).coeffs)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _as_poly(other)
        n = max(self._c.size, other._c.size)
        c = np.zeros(n, complex)
        c[: self._c.size] += self._c
        c[: other._c.size] += other._c
        return ComplexPoly(c)

    __radd__ = __add__

    def __neg__(self):
        return ComplexPoly(-self._c)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if np.isscalar(other):
            return ComplexPoly(self._c * other)
        other = _as_poly(other)
        if self.degree < 0 or other.degree < 0:
            return ComplexPoly([])
        _check_degree(self.degree + other.degree)
        return ComplexPoly(np.convolve(self._c, other._c))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0 or int(k) != k:
            raise ValueError("only non-negative integer powers")
        _check_degree(max(self.degree, 0) * int(k))
        out = ComplexPoly([1.0])
        base = self
        k = int(k)
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out


def _as_poly(p):
    if isinstance(p, ComplexPoly):
        return p
    return ComplexPoly(np.atleast_1d(p))


def _check_degree(d):
    if d > DEGREE_CAP:
        raise DegreeOverflowError(f"degree {d} exceeds cap {DEGREE_CAP}")


def evaluate(p, z):
    """Horner evaluation at a scalar or array of points."""
    z = np.asarray(z, dtype=complex)
    c = p.coeffs
    if c.size == 0:
        return np.zeros_like(z) if z.ndim else 0j
    acc = np.full_like(z, c[-1])
    for a in c[-2::-1]:
        acc = acc * z + a
    return acc if z.ndim else complex(acc)


def _horner_with_derivative(c, z):
    p = np.full_like(z, c[-1])
    dp = np.zeros_like(z)
    for a in c[-2::-1]:
        dp = dp * z + p
        p = p * z + a
    return p, dp


def compose(outer, inner):
    """Return ``outer(inner(z))`` by Horner's scheme on polynomials."""
    outer, inner = _as_poly(outer), _as_poly(inner)
    if outer.degree < 0:
        return ComplexPoly([])
    if outer.degree == 0 or inner.degree <= 0:
        return ComplexPoly([evaluate(outer, inner.coeffs[0] if inner.degree == 0 else 0.0)])
    _check_degree(outer.degree * inner.degree)
    oc = outer.coeffs
    acc = ComplexPoly([oc[-1]])
    for a in oc[-2::-1]:
        acc = acc * inner + a
    return acc


@dataclass(frozen=True)
class RootConfig:
    """Knobs for :func:`roots`.

    ``cluster_radius`` is absolute; ``None`` means ``1e-6 * max(1, max |root|)``.
    """

    max_iters: int = 500
    polish_tol: float = 1e-10
    cluster_radius: float | None = None
    isolation_ratio: float = 4.0
    multiplicity_tol: float = 1e-9
    polish_steps: int = 20


@dataclass(frozen=True)
class RootSet:
    roots: np.ndarray
    multiplicities: np.ndarray
    residuals: np.ndarray
    iterations: int = 0
    raw: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return len(self.roots)

    @property
    def total_multiplicity(self):
        return int(np.sum(self.multiplicities))

    def expanded(self):
        """Roots repeated according to multiplicity."""
        return np.repeat(self.roots, self.multiplicities)


def _initial_guess(c):
    n = c.size - 1
    center = -c[-2] / (n * c[-1])
    q = compose(ComplexPoly(c), ComplexPoly([center, 1.0])).coeffs
    q = np.concatenate([q, np.zeros(n + 1 - q.size)])
    lead = abs(q[-1])
    k = np.arange(1, n + 1)
    bound = max(2.0 * np.max((np.abs(q[n - k]) / lead) ** (1.0 / k)), 1e-3)
    angles = 2 * np.pi * np.arange(n) / n + 0.4 + 0.1 * np.sin(1.7 * np.arange(n))
    return center + bound * np.exp(1j * angles)


def aberth(c, max_iters=500):
    """Aberth-Ehrlich iteration on coefficient array ``c`` (ascending).

    Returns ``(approximations, iterations, converged)``.
    """
    c = np.asarray(c, dtype=complex)
    n = c.size - 1
    if n == 1:
        return np.array([-c[0] / c[1]]), 0, True
    z = _initial_guess(c)
    absc = np.abs(c)
    eps = np.finfo(float).eps
    active = np.ones(n, dtype=bool)
    it = 0
    for it in range(1, max_iters + 1):
        p, dp = _horner_with_derivative(c, z)
        bound = np.zeros(n)
        for a in absc[::-1]:
            bound = bound * np.abs(z) + a
        small = np.abs(p) <= 8 * eps * bound
        active &= ~small
        if not active.any():
            return z, it, True
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            step = ratio / (1.0 - ratio * s)
        step = np.where(np.isfinite(step), step, 0.0)
        step[~active] = 0.0
        z = z - step
        tiny = np.abs(step) <= 4 * eps * np.abs(z)
        active &= ~tiny
        if not active.any():
            return z, it, True
    return z, it, False


def _error_scale(c, z):
    """Evaluation error scale ``max_k |c_k| |z|^k`` (at least ``scale(p)``)."""
    k = np.arange(c.size)
    return np.maximum(np.max(np.abs(c)[None, :] * np.abs(z)[:, None] ** k, axis=1), np.max(np.abs(c)))


def _taylor_rel(c, center, upto):
    """Taylor coefficients of ``p`` at ``center`` and their rounding scales."""
    q = ComplexPoly(c).taylor(center)
    q = np.concatenate([q, np.zeros(c.size - q.size)])
    n = c.size - 1
    j = np.arange(c.size)
    scales = np.empty(upto + 1)
    for k in range(upto + 1):
        w = comb(j, k) * np.abs(c) * np.abs(center) ** np.maximum(j - k, 0)
        w[j < k] = 0.0
        scales[k] = max(w.sum(), np.finfo(float).tiny)
    return q[: upto + 1], scales, n


def _cluster_tree(z):
    n = z.size
    pts = np.column_stack([z.real, z.imag])
    Z = linkage(pts, method="single")
    children = {}
    height = {}
    members = {i: [i] for i in range(n)}
    for k, (a, b, h, _) in enumerate(Z):
        node = n + k
        a, b = int(a), int(b)
        children[node] = (a, b)
        height[node] = h
        members[node] = members[a] + members[b]
    parent_height = {}
    for node, (a, b) in children.items():
        parent_height[a] = height[node]
        parent_height[b] = height[node]
    root = n + len(Z) - 1
    parent_height[root] = np.inf
    for i in range(n):
        height[i] = 0.0
    return root, children, height, parent_height, members


def roots(p, cfg=None):
    """Roots of ``p`` with multiplicities.

    Simultaneous Aberth-Ehrlich iteration from a perturbed circle, then
    cluster detection on the single-linkage tree of the approximations.  A
    cluster of ``m`` approximations is merged into one root of multiplicity
    ``m`` when it is tighter than ``cfg.cluster_radius`` or when it is well
    isolated and the first ``m`` Taylor coefficients at its centroid vanish
    to rounding level while the ``m``-th does not.  Simple roots get Newton
    polishing; multiple roots are polished as simple roots of the
    ``(m-1)``-th derivative.

    Raises
    ------
    RootFindingError
        When the iteration does not converge or a root violates the residual
        contract ``|p(w)| <= polish_tol * max(scale(p), max_k |c_k||w|^k)``.
    """
    cfg = cfg or RootConfig()
    p = _as_poly(p)
    if p.degree < 1:
        raise ValueError("roots() requires degree >= 1")
    c = p.coeffs / p.leading
    z, iters, ok = aberth(c, cfg.max_iters)
    if not ok:
        res = np.abs(evaluate(ComplexPoly(c), z))
        if np.any(res > cfg.polish_tol * _error_scale(c, z) * 1e3):
            raise RootFindingError(
                f"Aberth iteration did not converge in {cfg.max_iters} steps", z, res, iters
            )

    # the default radius is measured in root units: max|c_k| grows like
    # |root|^n and would merge well separated roots at moderate degree
    scale = max(1.0, float(np.max(np.abs(z))))
    radius = cfg.cluster_radius if cfg.cluster_radius is not None else 1e-6 * scale
    groups = []
    if z.size == 1:
        groups = [[0]]
    else:
        root, children, height, parent_height, members = _cluster_tree(z)
        stack = [root]
        while stack:
            node = stack.pop()
            idx = members[node]
            if len(idx) == 1:
                groups.append(idx)
                continue
            h_in, h_out = height[node], parent_height[node]
            accept = h_in <= radius
            if not accept and h_out >= cfg.isolation_ratio * h_in:
                accept = _is_multiple(c, z[idx], cfg.multiplicity_tol, cfg.polish_steps)
                if accept:
                    # a near-multiple root that cannot meet the residual
                    # contract is really a tight cluster of simple roots
                    w = _polish(c, np.mean(z[idx]), len(idx), cfg.polish_steps)
                    accept = abs(evaluate(ComplexPoly(c), w)) <= cfg.polish_tol * _error_scale(c, np.array([w]))[0]
            if accept:
                groups.append(idx)
            else:
                stack.extend(children[node])

    out_roots, mults = [], []
    for idx in groups:
        m = len(idx)
        w = np.mean(z[idx])
        w = _polish(c, w, m, cfg.polish_steps)
        out_roots.append(w)
        mults.append(m)
    out_roots = np.array(out_roots, dtype=complex)
    mults = np.array(mults, dtype=int)
    order = np.lexsort((out_roots.imag, out_roots.real))
    out_roots, mults = out_roots[order], mults[order]
    residuals = np.abs(evaluate(p, out_roots))
    limit = cfg.polish_tol * _error_scale(p.coeffs, out_roots)
    if np.any(residuals > limit):
        raise RootFindingError(
            "root residuals exceed polish tolerance", out_roots, residuals, iters
        )
    return RootSet(out_roots, mults, residuals, iters, z)


def _is_multiple(c, pts, tol, steps=20):
    m = pts.size
    center = _polish(c, np.mean(pts), m, steps)
    q, scales, _ = _taylor_rel(c, center, m)
    rel = np.abs(q) / scales
    lower = np.max(rel[:m])
    return bool(lower <= tol and rel[m] > 1e4 * lower)


def _polish(c, w, m, steps):
    target = ComplexPoly(c).derivative(m - 1).coeffs
    if target.size < 2:
        return w
    best, best_res = w, abs(evaluate(ComplexPoly(target), w))
    for _ in range(steps):
        f, df = _horner_with_derivative(target, np.array([w]))
        if df[0] == 0:
            break
        w = w - f[0] / df[0]
        res = abs(evaluate(ComplexPoly(target), w))
        if res < best_res:
            best, best_res = w, res
        elif res > 1e3 * best_res:
            break
    return best


def expand(roots_, multiplicities=None):
    """Monic polynomial with the given roots."""
    r = np.asarray(roots_, dtype=complex)
    if multiplicities is not None:
        r = np.repeat(r, multiplicities)
    return ComplexPoly.from_roots(r)
