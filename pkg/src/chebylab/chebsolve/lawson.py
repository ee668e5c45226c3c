"""Complex minimax by Lawson's iteratively reweighted least squares.

The polynomial is represented in a basis that is discretely orthonormal on
the (centred, scaled) boundary sample, built by an Arnoldi recurrence.
Monomials are never formed during the iteration.
"""
from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from ..poly import ComplexPoly, compose, evaluate
from ..sets import RefinementCapError, boundary_peaks, level_set_reduce, refine_boundary, sample_boundary
from .types import (
    BasisBreakdownError,
    ChebyshevSolution,
    IterationCapError,
    SolverConfig,
    capacity_of,
    dedupe_points,
)


class ArnoldiBasis:
    """Orthonormal polynomial basis on points ``x`` with weights ``d``.

    ``q_0 = 1``; for ``k >= 1`` the columns ``Q[:, k]`` satisfy
    ``x Q[:, :n] = Q H`` and are orthonormal in the ``d``-weighted inner
    product.  The leading coefficient of ``q_k`` is ``1 / prod H[j+1, j]``.
    """

    def __init__(self, x, d, n):
        x = np.asarray(x, complex)
        d = np.asarray(d, float) / np.sum(d)
        m = x.size
        Q = np.zeros((m, n + 1), complex)
        H = np.zeros((n + 1, n), complex)
        Q[:, 0] = 1.0
        sd = np.sqrt(d)
        for k in range(n):
            v = x * Q[:, k]
            for _ in range(2):  # twice is enough
                coef = (Q[:, : k + 1].conj().T * d) @ v
                v = v - Q[:, : k + 1] @ coef
                H[: k + 1, k] += coef
            h = np.linalg.norm(sd * v)
            if not h > 1e-13 * max(1.0, np.linalg.norm(sd * x * Q[:, k])):
                raise BasisBreakdownError(f"Arnoldi basis lost rank at degree {k + 1}")
            H[k + 1, k] = h
            Q[:, k + 1] = v / h
        self.H, self.Q, self.n = H, Q, n
        self.lead = np.prod(np.diag(H, -1))  # q_n * lead is monic

    def evaluate(self, x, c):
        """Values of ``lead q_n + sum_k c_k q_k`` at new points ``x``."""
        x = np.asarray(x, complex)
        n, H = self.n, self.H
        W = np.zeros((x.size, n + 1), complex)
        W[:, 0] = 1.0
        for k in range(n):
            v = x * W[:, k] - W[:, : k + 1] @ H[: k + 1, k]
            W[:, k + 1] = v / H[k + 1, k]
        return self.lead * W[:, n] + W[:, :n] @ c

    def power_coeffs(self, c):
        """Ascending power-basis coefficients of the monic polynomial in ``x``."""
        n, H = self.n, self.H
        P = np.zeros((n + 1, n + 1), complex)  # row k holds q_k
        P[0, 0] = 1.0
        for k in range(n):
            shifted = np.zeros(n + 1, complex)
            shifted[1:] = P[k, :-1]
            P[k + 1] = (shifted - H[: k + 1, k] @ P[: k + 1]) / H[k + 1, k]
        out = self.lead * P[n] + c @ P[:n]
        out[n] = 1.0
        return out


def _neighbours(x, k=5):
    pts = np.column_stack([x.real, x.imag])
    k = min(k, len(pts))
    return cKDTree(pts).query(pts, k=k)[1]


def _pooled_weights(ar, w, nbr):
    """Move every weight uphill in ``|r|`` along the neighbour graph.

    Each point follows its largest-``|r|`` neighbour until it reaches a
    discrete local maximum, and its weight is added there.  The result is
    again a probability vector, so it also yields a lower bound.
    """
    up = nbr[np.arange(len(ar)), np.argmax(ar[nbr], axis=1)]
    for _ in range(64):
        nxt = up[up]
        if np.array_equal(nxt, up):
            break
        up = nxt
    return np.bincount(up, weights=w, minlength=len(w))


def _weighted_ls(A, b, w):
    sw = np.sqrt(w)
    c, *_ = np.linalg.lstsq(sw[:, None] * A, -sw * b, rcond=None)
    return c


def _dual_newton(a, B, v, c, steps=12):
    """Newton polish of the optimality system on a fixed support.

    Unknowns are support weights ``v``, coefficients ``c`` and the squared
    level ``e``; equations are the weighted normal equations
    ``B^H diag(v) r = 0``, equal moduli ``|r_j|^2 = e`` and ``sum v = 1``,
    where ``r = a + B c``.  Returns the final ``(v, c)``; callers validate.
    """
    k, n = B.shape
    e = float(np.mean(np.abs(a + B @ c) ** 2))
    prev = np.inf
    best = (v, c)
    for _ in range(steps + 1):
        r = a + B @ c
        F = np.concatenate([
            _cplx(B.conj().T @ (v * r)),
            np.abs(r) ** 2 - e,
            [np.sum(v) - 1.0],
        ])
        fn = np.max(np.abs(F))
        if fn < prev:
            best = (v, c)
        if fn < 1e-15 or fn > 0.5 * prev or _ == steps:
            break
        prev = fn
        BhV_B = B.conj().T @ (v[:, None] * B)
        J = np.zeros((2 * n + k + 1, 2 * n + k + 1))
        # d(F1)/dc for real and imaginary parts of dc
        J[: 2 * n, : 2 * n] = _real_block(BhV_B)
        J[: 2 * n, 2 * n : 2 * n + k] = _cplx_cols(B.conj().T * r[None, :])
        G = 2 * (np.conj(r)[:, None] * B)
        J[2 * n : 2 * n + k, :n] = G.real
        J[2 * n : 2 * n + k, n : 2 * n] = -G.imag
        J[2 * n : 2 * n + k, -1] = -1.0
        J[-1, 2 * n : 2 * n + k] = 1.0
        # minimum-norm step: symmetric sets make the dual weights non-unique
        d = np.linalg.lstsq(J, -F, rcond=1e-13)[0]
        c = c + d[:n] + 1j * d[n : 2 * n]
        v = v + d[2 * n : 2 * n + k]
        e = e + d[-1]
    return best


def _cplx(z):
    return np.concatenate([z.real, z.imag])


def _cplx_cols(M):
    return np.vstack([M.real, M.imag])


def _real_block(M):
    """Real matrix of ``dc -> M dc`` acting on ``[Re dc, Im dc]``."""
    return np.block([[M.real, -M.imag], [M.imag, M.real]])


def _bound_on(Qn, A, S, v):
    """Validated lower bound from weights ``v`` on index set ``S``."""
    v = np.maximum(v, 0.0)
    if not v.sum() > 0:
        return 0.0
    v = v / v.sum()
    cs = _weighted_ls(A[S], Qn[S], v)
    return float(np.sqrt(np.sum(v * np.abs(Qn[S] + A[S] @ cs) ** 2)))


def _support_bound(Qn, A, ar, w, nbr):
    """Best lower bound available from the current weights.

    Candidate supports are the ``k`` heaviest points for ``k`` between
    ``n + 1`` and ``2 n + 9`` (symmetric sets need whole orbits), plus the
    weights pooled onto local maxima of ``|r|``.  Each support is polished
    by Newton's method on the optimality system and every bound is
    validated by its own weighted least-squares solve.  Returns
    ``(lower_bound, c_candidate)``; the candidate may be ``None``.
    """
    n = A.shape[1]
    wp = _pooled_weights(ar, w, nbr)
    cp = _weighted_ls(A, Qn, wp)
    best = float(np.sqrt(np.sum(wp * np.abs(Qn + A @ cp) ** 2)))
    cand, cand_max = None, np.inf
    order = np.argsort(-w, kind="stable")
    live = int(np.sum(w > 1e-8 * w.max()))
    trials = [np.sort(order[:k]) for k in range(n + 1, min(live, 2 * n + 9) + 1)]
    pooled = np.flatnonzero(wp > 1e-6 * wp.max())
    if 2 <= pooled.size <= 2 * n + 9:
        trials.append(pooled)
    for S in trials:
        v, c = _dual_newton(Qn[S], A[S], w[S] / w[S].sum(), cp)
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(c))):
            continue
        best = max(best, _bound_on(Qn, A, S, v))
        cmax = np.abs(Qn + A @ c).max()
        if cmax < cand_max:
            cand, cand_max = c, cmax
    return best, cand


STALL_WINDOW = 300
BOUND_EVERY = 10
POLISH_ROUNDS = 12


def _basis_cols(basis, x, deriv=False):
    """``(a, B)`` with ``a + B c`` the residual at new points ``x``.

    With ``deriv`` the ``z``-derivatives ``(a', B')`` are appended.
    """
    n, H = basis.n, basis.H
    W = np.zeros((x.size, n + 1), complex)
    D = np.zeros_like(W)
    W[:, 0] = 1.0
    for k in range(n):
        W[:, k + 1] = (x * W[:, k] - W[:, : k + 1] @ H[: k + 1, k]) / H[k + 1, k]
        D[:, k + 1] = (W[:, k] + x * D[:, k] - D[:, : k + 1] @ H[: k + 1, k]) / H[k + 1, k]
    if deriv:
        return basis.lead * W[:, n], W[:, :n], basis.lead * D[:, n], D[:, :n]
    return basis.lead * W[:, n], W[:, :n]


class _PeakSystem:
    """Optimality system with moving extreme points.

    Unknowns are the coefficients ``c``, weights ``v``, squared level ``e``
    and the boundary parameters ``t`` of the free peaks.  Equations are the
    weighted normal equations, ``|r(z(t_j))|^2 = e``, stationarity
    ``d|r|^2/dt = 0`` at free peaks and ``sum v = 1``.  Peaks at corners or
    at ends of arcs keep their parameter fixed.
    """

    H_T = 1e-5

    def __init__(self, spec, basis, center, scale, z, t, free):
        self.spec, self.basis, self.center, self.scale = spec, basis, center, scale
        self.z0, self.t0, self.free = z, t, free
        self.n, self.K = basis.n, z.size

    def points(self, t):
        z = self.spec._at(t, near=self.z0)
        return (np.asarray(z, complex) - self.center) / self.scale

    def dpoints(self, t):
        h = self.H_T
        return (self.points(t + h) - self.points(t - h)) / (2 * h)

    def pack(self, c, v, e):
        return np.concatenate([c.real, c.imag, v, [e], self.t0[self.free]])

    def unpack(self, u):
        n, K = self.n, self.K
        c = u[:n] + 1j * u[n : 2 * n]
        v = u[2 * n : 2 * n + K]
        e = u[2 * n + K]
        t = self.t0.copy()
        t[self.free] = u[2 * n + K + 1 :]
        return c, v, e, t

    def residual(self, u):
        c, v, e, t = self.unpack(u)
        x = self.points(t)
        a, B, da, dB = _basis_cols(self.basis, x, deriv=True)
        r = a + B @ c
        dr = (da + dB @ c) * self.dpoints(t)
        stat = 2 * np.real(np.conj(r) * dr)
        return np.concatenate([
            _cplx(B.conj().T @ (v * r)),
            np.abs(r) ** 2 - e,
            stat[self.free] / max(e, 1e-300),
            [np.sum(v) - 1.0],
        ])

    def jacobian(self, u, F):
        J = np.empty((F.size, u.size))
        n2 = 2 * self.n + self.K + 1
        for j in range(u.size):
            # parameter columns differentiate a difference quotient: wider step
            h = (1e-5 if j >= n2 else 1e-7) * max(1.0, abs(u[j]))
            up, um = u.copy(), u.copy()
            up[j] += h
            um[j] -= h
            J[:, j] = (self.residual(up) - self.residual(um)) / (2 * h)
        return J

    def solve(self, u, steps=25):
        """Damped Newton; returns the iterate with the smallest residual."""
        F = self.residual(u)
        fn = np.max(np.abs(F))
        for _ in range(steps):
            if fn < 1e-14:
                break
            d = np.linalg.lstsq(self.jacobian(u, F), -F, rcond=1e-13)[0]
            lam = 1.0
            for _ in range(6):
                F_try = self.residual(u + lam * d)
                fn_try = np.max(np.abs(F_try))
                if np.isfinite(fn_try) and fn_try < fn:
                    break
                lam *= 0.5
            else:
                break
            progress = fn_try < 0.9 * fn
            u, F, fn = u + lam * d, F_try, fn_try
            if not progress:
                break
        return u


def _free_peaks(spec, f, z, t):
    """Peaks where ``|r|`` is smooth in the parameter (not corners or arc ends)."""
    h = 1e-7
    free = np.ones(z.size, bool)
    for j in range(z.size):
        if not spec.params_periodic:
            lo, hi = spec._param_bounds(t[j])
            if t[j] - lo < 10 * h or hi - t[j] < 10 * h:
                free[j] = False
                continue
        pts = spec._at(np.array([t[j] - h, t[j], t[j] + h]), near=np.full(3, z[j]))
        fm, f0, fp = f(np.asarray(pts, complex)) ** 2
        if min(abs(fp - f0), abs(f0 - fm)) / h > 0.1 * f0:
            free[j] = False
    return free


def _exchange_polish(spec, sample, basis, c, center, scale, rel_tol):
    """Continuous exchange on the peaks of ``|T|``.

    Lawson on a fixed sample converges slowly once the discrete optimum's
    active points straddle the true extrema.  Here the support is the set
    of zoomed boundary maxima of the current residual near its top, and
    Newton's method runs on the optimality system with the peak locations
    as unknowns.  Points that end with negative weight are dropped.  The
    lower bound is the weighted least-squares norm on the final points,
    which lie on the set, so it holds whatever Newton returns.

    Returns ``(c, gap, extra_points, converged)``.
    """
    n = basis.n
    m = 4 * len(sample)

    def modulus(cc):
        return lambda z: np.abs(basis.evaluate((z - center) / scale, cc))

    gap, rel, extra = np.inf, 1e-3, np.empty(0, complex)
    for _ in range(POLISH_ROUNDS):
        f = modulus(c)
        top = max(f(sample.points).max(), f(extra).max() if extra.size else 0.0)
        S, tS = boundary_peaks(spec, f, m, (1 - rel) * top)
        if not 2 <= S.size <= 4 * n + 4 or not np.all(np.isfinite(tS)):
            break
        keep = np.ones(S.size, bool)
        for _ in range(4):
            zk, tk = S[keep], tS[keep]
            try:
                sysm = _PeakSystem(spec, basis, center, scale, zk, tk, _free_peaks(spec, f, zk, tk))
                e0 = float(np.mean(f(zk) ** 2))
                u = sysm.solve(sysm.pack(c, np.full(zk.size, 1.0 / zk.size), e0))
            except (NotImplementedError, ValueError, np.linalg.LinAlgError):
                return c, gap, extra, False
            cn, v, _, tn = sysm.unpack(u)
            if np.all(v >= 0) or keep.sum() <= n + 1:
                break
            idx = np.flatnonzero(keep)
            keep[idx[v < 0]] = False
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(cn))):
            break
        xs = sysm.points(tn)
        a, B = _basis_cols(basis, xs)
        lower = _bound_on(a, B, np.arange(xs.size), v)
        fn = modulus(cn)
        peaks = boundary_peaks(spec, fn, m, 0.0)[0]
        zs = xs * scale + center
        upper = max(fn(sample.points).max(), fn(peaks).max() if peaks.size else 0.0, fn(zs).max())
        gap_new = (upper - lower) / upper
        if not gap_new < gap:
            break
        gap, c, extra = gap_new, cn, np.concatenate([peaks, zs])
        if gap < rel_tol:
            return c, gap, extra, True
        rel = min(1e-3, max(10 * gap, 1e-7))
    return c, gap, extra, False


def _lawson(basis, w, nbr, beta0, rel_tol, max_iters, allow_stall=True):
    """Inner IRLS loop.

    Convergence compares the best ``max|r|`` seen with a lower bound on the
    discrete minimax value.  Any probability weights give such a bound
    through their weighted least-squares norm.  Once the plain Lawson gap
    is small, the weights are also pooled onto local maxima of ``|r|`` and
    polished by Newton's method on that support, which is far tighter.

    Returns ``(c, r, w, iterations, gap, converged)``.  With ``allow_stall``
    the loop also returns early (``converged=False``) when the gap has not
    shrunk for a while; the caller then refines the boundary sample, which
    is what such stalls usually call for (an extreme point sitting between
    two samples).
    """
    Qn = basis.lead * basis.Q[:, basis.n]
    A = basis.Q[:, : basis.n]
    beta = beta0
    gap = best_gap = np.inf
    improved_at = 0
    since_bound = BOUND_EVERY - 1
    best_c, best_max, lower = None, np.inf, 0.0
    for it in range(1, max_iters + 1):
        c = _weighted_ls(A, Qn, w)
        r = Qn + A @ c
        ar = np.abs(r)
        rmax = ar.max()
        if rmax < best_max:
            best_c, best_max = c, rmax
        lower = max(lower, np.sqrt(np.sum(w * ar**2)))
        if (best_max - lower) / best_max < 1e-3:
            beta = min(1.0, 2 * beta0)
            since_bound += 1
        if since_bound >= BOUND_EVERY:
            since_bound = 0
            lb, cand = _support_bound(Qn, A, ar, w, nbr)
            lower = max(lower, lb)
            if cand is not None:
                cmax = np.abs(Qn + A @ cand).max()
                if cmax < best_max:
                    best_c, best_max = cand, cmax
        gap = (best_max - lower) / best_max
        if gap < rel_tol:
            return best_c, Qn + A @ best_c, w, it, gap, True
        if gap < 0.7 * best_gap:
            best_gap, improved_at = gap, it
        elif allow_stall and gap < 1e-2 and it - improved_at > STALL_WINDOW:
            return best_c, Qn + A @ best_c, w, it, gap, False
        w = w * ar**beta
        w = np.maximum(w / w.sum(), 1e-300)
    raise IterationCapError(
        f"Lawson iteration did not reach rel_tol={rel_tol:g} in {max_iters} steps",
        {"iterations": max_iters, "gap": float(gap)},
    )


def _monic_in_z(basis, c, center, scale):
    px = ComplexPoly(basis.power_coeffs(c))
    T = compose(px, ComplexPoly([-center / scale, 1.0 / scale])) * scale**basis.n
    return ComplexPoly.monic(T.coeffs)


def solve_complex(spec, n, cfg=None, seed=0):
    """Monic minimax polynomial of degree ``n`` on a compact set.

    Parameters
    ----------
    spec : SetSpec
    n : int
        Degree, at most 64.
    cfg : SolverConfig, optional
    seed : int
        Forwarded to the boundary sampler; results are deterministic.

    Returns
    -------
    ChebyshevSolution
        ``t_n`` is the largest ``|T|`` on the final refined sample together
        with a four times finer resampling.

    Raises
    ------
    IterationCapError, RefinementCapError, BasisBreakdownError
    """
    cfg = cfg or SolverConfig()
    cfg.check_degree(n)
    spec = level_set_reduce(spec)
    sample = sample_boundary(spec, cfg.m0, seed=seed)
    z = sample.points
    center = complex(np.mean(z))
    scale = float(np.max(np.abs(z - center))) or 1.0
    w = sample.weights / sample.weights.sum()
    total_iters = 0
    rounds = 0
    allow_stall = True
    extra = np.empty(0, complex)
    while True:
        x = (sample.points - center) / scale
        basis = ArnoldiBasis(x, sample.weights, n)
        nbr = _neighbours(x)
        c, r, w, it, gap, converged = _lawson(
            basis, w, nbr, cfg.lawson_exponent, cfg.rel_tol, cfg.max_iters, allow_stall
        )
        total_iters += it
        T = _monic_in_z(basis, c, center, scale)
        new = refine_boundary(sample, T, spec, tol=0.1 * cfg.rel_tol, cap=sample.generation + 2)
        if new.inserted == 0 and converged:
            break
        # the sample is not yet enough: try the continuous exchange first
        cp, gp, extra, ok = _exchange_polish(spec, sample, basis, c, center, scale, cfg.rel_tol)
        if ok:
            c, gap = cp, gp
            r = basis.lead * basis.Q[:, n] + basis.Q[:, :n] @ c
            T = _monic_in_z(basis, c, center, scale)
            break
        extra = np.empty(0, complex)
        if new.inserted == 0:
            allow_stall = False  # refinement has nothing to add: iterate to the end
            continue
        rounds += 1
        if rounds > cfg.refine_rounds:
            raise RefinementCapError(f"refinement did not settle in {cfg.refine_rounds} rounds")
        allow_stall = True
        added = new.points[len(sample):]
        xa = (added - center) / scale
        ra = np.abs(basis.evaluate(xa, c))
        # warm start: new points enter with the weight their residual earns
        w_new = np.max(w) * (ra / np.abs(r).max()) ** 2
        w = np.concatenate([w, w_new])
        w = w / w.sum()
        sample = new

    fine = sample_boundary(spec, 4 * len(sample))
    x_all = np.concatenate([sample.points, fine.points, extra])
    vals = np.abs(basis.evaluate((x_all - center) / scale, c)) * scale**n
    t_n = float(vals.max())
    diam = float(np.max(np.abs(x_all - center))) * 2
    ext = dedupe_points(x_all[vals >= (1 - cfg.extreme_tol) * t_n], 1e-7 * diam)
    cap, est = capacity_of(spec)
    rms = float(np.sqrt(np.sum(w * np.abs(r) ** 2))) * scale**n
    return ChebyshevSolution(
        n=n,
        T=T,
        t_n=t_n,
        widom=t_n / cap**n,
        extreme_points=ext,
        method="Lawson",
        diagnostics={
            "iterations": total_iters,
            "discretization": len(sample),
            "refine_rounds": rounds,
            "residual_spread": float(gap),
            "weighted_rms": rms,
            "power_basis_max": float(np.max(np.abs(evaluate(T, sample.points)))),
        },
        capacity=cap,
        capacity_estimated=est,
    )
