"""Independent cross-checks: a linear-programming minimax oracle and
extreme-point certificates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

from ..poly import ComplexPoly, compose, evaluate, roots
from ..sets import level_set_reduce, refine_boundary, sample_boundary
from .types import SolverError

LP_MAX_DEGREE = 12
LP_MAX_POINTS = 2000


def lp_oracle(sample, n, k_angles=64):
    """Minimax monic polynomial on a point sample by linear programming.

    The modulus constraint ``|r_j| <= t`` is replaced by
    ``Re(exp(i theta_k) r_j) <= t`` for ``k_angles`` rotations, a circumscribed
    polygon, so the LP optimum ``t*`` satisfies
    ``t* <= minimax <= t* / cos(pi / k_angles)``.

    Parameters
    ----------
    sample : BoundarySample or array of complex points
    n : int
        Degree, at most 12.
    k_angles : int

    Returns
    -------
    T : ComplexPoly
        Monic LP minimizer in the power basis.
    t_n : float
        ``max_j |T(z_j)|`` over the sample, an upper bound on the discrete
        minimax value.
    """
    z = np.asarray(getattr(sample, "points", sample), complex)
    if not 1 <= n <= LP_MAX_DEGREE:
        raise ValueError(f"lp_oracle supports 1 <= n <= {LP_MAX_DEGREE}")
    if z.size > LP_MAX_POINTS:
        raise ValueError(f"lp_oracle supports at most {LP_MAX_POINTS} points")
    center = complex(np.mean(z))
    scale = float(np.max(np.abs(z - center))) or 1.0
    x = (z - center) / scale
    V = x[:, None] ** np.arange(n + 1)
    rot = np.exp(2j * np.pi * np.arange(k_angles) / k_angles)
    # Re(rot * (x^n + sum c_k x^k)) <= t with c_k = u_k + i v_k
    RV = (rot[:, None, None] * V[None, :, :]).reshape(-1, n + 1)
    A = np.hstack([RV[:, :n].real, -RV[:, :n].imag, -np.ones((RV.shape[0], 1))])
    b = -RV[:, n].real
    cost = np.zeros(2 * n + 1)
    cost[-1] = 1.0
    res = linprog(
        cost,
        A_ub=csr_matrix(A),
        b_ub=b,
        bounds=[(None, None)] * (2 * n + 1),
        method="highs",
    )
    if res.status != 0:
        raise SolverError(f"LP oracle failed: {res.message}", {"status": res.status})
    c = res.x[:n] + 1j * res.x[n : 2 * n]
    px = ComplexPoly(np.concatenate([c, [1.0]]))
    T = compose(px, ComplexPoly([-center / scale, 1.0 / scale])) * scale**n
    T = ComplexPoly.monic(T.coeffs)
    t_n = float(np.max(np.abs(evaluate(px, x)))) * scale**n
    return T, t_n


@dataclass
class Certificate:
    """Outcome of the extreme-point count.

    ``status`` is ``"Certified"`` when at least ``2 n`` points of the set
    (with multiplicity) satisfy ``P = +-||P||``, which forces ``P`` to be the
    Chebyshev polynomial; otherwise ``"Inconclusive"``.
    """

    status: str
    count: int
    points: np.ndarray
    multiplicities: np.ndarray
    norm: float

    @property
    def certified(self):
        return self.status == "Certified"

    def __bool__(self):
        return self.certified


def _set_norm(spec, P, m=4096, rounds=3):
    s = sample_boundary(spec, m)
    for _ in range(rounds):
        s2 = refine_boundary(s, P, spec, tol=1e-14, cap=rounds + 1)
        if s2.inserted == 0:
            break
        s = s2
    norm = float(np.max(np.abs(evaluate(P, s.points))))
    # critical points inside the set can carry the maximum on real pieces
    if P.degree > 1:
        crit = roots(P.derivative()).roots
        inside = crit[spec.contains(crit, tol=1e-12)]
        if inside.size:
            norm = max(norm, float(np.max(np.abs(evaluate(P, inside)))))
    return norm


def certificate_check(spec, P, tol=1e-6):
    """Count points of the set where ``P`` reaches ``+||P||`` or ``-||P||``.

    Parameters
    ----------
    spec : SetSpec
    P : ComplexPoly
        Monic of degree ``n``.
    tol : float
        Relative tolerance for membership of candidate points.

    Returns
    -------
    Certificate
        Never raises for an inconclusive count; that is a value.
    """
    if not P.is_monic():
        raise ValueError("certificate_check expects a monic polynomial")
    spec = level_set_reduce(spec)
    n = P.degree
    N = _set_norm(spec, P)
    diam = float(np.ptp(sample_boundary(spec, 256).points.real)) + float(
        np.ptp(sample_boundary(spec, 256).points.imag)
    )
    pts, mult = [], []
    for sgn in (1.0, -1.0):
        rs = roots(P - ComplexPoly([sgn * N]))
        keep = spec.contains(rs.roots, tol=tol * max(diam, 1.0))
        pts.append(rs.roots[keep])
        mult.append(rs.multiplicities[keep])
    pts = np.concatenate(pts)
    mult = np.concatenate(mult).astype(int)
    count = int(mult.sum())
    return Certificate("Certified" if count >= 2 * n else "Inconclusive", count, pts, mult, N)
