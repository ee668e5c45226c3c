"""Result and configuration types shared by the Chebyshev solvers."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..poly import ComplexPoly, roots

SOLVER_DEGREE_CAP = 64


class NotAvailable(LookupError):
    """No closed form is known for this (family, degree) pair."""


class SolverError(RuntimeError):
    """Base class for solver failures; carries the best iterate seen."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class IterationCapError(SolverError):
    """Inner iteration limit reached before convergence."""


class BasisBreakdownError(SolverError):
    """The orthogonal basis recurrence lost rank."""


class ExchangeCyclingError(SolverError):
    """The Remez reference kept cycling despite perturbed restarts."""


class DefectStagnationError(SolverError):
    """The alternation defect stopped shrinking."""


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the numerical solvers.

    Attributes
    ----------
    m0 : int
        Initial number of boundary points.  Must be at least ``8 n``.
    lawson_exponent : float
        Exponent ``beta`` in the weight update ``w <- w |r|^beta``; doubled
        (up to 1) once the duality gap drops below ``1e-3``.
    max_iters : int
        Cap on inner iterations per refinement round.
    rel_tol : float
        Relative convergence threshold of the inner loop.
    refine_rounds : int
        Cap on boundary refinement rounds.
    lp_angles : int
        Rotations in the outer linearization used by the LP oracle.
    extreme_tol : float
        Relative threshold for reporting extreme points.
    """

    m0: int = 512
    lawson_exponent: float = 0.5
    max_iters: int = 20000
    rel_tol: float = 1e-8
    refine_rounds: int = 8
    lp_angles: int = 64
    extreme_tol: float = 1e-5

    def __post_init__(self):
        for name in ("m0", "max_iters", "refine_rounds", "lp_angles"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.lawson_exponent <= 1:
            raise ValueError("lawson_exponent must lie in (0, 1]")
        if not self.rel_tol >= 1e-12:
            raise ValueError("rel_tol must be at least 1e-12")
        if not 0 < self.extreme_tol < 1:
            raise ValueError("extreme_tol must lie in (0, 1)")

    def check_degree(self, n):
        if n < 1:
            raise ValueError("degree must be at least 1")
        if n > SOLVER_DEGREE_CAP:
            raise ValueError(f"degree {n} exceeds the solver cap {SOLVER_DEGREE_CAP}")
        if self.m0 < 8 * n:
            raise ValueError(f"m0={self.m0} is too small for degree {n} (need >= {8 * n})")


@dataclass
class ChebyshevSolution:
    """A monic minimax polynomial together with its norm and provenance."""

    n: int
    T: ComplexPoly
    t_n: float
    widom: float
    extreme_points: np.ndarray
    method: str
    diagnostics: dict = field(default_factory=dict)
    capacity: float = float("nan")
    capacity_estimated: bool = False

    def __post_init__(self):
        if not self.T.is_monic() or self.T.degree != self.n:
            raise ValueError("T must be monic of degree n")
        self.extreme_points = np.asarray(self.extreme_points, complex)

    def to_dict(self):
        diag = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in self.diagnostics.items()}
        return {
            "degree": self.n,
            "coefficients": [[float(c.real), float(c.imag)] for c in self.T.coeffs],
            "t_n": self.t_n,
            "widom": self.widom,
            "capacity": self.capacity,
            "capacity_estimated": self.capacity_estimated,
            "method": self.method,
            "diagnostics": diag,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def widom_factor(sol, spec=None):
    """``t_n / C^n`` together with a flag telling whether ``C`` was estimated.

    When ``spec`` is given the capacity is recomputed from it, otherwise
    the one stored on the solution is used.
    """
    if spec is not None:
        from ..potential import green_model

        model = green_model(spec)
        cap, est = model.capacity, model.estimate
    else:
        cap, est = sol.capacity, sol.capacity_estimated
    return sol.t_n / cap**sol.n, est


def capacity_of(spec):
    from ..potential import green_model

    model = green_model(spec)
    return model.capacity, model.estimate


def level_roots(T, value):
    """Distinct roots of ``T - value`` with multiplicities."""
    rs = roots(T - ComplexPoly([value]))
    return rs.roots, rs.multiplicities


def extreme_points_on(T, t, spec, tol=1e-7):
    """Points of the set where ``T = +t`` or ``T = -t``.

    For a Chebyshev polynomial these are extreme points; falls back to an
    empty array if the root finder gives up.
    """
    from ..poly import RootFindingError

    out = []
    scale = max(1.0, _spec_scale(spec))
    try:
        for s in (1.0, -1.0):
            r, _ = level_roots(T, s * t)
            out.append(r[spec.contains(r, tol=tol * scale)])
    except RootFindingError:
        return np.array([], complex)
    pts = np.concatenate(out) if out else np.array([], complex)
    return np.sort_complex(pts)


def _spec_scale(spec):
    from ..sets import boundary_diameter

    return boundary_diameter(spec, 256)


def dedupe_points(z, tol):
    z = np.sort_complex(np.asarray(z, complex))
    keep = []
    for p in z:
        if not keep or np.min(np.abs(np.asarray(keep) - p)) > tol:
            keep.append(p)
    return np.asarray(keep, complex)


def relative_gap(a, b):
    return abs(a - b) / max(abs(a), abs(b), math.ulp(1.0))
