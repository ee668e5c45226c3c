"""Chebyshev polynomial solvers, closed forms and certificates."""
from .closed import closed_form, has_closed_form
from .lawson import solve_complex
from .oracle import Certificate, certificate_check, lp_oracle
from .remez import real_intervals, solve_real
from .types import (
    SOLVER_DEGREE_CAP,
    BasisBreakdownError,
    ChebyshevSolution,
    DefectStagnationError,
    ExchangeCyclingError,
    IterationCapError,
    NotAvailable,
    SolverConfig,
    SolverError,
    widom_factor,
)

__all__ = [
    "SOLVER_DEGREE_CAP",
    "BasisBreakdownError",
    "Certificate",
    "ChebyshevSolution",
    "DefectStagnationError",
    "ExchangeCyclingError",
    "IterationCapError",
    "NotAvailable",
    "SolverConfig",
    "SolverError",
    "certificate_check",
    "closed_form",
    "has_closed_form",
    "lp_oracle",
    "real_intervals",
    "solve_complex",
    "solve_real",
    "widom_factor",
]
