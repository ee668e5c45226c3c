"""Chebyshev polynomials, Widom factors and zero distributions of planar sets."""
__version__ = "0.1.0"

from .chebsolve import (
    ChebyshevSolution,
    SolverConfig,
    certificate_check,
    closed_form,
    lp_oracle,
    solve_complex,
    solve_real,
)
from .poly import ComplexPoly, evaluate, roots
from .potential import capacity, equilibrium_measure, green, green_model, pw_sum
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
    level_set,
    sample_boundary,
    spec_from_dict,
)

__all__ = [
    "ChebyshevSolution",
    "ComplexPoly",
    "ConfocalEllipse",
    "Disk",
    "DiskPlusSpike",
    "Interval",
    "JuliaCauliflower",
    "KochAntenna",
    "Lemniscate",
    "LevelSet",
    "Polygon",
    "PolynomialPreimage",
    "RealIntervalUnion",
    "SolverConfig",
    "capacity",
    "certificate_check",
    "closed_form",
    "equilibrium_measure",
    "evaluate",
    "green",
    "green_model",
    "level_set",
    "lp_oracle",
    "pw_sum",
    "roots",
    "sample_boundary",
    "solve_complex",
    "solve_real",
    "spec_from_dict",
]
