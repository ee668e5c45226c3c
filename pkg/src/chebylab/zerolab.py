"""Zero-counting measures of Chebyshev polynomials and density diagnostics."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .chebsolve import SolverConfig, closed_form, has_closed_form, solve_complex
from .poly import evaluate, roots
from .potential import EmpiricalMeasure, balayage_residual, far_ring, green_model
from .tables import csv_text
from .sets import convex_hull, distance_to_set, sample_boundary

BOUNDARY_TOL = 1e-9
VANISHING_THRESHOLD = 0.005
POSITIVE_THRESHOLD = 0.02


# ---------------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegionSpec:
    """A disk ``(center, radius)`` or an axis-aligned rectangle ``(lower_left, upper_right)``."""

    shape: str
    center: complex = 0j
    radius: float = 0.0
    corners: tuple = ()

    def __post_init__(self):
        if self.shape == "Disk":
            if not self.radius > 0:
                raise ValueError("region radius must be positive")
        elif self.shape == "Rectangle":
            lo, hi = (complex(c) for c in self.corners)
            if not (hi.real > lo.real and hi.imag > lo.imag):
                raise ValueError("rectangle needs positive sides")
            object.__setattr__(self, "corners", (lo, hi))
        else:
            raise ValueError(f"unknown region shape {self.shape!r}")

    @classmethod
    def disk(cls, center, radius):
        return cls("Disk", complex(center), float(radius))

    @classmethod
    def rectangle(cls, lower_left, upper_right):
        return cls("Rectangle", corners=(complex(lower_left), complex(upper_right)))

    def inside(self, z, tol=BOUNDARY_TOL):
        """Strict interior, with points within ``tol`` of the edge counted in."""
        z = np.asarray(z, complex)
        if self.shape == "Disk":
            return np.abs(z - self.center) < self.radius + tol
        lo, hi = self.corners
        return (
            (z.real > lo.real - tol)
            & (z.real < hi.real + tol)
            & (z.imag > lo.imag - tol)
            & (z.imag < hi.imag + tol)
        )

    def to_dict(self):
        if self.shape == "Disk":
            return {"shape": "Disk", "center": [self.center.real, self.center.imag], "radius": self.radius}
        lo, hi = self.corners
        return {"shape": "Rectangle", "corners": [[lo.real, lo.imag], [hi.real, hi.imag]]}

    @classmethod
    def from_dict(cls, d):
        if d["shape"] == "Disk":
            return cls.disk(complex(*d["center"]), d["radius"])
        (a, b), (c, e) = d["corners"]
        return cls.rectangle(complex(a, b), complex(c, e))


# ---------------------------------------------------------------------------
# zero measures
# ---------------------------------------------------------------------------


def zero_measure(sol):
    """``(1/n) sum_j delta_{w_j}`` over the zeros of ``sol.T`` with multiplicity."""
    rs = roots(sol.T)
    n = sol.n
    masses = rs.multiplicities / n
    # exact rational masses: multiplicities are integers summing to n
    return EmpiricalMeasure(rs.roots, masses, {"n": n, "method": sol.method})


def count_in_region(mu, region):
    """Total mass of atoms inside ``region``."""
    return mu.mass_where(region.inside(mu.atoms))


@dataclass
class FejerResult:
    passed: bool
    max_violation: float

    def __bool__(self):
        return self.passed


def fejer_check(mu, spec, m=2048):
    """Every atom lies in the convex hull of the set (slack ``1e-6`` diameters)."""
    hull = convex_hull(sample_boundary(spec, m).points)
    slack = 1e-6 * max(hull.diameter, 1e-300)
    viol = hull.violation(mu.atoms, slack)
    worst = float(np.max(viol)) if viol.size else 0.0
    return FejerResult(worst <= 0.0, worst)


def exterior_count(mu, spec, s_margin):
    """Atoms in the hull that stay at distance ``>= s_margin`` from the set."""
    if not s_margin > 0:
        raise ValueError("s_margin must be positive")
    hull = convex_hull(sample_boundary(spec, 2048).points)
    z = mu.atoms
    in_hull = hull.contains(z, slack=1e-9)
    far = distance_to_set(spec, z) >= s_margin
    return int(np.sum(in_hull & far))


def nthroot_asymptotics(sol, model, test_points, spec=None):
    """``max | |T_n(z)|^{1/n} / (C e^{G(z)}) - 1 |`` over exterior test points.

    When ``spec`` is given, points inside its convex hull are rejected.
    """
    z = np.atleast_1d(np.asarray(test_points, complex))
    if spec is not None:
        hull = convex_hull(sample_boundary(spec, 1024).points)
        if np.any(hull.contains(z, slack=1e-9)):
            raise ValueError("test points must lie outside the convex hull")
    lhs = np.abs(evaluate(sol.T, z)) ** (1.0 / sol.n)
    rhs = model.capacity * np.exp(model.green(z))
    return float(np.max(np.abs(lhs / rhs - 1.0)))


# ---------------------------------------------------------------------------
# density experiment
# ---------------------------------------------------------------------------


@dataclass
class DensityReport:
    n_values: list
    region_fractions: list
    liminf_estimate: float
    potential_residuals: list
    verdict: str
    missing: dict = field(default_factory=dict)
    equilibrium_mass: float = float("nan")

    def __post_init__(self):
        for f in self.region_fractions:
            if not 0.0 <= f <= 1.0 + 1e-12:
                raise ValueError("region fractions must lie in [0, 1]")

    def to_csv(self):
        return csv_text(["n", "fraction", "residual"], zip(self.n_values, self.region_fractions, self.potential_residuals))

    def summary(self):
        return json.dumps(
            {
                "verdict": self.verdict,
                "liminf_estimate": self.liminf_estimate,
                "equilibrium_mass": self.equilibrium_mass,
                "missing": {str(k): v for k, v in self.missing.items()},
            },
            sort_keys=True,
        )


def density_verdict(fractions, vanishing=VANISHING_THRESHOLD, positive=POSITIVE_THRESHOLD):
    """Threshold rule on the upper half of an n-sweep."""
    f = np.asarray(fractions, float)
    if f.size == 0:
        return "Inconclusive"
    top = f[f.size // 2 :]
    if np.all(top < vanishing):
        return "DensityVanishing"
    if np.all(top >= positive) and top[-1] >= top[0] - 1e-12:
        return "DensityPositive"
    return "Inconclusive"


def best_solution(spec, n, cfg=None):
    """Closed form when one exists, otherwise the complex solver."""
    if has_closed_form(spec, n):
        return closed_form(spec, n)
    return solve_complex(spec, n, cfg or SolverConfig())


def density_experiment(spec, region, n_list, cfg=None):
    """Fractions of zeros in ``region`` and exterior potential residuals per degree.

    Solve failures are recorded under ``missing`` and skipped.
    """
    cfg = cfg or SolverConfig()
    ring = far_ring(spec)
    model = green_model(spec)
    ns, fracs, resid, missing = [], [], [], {}
    for n in sorted(n_list):
        try:
            sol = best_solution(spec, n, cfg)
            mu = zero_measure(sol)
        except Exception as exc:  # recorded, the sweep continues
            missing[n] = f"{type(exc).__name__}: {exc}"
            continue
        ns.append(n)
        fracs.append(count_in_region(mu, region))
        resid.append(balayage_residual(mu, spec, ring, model))
    from .potential import equilibrium_measure

    mu_e = equilibrium_measure(spec, 400)
    top = fracs[len(fracs) // 2 :]
    return DensityReport(
        n_values=ns,
        region_fractions=fracs,
        liminf_estimate=float(min(top)) if top else float("nan"),
        potential_residuals=resid,
        verdict=density_verdict(fracs),
        missing=missing,
        equilibrium_mass=count_in_region(mu_e, region),
    )


def zero_cloud_csv(mu):
    return mu.to_csv()
