"""Registered experiments.

Each experiment takes an :class:`ExperimentConfig` and returns an
:class:`ExperimentResult` holding CSV tables, named assertions and per-cell
status.  Experiments never write files themselves; the CLI does.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chebsolve import SolverConfig, certificate_check, closed_form, solve_complex
from .poly import ComplexPoly
from .potential import pw_sum
from .sets import (
    ConfocalEllipse,
    DiskPlusSpike,
    Interval,
    Lemniscate,
    LevelSet,
    Polygon,
    PolynomialPreimage,
    spec_from_dict,
)
from .tables import csv_text, points_csv
from .widomlab import (
    CSV_COLUMNS,
    antenna_scan,
    lemniscate_bound,
    levelset_monotonicity,
    levelset_real_bound,
    reports_to_csv,
    tw_real_bound,
)
from .zerolab import RegionSpec, density_experiment, exterior_count, fejer_check, zero_measure


class ConfigError(ValueError):
    """Malformed or unknown experiment configuration."""


@dataclass
class ExperimentConfig:
    experiment: str
    set: dict | None = None
    degrees: list | None = None
    solver: dict = field(default_factory=dict)
    regions: list = field(default_factory=list)
    output_dir: str = "results"
    seed: int = 0
    params: dict = field(default_factory=dict)

    FIELDS = ("experiment", "set", "degrees", "solver", "regions", "output_dir", "seed", "params")

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        unknown = sorted(set(d) - set(cls.FIELDS))
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
        if "experiment" not in d:
            raise ConfigError("config needs an 'experiment' field")
        cfg = cls(**{k: d[k] for k in cls.FIELDS if k in d})
        if cfg.experiment not in REGISTRY:
            raise ConfigError(
                f"unknown experiment {cfg.experiment!r}; registered: {', '.join(names())}"
            )
        if not isinstance(cfg.seed, int):
            raise ConfigError("seed must be an integer")
        if cfg.degrees is not None and not all(isinstance(n, int) and n >= 1 for n in cfg.degrees):
            raise ConfigError("degrees must be positive integers")
        try:
            cfg.solver_config()
            cfg.spec()
            cfg.region_specs()
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc
        return cfg

    def to_dict(self):
        return {k: getattr(self, k) for k in self.FIELDS}

    def solver_config(self):
        return SolverConfig(**self.solver)

    def spec(self, default=None):
        return spec_from_dict(self.set) if self.set else default

    def region_specs(self):
        return [RegionSpec.from_dict(r) for r in self.regions]

    def degree_list(self, default):
        return list(self.degrees) if self.degrees else list(default)


@dataclass
class ExperimentResult:
    tables: dict = field(default_factory=dict)
    assertions: list = field(default_factory=list)
    cells: list = field(default_factory=list)

    def check(self, name, passed, detail=""):
        self.assertions.append({"name": name, "passed": bool(passed), "detail": str(detail)})

    def cell(self, label, status="ok", detail=""):
        self.cells.append({"cell": label, "status": status, "detail": str(detail)})

    @property
    def passed(self):
        return all(a["passed"] for a in self.assertions)


REGISTRY = {}


def register(name, description):
    def deco(fn):
        REGISTRY[name] = (fn, description)
        return fn

    return deco


def names():
    return sorted(REGISTRY)


def list_experiments():
    """``(name, description)`` pairs in alphabetical order."""
    return [(n, REGISTRY[n][1]) for n in names()]


def run_experiment(cfg):
    fn, _ = REGISTRY[cfg.experiment]
    return fn(cfg)


BERNOULLI = ComplexPoly([-1.0, 0.0, 1.0])
PERIOD_TWO = ComplexPoly([-3.0, 0.0, 1.0])


# ---------------------------------------------------------------------------
# golden suites
# ---------------------------------------------------------------------------


@register("golden-faber", "confocal ellipses: closed form, solver and Widom factor 1 + e^{-2 n alpha}")
def golden_faber(cfg):
    res = ExperimentResult()
    tol = float(cfg.params.get("tolerance", 1e-4))
    alphas = cfg.params.get("alphas", [0.1, 0.5])
    degrees = cfg.degree_list(range(1, 21))
    scfg = cfg.solver_config()
    rows = []
    for a in alphas:
        spec = ConfocalEllipse(a)
        for n in degrees:
            exact = math.exp(n * a) + math.exp(-n * a)
            cf = closed_form(spec, n)
            sol = solve_complex(spec, n, scfg, seed=cfg.seed)
            rel = abs(sol.t_n - exact) / exact
            w_exact = 1 + math.exp(-2 * n * a)
            rows.append((a, n, exact, cf.t_n, sol.t_n, rel, cf.widom, sol.widom, w_exact))
            res.check(f"closed-form a={a} n={n}", abs(cf.t_n - exact) <= 1e-12 * exact)
            res.check(f"solver a={a} n={n}", rel <= tol, f"rel={rel:.3e}")
            res.check(f"widom a={a} n={n}", abs(sol.widom - w_exact) <= tol * w_exact)
            res.cell(f"a={a},n={n}")
    res.tables["faber.csv"] = csv_text(
        ["alpha", "n", "exact", "closed_form", "solver", "rel_err", "widom_closed", "widom_solver", "widom_exact"],
        rows,
    )
    return res


@register("golden-lemniscate", "Bernoulli lemniscate: Widom factor 1 at even degrees and the max-Widom bound")
def golden_lemniscate(cfg):
    res = ExperimentResult()
    spec = cfg.spec(Lemniscate(BERNOULLI, 1.0))
    if not isinstance(spec, Lemniscate):
        raise ConfigError("golden-lemniscate needs a Lemniscate set")
    d = spec.P.degree
    scfg = cfg.solver_config()
    for k in (1, 2, 3):
        cf = closed_form(spec, k * d)
        res.check(f"widom n={k * d}", abs(cf.widom - 1.0) <= 1e-12, cf.widom)
    sol = solve_complex(spec, d, scfg, seed=cfg.seed)
    err = float(np.max(np.abs(sol.T.coeffs - spec.P.coeffs)))
    res.check("solver recovers P", err <= 1e-4, f"max coeff err={err:.3e}")
    reports, Q, base = lemniscate_bound(spec.P, spec.alpha, scfg, cfg.degree_list(range(1, 3 * d + 1)))
    for r in reports:
        res.check(f"W_{r.n} <= Q", r.passed, f"slack={r.slack:.3e}")
    res.tables["lemniscate_bound.csv"] = reports_to_csv(reports, "lemniscate")
    res.tables["base_widom.csv"] = csv_text(["j", "widom"], list(enumerate(base)))
    return res


@register("golden-periodn-cosh", "level sets of a period-2 set: t_{2k} = 2 cosh(2 k alpha) and certificates")
def golden_periodn_cosh(cfg):
    res = ExperimentResult()
    P = PERIOD_TWO
    alphas = cfg.params.get("alphas", [0.1, 0.3])
    ks = cfg.params.get("k", [1, 2])
    tol = float(cfg.params.get("tolerance", 1e-4))
    scfg = cfg.solver_config()
    rows = []
    for a in alphas:
        spec = LevelSet(PolynomialPreimage(P), a)
        for k in ks:
            n = 2 * k
            exact = 2 * math.cosh(n * a)
            cf = closed_form(spec, n)
            sol = solve_complex(spec, n, scfg, seed=cfg.seed)
            rel = abs(sol.t_n - exact) / exact
            cert = certificate_check(spec, cf.T)
            rows.append((a, k, exact, cf.t_n, sol.t_n, rel, cert.count, cert.status))
            res.check(f"cosh a={a} k={k}", abs(cf.t_n - exact) <= 1e-12 * exact)
            res.check(f"solver a={a} k={k}", rel <= tol, f"rel={rel:.3e}")
            res.check(f"certificate a={a} k={k}", cert.certified, cert.count)
    res.tables["periodn_cosh.csv"] = csv_text(
        ["alpha", "k", "exact", "closed_form", "solver", "rel_err", "certificate_count", "certificate"], rows
    )
    return res


@register("monotonicity-thm15", "Widom factors of level sets are nonincreasing in the level")
def monotonicity(cfg):
    res = ExperimentResult()
    alphas = cfg.params.get("alphas", [0.1, 0.2, 0.3, 0.4, 0.5])
    scfg = cfg.solver_config()
    families = [("interval", Interval(-2.0, 2.0), [4, 5]), ("period2", PolynomialPreimage(PERIOD_TWO), [2, 3])]
    rows = []
    for name, spec, ns in families:
        for n in cfg.degree_list(ns):
            ok, table = levelset_monotonicity(spec, alphas, n, scfg)
            res.check(f"{name} n={n}", ok)
            rows.extend((name, n, a, w, m) for a, w, m in table)
    res.tables["monotonicity.csv"] = csv_text(["family", "n", "alpha", "widom", "method"], rows)
    return res


@register("twbound-thm16", "real-set Totik-Widom bound and both level-set bound variants on a period-2 set")
def twbound(cfg):
    res = ExperimentResult()
    spec = PolynomialPreimage(PERIOD_TWO)
    pw = pw_sum(spec).pw_sum
    exact = 0.5 * math.log((3 + math.sqrt(5)) / 2)
    res.check("pw sum", abs(pw - exact) <= 1e-8, f"{pw!r} vs {exact!r}")
    scfg = cfg.solver_config()
    degrees = cfg.degree_list(range(1, 7))
    tw = tw_real_bound(spec, degrees, scfg)
    for r in tw:
        res.check(f"tw n={r.n}", r.passed, r.slack)
    ls = levelset_real_bound(spec, cfg.params.get("alphas", [0.1, 0.3, 1.0]), degrees, scfg)
    for r in ls:
        res.check(f"{r.bound_name} n={r.n} a={r.alpha}", r.passed, r.slack)
    res.tables["tw_real.csv"] = reports_to_csv(tw, "period2")
    res.tables["levelset_bounds.csv"] = reports_to_csv(ls, "period2")
    return res


@register("bernoulli-zeros", "zero clouds of Bernoulli lemniscate Chebyshev polynomials, even and odd degrees")
def bernoulli_zeros(cfg):
    res = ExperimentResult()
    spec = Lemniscate(BERNOULLI, 1.0)
    scfg = cfg.solver_config()
    summary = []
    for n in cfg.degree_list(range(1, 9)):
        sol = closed_form(spec, n) if n % 2 == 0 else solve_complex(spec, n, scfg, seed=cfg.seed)
        mu = zero_measure(sol)
        res.tables[f"zeros_n{n:02d}.csv"] = points_csv(mu.atoms, mu.masses)
        near = RegionSpec.disk(1.0, 0.1), RegionSpec.disk(-1.0, 0.1)
        m_plus, m_minus = (mu.mass_where(r.inside(mu.atoms)) for r in near)
        summary.append((n, sol.method, sol.widom, m_plus, m_minus, len(mu)))
        if n % 2 == 0:
            exact = np.allclose(np.sort(mu.atoms.real), [-1.0, 1.0]) and np.allclose(mu.masses, 0.5)
            res.check(f"even n={n} zeros at +-1", exact and m_plus == 0.5 and m_minus == 0.5)
    res.tables["summary.csv"] = csv_text(["n", "method", "widom", "mass_near_1", "mass_near_-1", "atoms"], summary)
    return res


# ---------------------------------------------------------------------------
# evidence generators (no numeric targets)
# ---------------------------------------------------------------------------


def _density_table(report):
    return csv_text(
        ["n", "fraction", "residual"],
        list(zip(report.n_values, report.region_fractions, report.potential_residuals)),
    )


@register("square-corners", "zero density near a corner of the unit square (trend table only)")
def square_corners(cfg):
    res = ExperimentResult()
    spec = cfg.spec(Polygon((0j, 1 + 0j, 1 + 1j, 1j)))
    regions = cfg.region_specs() or [RegionSpec.disk(0j, 0.2)]
    ns = cfg.degree_list([4, 6, 8, 10, 12])
    for i, region in enumerate(regions):
        rep = density_experiment(spec, region, ns, cfg.solver_config())
        res.tables[f"density_region{i}.csv"] = _density_table(rep)
        res.tables[f"verdict_region{i}.json"] = rep.summary() + "\n"
        for n, why in rep.missing.items():
            res.cell(f"region{i},n={n}", "failed", why)
    return res


@register("disk-spike-density", "disk with a spike: zero fractions near the spike and exterior counts")
def disk_spike(cfg):
    res = ExperimentResult()
    spec = cfg.spec(DiskPlusSpike(1.0, 2.0))
    region = (cfg.region_specs() or [RegionSpec.disk(1.5, 0.2)])[0]
    ns = cfg.degree_list([4, 6, 8, 10, 12, 14, 16])
    scfg = cfg.solver_config()
    rep = density_experiment(spec, region, ns, scfg)
    res.tables["density.csv"] = _density_table(rep)
    res.tables["verdict.json"] = rep.summary() + "\n"
    margin = float(cfg.params.get("margin", 0.1))
    rows = []
    for n in rep.n_values:
        mu = zero_measure(solve_complex(spec, n, scfg, seed=cfg.seed))
        rows.append((n, exterior_count(mu, spec, margin), fejer_check(mu, spec).max_violation))
    res.tables["exterior_counts.csv"] = csv_text(["n", "exterior_count", "hull_violation"], rows)
    return res


@register("antenna-scan", "Widom factors of Koch antennas across truncation depths (raw trends)")
def antenna(cfg):
    res = ExperimentResult()
    rules = cfg.params.get("rules", ["snowflake", "geometric"])
    depths = cfg.params.get("depths", [2, 3])
    beta = float(cfg.params.get("beta", 0.4))
    ns = cfg.degree_list([2, 4, 6, 8])
    out = []
    for rule in rules:
        for scan in antenna_scan(rule, depths, beta, ns, cfg.solver_config()):
            for r in scan.rows:
                out.append((scan.label, r.n, 0.0, r.t_n, r.cap_pow, r.widom, "", "", r.method))
                if r.error:
                    res.cell(f"{scan.label},n={r.n}", "failed", r.error)
    res.tables["antenna.csv"] = csv_text(list(CSV_COLUMNS), out)
    return res


def _triangle():
    return Polygon(tuple(np.exp(1j * (np.pi / 2 + 2 * np.pi * k / 3)) for k in range(3)))


def _distance_to_segments(z, segs):
    z = np.asarray(z, complex)[:, None]
    a = np.array([s[0] for s in segs])[None, :]
    b = np.array([s[1] for s in segs])[None, :]
    t = np.clip(np.real((z - a) * np.conj(b - a)) / np.abs(b - a) ** 2, 0, 1)
    return np.min(np.abs(z - (a + t * (b - a))), axis=1)


@register("triangle-skeleton", "zeros of Chebyshev polynomials of an equilateral triangle vs its skeleton")
def triangle_skeleton(cfg):
    res = ExperimentResult()
    spec = _triangle()
    verts = list(spec.vertices)
    skeleton = [(0j, v) for v in verts]
    edges = list(zip(verts, verts[1:] + verts[:1]))
    band = float(cfg.params.get("band", 0.05))
    scfg = cfg.solver_config()
    rows = []
    for n in cfg.degree_list([3, 4, 6, 8, 9, 10, 12]):
        sol = solve_complex(spec, n, scfg, seed=cfg.seed)
        mu = zero_measure(sol)
        d_skel = _distance_to_segments(mu.atoms, skeleton)
        d_edge = _distance_to_segments(mu.atoms, edges)
        rows.append((n, sol.widom, mu.mass_where(d_skel < band), mu.mass_where(d_edge < band), float(np.max(np.abs(mu.atoms)))))
        res.tables[f"zeros_n{n:02d}.csv"] = points_csv(mu.atoms, mu.masses)
    res.tables["skeleton.csv"] = csv_text(["n", "widom", "mass_near_skeleton", "mass_near_edges", "max_modulus"], rows)
    return res
