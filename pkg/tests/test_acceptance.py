"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` to see the summary lines
among the test output.
"""
import json
import math

import numpy as np
import pytest

from chebylab import cli
from chebylab.chebsolve import SolverConfig, certificate_check, closed_form, solve_complex, solve_real
from chebylab.experiments import ExperimentConfig
from chebylab.poly import ComplexPoly, evaluate
from chebylab.potential import capacity, far_ring, green_model, leja_capacity, pw_sum, balayage_residual
from chebylab.sets import ConfocalEllipse, Disk, Interval, Lemniscate, LevelSet, PolynomialPreimage
from chebylab.widomlab import lemniscate_bound, levelset_monotonicity, levelset_real_bound, tw_real_bound
from chebylab.zerolab import RegionSpec, count_in_region, fejer_check, zero_measure

BERN = ComplexPoly([-1, 0, 1])
P2 = ComplexPoly([-3, 0, 1])
GOLDEN = (3 + math.sqrt(5)) / 2


@pytest.fixture
def report(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {k:>2} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


def test_criterion_01_faber_ellipse(report):
    worst_cf = worst_sol = worst_w = 0.0
    for a in (0.1, 0.5):
        spec = ConfocalEllipse(a)
        for n in range(1, 21):
            exact = math.exp(n * a) + math.exp(-n * a)
            cf = closed_form(spec, n)
            sol = solve_complex(spec, n)
            worst_cf = max(worst_cf, abs(cf.t_n - exact) / exact)
            worst_sol = max(worst_sol, abs(sol.t_n - exact) / exact)
            w = sol.t_n / math.exp(a) ** n
            worst_w = max(worst_w, abs(w - (1 + math.exp(-2 * n * a))))
    ok = worst_cf <= 1e-12 and worst_sol <= 1e-4 and worst_w <= 1e-4
    report(1, ok, f"closed-form rel err {worst_cf:.1e}, solver rel err {worst_sol:.1e}, widom err {worst_w:.1e}")


def test_criterion_02_interval_golden(report):
    spec = Interval(-2, 2)
    worst = 0.0
    worst_w = 0.0
    for n in range(1, 13):
        for sol in (solve_complex(spec, n), solve_real(spec, n)):
            worst = max(worst, abs(sol.t_n - 2) / 2)
            worst_w = max(worst_w, abs(sol.t_n / capacity(spec) ** n - 2))
    report(2, worst <= 1e-6 and worst_w <= 2e-6, f"max rel err of t_n over both solvers {worst:.1e}, widom err {worst_w:.1e}")


def test_criterion_03_lemniscate(report):
    spec = Lemniscate(BERN, 1.0)
    widoms = [closed_form(spec, n).widom for n in (2, 4, 6)]
    sol = solve_complex(spec, 2)
    coef_err = float(np.max(np.abs(sol.T.coeffs - BERN.coeffs)))
    reports, Q, _ = lemniscate_bound(BERN, 1.0)
    min_slack = min(r.slack for r in reports)
    ok = widoms == [1.0, 1.0, 1.0] and coef_err <= 1e-4 and min_slack >= 0
    report(3, ok, f"W_2,4,6 = {widoms}, coefficient err {coef_err:.1e}, Q = {Q:.6f}, min slack {min_slack:.3e} over m = 1..6")


def test_criterion_04_period_two_cosh(report):
    worst_cf = worst_sol = 0.0
    statuses = []
    for a in (0.1, 0.3):
        spec = LevelSet(PolynomialPreimage(P2), a)
        for k in (1, 2):
            n = 2 * k
            exact = 2 * math.cosh(n * a)
            cf = closed_form(spec, n)
            sol = solve_complex(spec, n)
            worst_cf = max(worst_cf, abs(cf.t_n - exact) / exact)
            worst_sol = max(worst_sol, abs(sol.t_n - exact) / exact)
            statuses.append(certificate_check(spec, cf.T).status)
    ok = worst_cf <= 1e-12 and worst_sol <= 1e-4 and all(s == "Certified" for s in statuses)
    report(4, ok, f"closed-form err {worst_cf:.1e}, solver err {worst_sol:.1e}, certificates {sorted(set(statuses))}")


def test_criterion_05_monotonicity(report):
    alphas = [0.1, 0.2, 0.3, 0.4, 0.5]
    cfg = SolverConfig()
    rows = []
    ok = True
    for spec, ns in ((Interval(-2, 2), (4, 5)), (PolynomialPreimage(P2), (2, 3))):
        for n in ns:
            passed, table = levelset_monotonicity(spec, alphas, n, cfg)
            ok &= passed
            rows.append(f"{spec.variant} n={n}: " + " ".join(f"{w:.6f}" for _, w, _ in table))
    report(5, ok, "; ".join(rows))


def test_criterion_06_tw_real_bounds(report):
    spec = PolynomialPreimage(P2)
    pw = pw_sum(spec).pw_sum
    pw_err = abs(pw - 0.5 * math.log(GOLDEN))
    tw = tw_real_bound(spec, range(1, 7))
    ls = levelset_real_bound(spec, [0.1, 0.3, 1.0], range(1, 7))
    names = {r.bound_name for r in ls}
    ok = pw_err <= 1e-8 and all(r.passed for r in tw + ls) and names == {"levelset-nalpha", "levelset-2nalpha"}
    tight = min(r.slack / r.rhs for r in ls if r.bound_name == "levelset-2nalpha")
    report(6, ok, f"pw err {pw_err:.1e}; {len(tw)} TW rows and {len(ls)} level-set rows pass; min relative slack of 2n-alpha variant {tight:.2e}")


def _golden_solutions():
    out = []
    for a in (0.1, 0.5):
        for n in (4, 9, 16, 20):
            out.append((ConfocalEllipse(a), solve_complex(ConfocalEllipse(a), n)))
    for n in (3, 8, 12):
        out.append((Interval(-2, 2), solve_real(Interval(-2, 2), n)))
    for n in (2, 3, 4, 6):
        out.append((Lemniscate(BERN, 1.0), solve_complex(Lemniscate(BERN, 1.0), n)))
    for a in (0.1, 0.3):
        for n in (2, 3, 4):
            ls = LevelSet(PolynomialPreimage(P2), a)
            out.append((ls, solve_complex(ls, n)))
    for spec, ns in (
        (Disk(0, 1), (5, 12)),
        (Interval(-2, 2), (5, 16)),
        (ConfocalEllipse(0.5), (6, 20)),
        (Lemniscate(BERN, 1.0), (4, 8)),
        (PolynomialPreimage(P2), (4, 8)),
        (LevelSet(PolynomialPreimage(P2), 0.3), (4, 8)),
    ):
        for n in ns:
            out.append((spec, closed_form(spec, n)))
    return out


def test_criterion_07_zero_measures(report):
    lem = Lemniscate(BERN, 1.0)
    exact = True
    for n in (2, 4, 6, 8):
        mu = zero_measure(closed_form(lem, n))
        order = np.argsort(mu.atoms.real)
        exact &= bool(np.allclose(mu.atoms[order], [-1, 1], atol=1e-9)) and list(mu.masses[order]) == [0.5, 0.5]
        exact &= count_in_region(mu, RegionSpec.disk(1, 0.1)) == 0.5

    fejer = [fejer_check(zero_measure(sol), spec) for spec, sol in _golden_solutions()]
    fejer_ok = all(f.passed for f in fejer)

    families = {
        "Interval": (Interval(-2, 2), [8, 10, 12, 16, 20]),
        "ConfocalEllipse": (ConfocalEllipse(0.5), [8, 10, 12, 16, 20]),
        "Lemniscate": (lem, [8, 10, 12, 16, 20]),
        "PolynomialPreimage": (PolynomialPreimage(P2), [8, 10, 12, 16, 20]),
        "LevelSet": (LevelSet(PolynomialPreimage(P2), 0.3), [8, 10, 12, 16, 20]),
        "Disk": (Disk(0, 1), [8, 10, 12, 16, 20]),
    }
    bal_ok = True
    worst = 0.0
    for spec, ns in families.values():
        ring = far_ring(spec)
        model = green_model(spec)
        res = [balayage_residual(zero_measure(closed_form(spec, n)), spec, ring, model) for n in ns]
        worst = max(worst, max(res))
        # nonincreasing, with a floor for residuals already at rounding level
        bal_ok &= max(res) <= 1e-2 and all(b <= max(a, 1e-12) for a, b in zip(res, res[1:]))
    ok = exact and fejer_ok and bal_ok
    report(7, ok, f"Bernoulli masses exact: {exact}; Fejer {sum(f.passed for f in fejer)}/{len(fejer)}; max balayage residual {worst:.1e}, monotone: {bal_ok}")


def test_criterion_08_nth_root(report):
    vals = []
    for n in range(1, 21):
        T = closed_form(Interval(-2, 2), n).T
        vals.append(abs(evaluate(T, 3.0)) ** (1 / n))
    solver_val = abs(evaluate(solve_real(Interval(-2, 2), 20).T, 3.0)) ** (1 / 20)
    errs = [abs(v - GOLDEN) for v in vals]
    monotone = all(b <= a for a, b in zip(errs, errs[1:]))
    ok = errs[-1] <= 0.02 and abs(solver_val - GOLDEN) <= 0.02 and monotone
    report(8, ok, f"|T_20(3)|^(1/20) = {vals[-1]:.6f} (solver {solver_val:.6f}) vs {GOLDEN:.6f}, err {errs[-1]:.2e}, monotone: {monotone}")


def test_criterion_09_potential_kernel(report):
    rel = {}
    for spec in (Disk(0, 1), Interval(-2, 2), Lemniscate(BERN, 1.0)):
        est, _ = leja_capacity(spec, 200)
        rel[spec.variant] = abs(est - capacity(spec)) / capacity(spec)
    rng = np.random.default_rng(0)
    ring = 0.01 * np.exp(2j * np.pi * np.arange(64) / 64)
    worst = 0.0
    for spec in (Interval(-2, 2), ConfocalEllipse(0.5), Lemniscate(BERN, 1.0), PolynomialPreimage(P2), Disk(0, 1)):
        m = green_model(spec)
        c = (3 + 2 * rng.uniform(size=50)) * np.exp(2j * np.pi * rng.uniform(size=50))
        for z in c:
            worst = max(worst, abs(float(np.mean(m.green(z + ring))) - float(m.green(z))))
    ok = max(rel.values()) <= 0.01 and worst <= 1e-6
    report(9, ok, "Leja rel err " + ", ".join(f"{k} {v:.1e}" for k, v in rel.items()) + f"; mean-value defect {worst:.1e}")


EVIDENCE = ("square-corners", "disk-spike-density", "antenna-scan", "triangle-skeleton")


def test_criterion_10_evidence_experiments(report, tmp_path):
    details = []
    ok = True
    for name in EVIDENCE:
        digests = []
        for rep in ("a", "b"):
            cfg = ExperimentConfig.from_dict({"experiment": name, "output_dir": str(tmp_path / name / rep)})
            code = cli.run(cfg)
            out = tmp_path / name / rep
            manifest = json.loads((out / "manifest.json").read_text())
            files = {p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))}
            ok &= code == 0 and manifest["assertions"] == [] and bool(files)
            digests.append(files)
        same = digests[0] == digests[1]
        ok &= same
        details.append(f"{name}: {len(digests[0])} files, identical={same}")
    report(10, ok, "; ".join(details))
