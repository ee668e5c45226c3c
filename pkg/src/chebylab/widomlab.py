"""Widom factors, Totik-Widom type bounds, level-set monotonicity and antenna scans."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chebsolve import SolverConfig, closed_form, has_closed_form, solve_complex, solve_real
from .potential import green_model, pw_sum
from .tables import csv_text
from .sets import Interval, KochAntenna, Lemniscate, PolynomialPreimage, RealIntervalUnion, level_set, level_set_reduce

CSV_COLUMNS = ("set", "n", "alpha", "t_n", "cap_pow", "widom", "bound", "slack", "method")
BOUND_RTOL = 1e-9


@dataclass
class WidomRow:
    n: int
    t_n: float
    cap_pow: float
    widom: float
    method: str
    alpha: float = 0.0
    error: str = ""


@dataclass
class WidomScan:
    """Widom factors of one set over a list of degrees."""

    spec: object
    rows: list = field(default_factory=list)
    label: str = ""

    def widoms(self):
        return {r.n: r.widom for r in self.rows if not r.error}

    def check(self):
        """Recomputation and lower-bound invariants; returns failing rows."""
        bad = []
        for r in self.rows:
            if r.error:
                continue
            if abs(r.widom - r.t_n / r.cap_pow) > 1e-12 * abs(r.widom) or r.widom < 1 - 1e-9:
                bad.append(r)
        return bad

    def to_csv(self):
        name = self.label or self.spec.variant
        return csv_text(CSV_COLUMNS, [(name, r.n, r.alpha, r.t_n, r.cap_pow, r.widom, "", "", r.method) for r in self.rows])


@dataclass
class TWBoundReport:
    """One bound check ``lhs <= rhs``; passes when ``slack >= -1e-9 rhs``."""

    bound_name: str
    lhs: float
    rhs: float
    n: int = 0
    alpha: float = 0.0
    cap_pow: float = float("nan")
    method: str = ""
    flags: tuple = ()

    @property
    def slack(self):
        return self.rhs - self.lhs

    @property
    def passed(self):
        return self.slack >= -BOUND_RTOL * abs(self.rhs)

    def row(self, set_name):
        widom = self.lhs / self.cap_pow if self.cap_pow == self.cap_pow else float("nan")
        return [set_name, self.n, self.alpha, self.lhs, self.cap_pow, widom, self.rhs, self.slack, self.method]


def reports_to_csv(reports, set_name):
    return csv_text(CSV_COLUMNS + ("bound_name", "pass"), [r.row(set_name) + [r.bound_name, r.passed] for r in reports])


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------


def solve_best(spec, n, cfg=None):
    """Closed form first, then Remez for real sets, then the complex solver."""
    if has_closed_form(spec, n):
        return closed_form(spec, n)
    cfg = cfg or SolverConfig()
    red = level_set_reduce(spec)
    if getattr(red, "is_real", False):
        return solve_real(red, n, cfg)
    return solve_complex(red, n, cfg)


def widom_scan(spec, n_list, cfg=None, alpha=0.0, label=""):
    """Widom factors for each degree; failures become rows with ``error`` set."""
    model = green_model(spec)
    scan = WidomScan(spec, label=label)
    for n in n_list:
        cap_pow = model.capacity**n
        try:
            sol = solve_best(spec, n, cfg)
        except Exception as exc:
            scan.rows.append(WidomRow(n, float("nan"), cap_pow, float("nan"), "failed", alpha, f"{type(exc).__name__}: {exc}"))
            continue
        method = sol.method + ("+estimated-capacity" if model.estimate else "")
        scan.rows.append(WidomRow(n, sol.t_n, cap_pow, sol.t_n / cap_pow, method, alpha))
    return scan


def _degree_zero_widom():
    # t_0 = 1 (empty product) and C^0 = 1
    return 1.0


def lemniscate_bound(P, alpha, cfg=None, test_range=None):
    """Check ``W_m <= Q = max_{j < deg P} W_j`` on a range of degrees.

    Widom factors below ``deg P`` come from the solver; at multiples of
    ``deg P`` the closed form ``P^k`` applies.  Returns the reports and ``Q``.
    """
    d = P.degree
    if d < 2:
        raise ValueError("lemniscate_bound needs deg P >= 2")
    spec = Lemniscate(P, alpha)
    cap = green_model(spec).capacity
    base = [_degree_zero_widom()]
    for j in range(1, d):
        sol = solve_best(spec, j, cfg)
        base.append(sol.t_n / cap**j)
    Q = max(base)
    ms = test_range if test_range is not None else range(1, 3 * d + 1)
    reports = []
    for m in ms:
        sol = solve_best(spec, m, cfg)
        reports.append(
            TWBoundReport("lemniscate-Q", sol.t_n, Q * cap**m, m, 0.0, cap**m, sol.method)
        )
    return reports, Q, base


def levelset_monotonicity(spec, alphas, n, cfg=None, tol=None):
    """Widom factors of level sets along increasing ``alphas``.

    Returns ``(passed, table)`` where ``table`` rows are ``(alpha, widom, method)``
    and the check allows increases up to ``2 * rel_tol`` relative.
    """
    cfg = cfg or SolverConfig()
    tol = 2 * cfg.rel_tol if tol is None else tol
    alphas = list(alphas)
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alphas must be strictly increasing")
    table = []
    for a in alphas:
        ls = level_set(spec, a)
        sol = solve_best(ls, n, cfg)
        cap = green_model(ls).capacity
        table.append((a, sol.t_n / cap**n, sol.method))
    w = [row[1] for row in table]
    passed = all(w2 <= w1 * (1 + tol) for w1, w2 in zip(w, w[1:]))
    return passed, table


def _real_pieces(spec):
    spec = level_set_reduce(spec)
    if isinstance(spec, (Interval, RealIntervalUnion)) or (isinstance(spec, PolynomialPreimage) and spec.is_real):
        return spec
    raise TypeError(f"a real set is required, got {spec.variant}")


def _pw(spec):
    if isinstance(spec, Interval):
        return 0.0
    return pw_sum(spec).pw_sum


def levelset_real_bound(spec, alphas, n_list, cfg=None):
    """Level-set bound for real sets in both exponent variants.

    For each ``(n, alpha)`` two reports are produced: ``levelset-nalpha`` with
    factor ``1 + e^{-n alpha}`` and ``levelset-2nalpha`` with the sharper
    ``1 + e^{-2 n alpha}``.  Both use ``e^{PW} C(e^alpha)^n``.
    """
    spec = _real_pieces(spec)
    pw = _pw(spec)
    cap = green_model(spec).capacity
    out = []
    for a in alphas:
        ls = level_set(spec, a)
        cap_a = math.exp(a) * cap
        for n in n_list:
            sol = solve_best(ls, n, cfg)
            cp = cap_a**n
            for name, factor in (("levelset-nalpha", 1 + math.exp(-n * a)), ("levelset-2nalpha", 1 + math.exp(-2 * n * a))):
                out.append(TWBoundReport(name, sol.t_n, factor * math.exp(pw) * cp, n, a, cp, sol.method))
    return out


def tw_real_bound(spec, n_list, cfg=None):
    """``t_n <= 2 e^{PW} C^n`` on computed solutions of a real set."""
    spec = _real_pieces(spec)
    pw = _pw(spec)
    cap = green_model(spec).capacity
    out = []
    for n in n_list:
        sol = solve_best(spec, n, cfg)
        cp = cap**n
        out.append(TWBoundReport("tw-real", sol.t_n, 2 * math.exp(pw) * cp, n, 0.0, cp, sol.method))
    return out


# ---------------------------------------------------------------------------
# antennas
# ---------------------------------------------------------------------------

ANTENNA_RULES = ("snowflake", "geometric", "zero")


def antenna_schedule(rule, depth):
    """``a_j`` for ``j = 1..depth-1`` under a named rule."""
    j = np.arange(1, max(depth, 2))
    if rule == "snowflake":
        return tuple(np.ones(j.size))
    if rule == "geometric":
        return tuple(3.0 ** (-j))
    if rule == "zero":
        return tuple(np.zeros(j.size))
    raise ValueError(f"unknown schedule rule {rule!r}; expected one of {ANTENNA_RULES}")


def antenna_scan(rule, depth_list, beta, n_list, cfg=None):
    """Widom scans of Koch antennas at several truncation depths.

    Capacities come from the Leja model and are flagged as estimates in
    the method tag.
    """
    scans = []
    for depth in depth_list:
        spec = KochAntenna(antenna_schedule(rule, depth), depth, beta)
        scans.append(widom_scan(spec, n_list, cfg, label=f"koch-{rule}-d{depth}"))
    return scans


def interval_levelset_ratio(n, alpha):
    """``W_n(e^alpha) / W_n(e)`` for ``[-2, 2]`` from closed forms."""
    base = closed_form(Interval(-2.0, 2.0), n).widom
    return closed_form(level_set(Interval(-2.0, 2.0), alpha), n).widom / base
