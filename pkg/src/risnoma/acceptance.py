"""Acceptance suite: every release criterion as a self-contained check.

Each check recomputes its reference with an oracle that does not share code
with the quantity under test (plain quadrature, convolution, closed-form
densities) and returns a :class:`CriterionResult`.  ``run_all`` drives the
whole suite; the ``validate`` subcommand and ``tests/test_acceptance.py``
both go through it.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, stats

from . import analytic, mcsim
from .channel import RisChannelSpec, exact_pdf_SK, fit_for_analysis, fit_gamma, sample_smallscale_approx
from .params import SystemParams


@dataclass
class CriterionResult:
    number: int
    name: str
    tolerance: str
    observed: str
    passed: bool
    runtime_s: float
    budget_s: float
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (
            f"{tag} [{self.number}] {self.name}: observed {self.observed}; "
            f"tolerance {self.tolerance}; runtime {self.runtime_s:.1f} s (budget {self.budget_s:.0f} s)"
        )


@dataclass(frozen=True)
class AcceptanceSettings:
    base: SystemParams = field(default_factory=SystemParams)
    trials: int = 1_000_000
    trend_trials: int = 200_000
    seed: int = 20240601
    fit_mode: str = "moment"
    fading_mode: mcsim.FadingMode = mcsim.FadingMode.MODEL_FAITHFUL
    workers: int = 1


def _timed(number, name, budget, tolerance, fn: Callable[[], tuple[bool, str, dict]]) -> CriterionResult:
    t0 = time.perf_counter()
    ok, observed, details = fn()
    dt = time.perf_counter() - t0
    return CriterionResult(number, name, tolerance, observed, bool(ok and dt <= budget), dt, budget, details)


def _analysis_fit(params: SystemParams, fit_mode: str):
    return fit_for_analysis(RisChannelSpec(params.n, params.beta, params.A), fit_mode)


# ---------------------------------------------------------------------------
# 1. channel-law fidelity
# ---------------------------------------------------------------------------


def check_channel_fit(settings: AcceptanceSettings) -> CriterionResult:
    def run():
        spec = RisChannelSpec(5, 1.0, 1.0)
        rng = np.random.default_rng(settings.seed)
        draws = sample_smallscale_approx(spec, rng, size=1_000_000)
        ks = {}
        for mode in ("paper", "moment"):
            fit = fit_gamma(spec, mode)
            ks[mode] = stats.kstest(draws, stats.gamma(fit.shape_a, scale=fit.scale_b).cdf).statistic
        ok = ks["paper"] <= 0.05 and ks["moment"] <= 0.01
        return ok, f"KS paper={ks['paper']:.4f}, moment={ks['moment']:.4f}", ks

    return _timed(1, "channel-law fidelity", 60, "KS paper <= 0.05 and moment <= 0.01", run)


# ---------------------------------------------------------------------------
# 2. exact-law oracle
# ---------------------------------------------------------------------------


def _rayleigh_pdf(t):
    return 2.0 * t * math.exp(-t * t) if t > 0 else 0.0


def _convolved_rayleigh_pdf(t: float) -> float:
    val, _ = integrate.quad(lambda u: _rayleigh_pdf(u) * _rayleigh_pdf(t - u), 0.0, t, epsabs=1e-13, epsrel=1e-12)
    return val


def check_exact_law(settings: AcceptanceSettings) -> CriterionResult:
    def run():
        ts = np.linspace(0.1, 3.0, 30)
        err1 = max(abs(exact_pdf_SK(t, 1) - _rayleigh_pdf(t)) for t in ts)
        ts2 = np.linspace(0.1, 5.0, 30)
        err2 = max(abs(exact_pdf_SK(t, 2) - _convolved_rayleigh_pdf(t)) for t in ts2)
        ok = err1 <= 1e-5 and err2 <= 1e-4
        return ok, f"max err K=1 {err1:.2e}, K=2 {err2:.2e}", {"K1": err1, "K2": err2}

    return _timed(2, "exact-law oracle", 30, "K=1 <= 1e-5, K=2 <= 1e-4 absolute", run)


# ---------------------------------------------------------------------------
# 3. Laplace transforms vs PGFL quadrature
# ---------------------------------------------------------------------------


def _pgfl_log(lam, d, alpha, x, shape):
    """``-2 pi lam int_d^inf (1 - (1 + x y^-alpha)^-shape) y dy``."""

    def f(y):
        return -math.expm1(-shape * math.log1p(x * y**-alpha)) * y

    val, _ = integrate.quad(f, d, np.inf, epsabs=0.0, epsrel=1e-12, limit=500)
    return -2.0 * math.pi * lam * val


def oracle_laplace_typical(s, d_t, params: SystemParams, fit) -> float:
    base = s * params.p_t * params.C_t
    return math.exp(
        _pgfl_log(params.lambda_b, d_t, params.alpha_t, (1.0 - params.rho_i) * base, 1.0)
        + _pgfl_log(params.lambda_b, d_t, params.alpha_t, fit.scale_b * params.rho_i * base, fit.shape_a)
    )


def oracle_laplace_connected(s, params: SystemParams) -> float:
    return math.exp(_pgfl_log(params.lambda_b, params.r_c, params.alpha_c, s * params.p_t * params.C_c, 1.0))


def check_laplace(settings: AcceptanceSettings) -> CriterionResult:
    def run():
        rng = np.random.default_rng(settings.seed + 3)
        base = settings.base
        fit = fit_gamma(RisChannelSpec(base.n, base.beta, base.A), "moment")
        worst = 0.0
        for _ in range(10):
            d_t = rng.uniform(20.0, 600.0)
            rho = rng.uniform(0.0, 1.0)
            # s scaled so that s P C d^-alpha spans four decades around 1
            s = 10.0 ** rng.uniform(-2.0, 2.0) * d_t**base.alpha_t / (base.p_t * base.C_t)
            p = base.with_(rho_i=rho)
            got = analytic.laplace_typical(s, d_t, p, fit)
            ref = oracle_laplace_typical(s, d_t, p, fit)
            worst = max(worst, abs(got - ref) / ref)
            s_c = 10.0 ** rng.uniform(-2.0, 2.0) * base.r_c**base.alpha_c / (base.p_t * base.C_c)
            got = analytic.laplace_connected(s_c, base)
            ref = oracle_laplace_connected(s_c, base)
            worst = max(worst, abs(got - ref) / ref)
        return worst <= 1e-6, f"max rel err {worst:.2e}", {"max_rel": worst}

    return _timed(3, "Laplace transforms vs PGFL quadrature", 60, "<= 1e-6 relative", run)


# ---------------------------------------------------------------------------
# 4. specialisations
# ---------------------------------------------------------------------------


def _random_params(rng, base: SystemParams) -> SystemParams:
    return base.with_(
        alpha_t=4.0,
        p_t_dbm=rng.uniform(0.0, 30.0),
        gamma_sic_th=10.0 ** rng.uniform(-3.0, 0.0),
        gamma_t_th=10.0 ** rng.uniform(-3.0, 0.0),
        rho_i=rng.uniform(0.0, 1.0),
        n=int(rng.integers(1, 11)),
        beta=rng.uniform(0.5, 1.0),
    )


def check_specialisations(settings: AcceptanceSettings) -> CriterionResult:
    def run():
        rng = np.random.default_rng(settings.seed + 4)
        worst2 = worst4 = 0.0
        for _ in range(20):
            p = _random_params(rng, settings.base)
            terms = analytic.typical_terms(p, _analysis_fit(p, settings.fit_mode))
            q4 = analytic.coverage_from_terms(terms, p.lambda_b, 4.0, "quad")
            c4 = analytic.coverage_from_terms(terms, p.lambda_b, 4.0, "alpha4")
            worst4 = max(worst4, abs(q4 - c4) / abs(c4))
            # the radial identity at alpha = 2 checked on the same coefficients
            q2 = analytic.coverage_from_terms(terms, p.lambda_b, 2.0, "quad")
            c2 = analytic.coverage_from_terms(terms, p.lambda_b, 2.0, "alpha2")
            worst2 = max(worst2, abs(q2 - c2) / abs(c2))
        ok = worst2 <= 1e-9 and worst4 <= 1e-9
        return ok, f"max rel err alpha=2 {worst2:.2e}, alpha=4 {worst4:.2e}", {"alpha2": worst2, "alpha4": worst4}

    return _timed(4, "general quadrature vs closed forms", 30, "<= 1e-9 relative", run)


# ---------------------------------------------------------------------------
# 5-7. Monte Carlo consistency
# ---------------------------------------------------------------------------

P_T_GRID = (0.0, 10.0, 20.0, 30.0)


def check_upper_bound(settings: AcceptanceSettings) -> CriterionResult:
    def run():
        worst = math.inf
        rows = []
        for n in (5, 10):
            for beta in (1.0, 0.8):
                p = settings.base.with_(n=n, beta=beta)
                fit = _analysis_fit(p, settings.fit_mode)
                ests = mcsim.estimate_coverage_typical_sweep(
                    p, P_T_GRID, settings.trials, settings.fading_mode, settings.seed, fit, workers=settings.workers
                )
                for pt, est in zip(P_T_GRID, ests):
                    ana = analytic.coverage_typical(p.with_(p_t_dbm=pt), fit)
                    margin = ana - (est.probability - 2.0 * est.ci_halfwidth_95)
                    worst = min(worst, margin)
                    rows.append((n, beta, pt, ana, est.probability, est.ci_halfwidth_95))
        return worst >= 0.0, f"min(analytic - (MC - 2 CI)) = {worst:.3e}", {"rows": rows}

    return _timed(5, "analytic typical coverage is an upper bound", 900, "analytic >= MC - 2 CI", run)


def check_connected_exact(settings: AcceptanceSettings) -> CriterionResult:
    def run():
        grid = tuple(float(x) for x in range(0, 31, 5))
        ests = mcsim.estimate_coverage_connected_sweep(settings.base, grid, settings.trials, settings.seed, settings.workers)
        worst = 0.0
        rows = []
        for pt, est in zip(grid, ests):
            ana = analytic.coverage_connected(settings.base.with_(p_t_dbm=pt))
            worst = max(worst, abs(ana - est.probability))
            rows.append((pt, ana, est.probability))
        return worst <= 0.02, f"max |analytic - MC| = {worst:.2e}", {"rows": rows}

    return _timed(6, "connected-user exactness", 300, "<= 0.02 absolute", run)


def check_trends(settings: AcceptanceSettings) -> CriterionResult:
    def run():
        base = settings.base.with_(p_t_dbm=20.0)
        trials, seed, mode = settings.trend_trials, settings.seed, settings.fading_mode
        typ = {}
        for beta in (1.0, 0.8):
            for n in range(1, 11):
                p = base.with_(n=n, beta=beta)
                typ[beta, n] = mcsim.estimate_coverage_typical(
                    p, trials, mode, seed, _analysis_fit(p, settings.fit_mode), workers=settings.workers
                )
        con = {n: mcsim.estimate_coverage_connected(base.with_(n=n), trials, seed + 1, settings.workers) for n in range(1, 11)}

        def slack(a, b):
            return a.ci_halfwidth_95 + b.ci_halfwidth_95

        mono = all(
            typ[1.0, n + 1].probability + slack(typ[1.0, n], typ[1.0, n + 1]) >= typ[1.0, n].probability
            for n in range(1, 10)
        )
        flat = all(abs(con[n].probability - con[1].probability) <= 2 * slack(con[n], con[1]) for n in range(2, 11))
        dom_n = all(
            typ[1.0, n].probability + slack(typ[1.0, n], typ[0.8, n]) >= typ[0.8, n].probability for n in range(1, 11)
        )
        sweep = {
            beta: mcsim.estimate_coverage_typical_sweep(
                settings.base.with_(beta=beta),
                P_T_GRID,
                trials,
                mode,
                seed,
                _analysis_fit(settings.base.with_(beta=beta), settings.fit_mode),
                workers=settings.workers,
            )
            for beta in (1.0, 0.8)
        }
        dom_p = all(hi.probability + slack(hi, lo) >= lo.probability for hi, lo in zip(sweep[1.0], sweep[0.8]))
        ok = mono and flat and dom_n and dom_p
        obs = f"monotone in n={mono}, connected flat={flat}, beta=1 dominates={dom_n and dom_p}"
        return ok, obs, {"typical": typ, "connected": con, "sweep": sweep}

    return _timed(7, "trend reproduction", 900, "within CI slack", run)


# ---------------------------------------------------------------------------
# 8. trivial limits
# ---------------------------------------------------------------------------


def check_limits(settings: AcceptanceSettings) -> CriterionResult:
    def run():
        base = settings.base
        fit = _analysis_fit(base, settings.fit_mode)
        trials, seed = max(settings.trend_trials // 10, mcsim.MIN_TRIALS), settings.seed
        zero = base.with_(gamma_sic_th=0.0, gamma_t_th=0.0, gamma_c_th=0.0)
        a_t0 = analytic.coverage_typical(zero, fit)
        a_c0 = analytic.coverage_connected(zero)
        m_t0 = mcsim.estimate_coverage_typical(zero, trials, settings.fading_mode, seed, fit).probability
        m_c0 = mcsim.estimate_coverage_connected(zero, trials, seed).probability
        bad = base.with_(gamma_sic_th=base.a_c / base.a_t + 0.01, gamma_c_th=base.a_c / base.a_t + 0.01)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", analytic.InfeasibleThresholdWarning)
            a_t1 = analytic.coverage_typical(bad, fit)
            a_c1 = analytic.coverage_connected(bad)
        m_t1 = mcsim.estimate_coverage_typical(bad, trials, settings.fading_mode, seed, fit).probability
        m_c1 = mcsim.estimate_coverage_connected(bad, trials, seed).probability
        ok = (
            a_t0 == 1.0
            and a_c0 == 1.0
            and m_t0 >= 0.999
            and m_c0 >= 0.999
            and a_t1 == 0.0
            and a_c1 == 0.0
            and m_t1 == 0.0
            and m_c1 == 0.0
        )
        obs = (
            f"zero thresholds: analytic ({a_t0}, {a_c0}), MC ({m_t0}, {m_c0}); "
            f"infeasible: analytic ({a_t1}, {a_c1}), MC ({m_t1}, {m_c1})"
        )
        return ok, obs, {}

    return _timed(8, "trivial limits", 300, "exactly 1 / >= 0.999 and exactly 0", run)


CHECKS = (
    check_channel_fit,
    check_exact_law,
    check_laplace,
    check_specialisations,
    check_upper_bound,
    check_connected_exact,
    check_trends,
    check_limits,
)


def run_all(settings: AcceptanceSettings | None = None, report: Callable[[str], None] | None = print) -> list[CriterionResult]:
    settings = settings or AcceptanceSettings()
    results = []
    for check in CHECKS:
        res = check(settings)
        if report is not None:
            report(res.line())
        results.append(res)
    return results
