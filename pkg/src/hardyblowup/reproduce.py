"""Acceptance-suite drivers shared by the CLI and the test suite.

Each runner exercises one block of the toolkit end to end and returns a
SuiteReport with per-case pass/fail flags and the measured quantities, so
the same code backs `hardy-blowup reproduce --suite ...` and the
acceptance tests.  Artifacts (profiles, trajectories, sweeps) are
attached for the CLI to render as CSV plus figures.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import radial_solver as rs
from .asymptotics import fit_power
from .barriers import log_power
from .errors import HardyBlowupError
from .ode_engine import (
    OdeProblem,
    Terminal,
    default_eta,
    integrate_left,
    kappa_sweep,
)
from .regime import (
    ProblemParams,
    Verdict,
    characteristic_roots,
    existence_verdict,
    verdict_from_mu_star,
    verdict_from_p_star,
    verdict_from_threshold_s,
)

__all__ = ["CaseResult", "SuiteReport", "run_suite", "SUITES",
           "run_thresholds", "run_ode_lemma", "run_xxl_slab", "run_exhaustion"]


@dataclass
class CaseResult:
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "measured": self.measured}


@dataclass
class SuiteReport:
    suite: str
    cases: list[CaseResult]
    elapsed_s: float
    artifacts: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "elapsed_s": self.elapsed_s,
            "cases": [c.to_dict() for c in self.cases],
        }


# ---------------------------------------------------------------------------
# thresholds


def run_thresholds(seed: int = 0, n: int = 1000) -> SuiteReport:
    """Cross-consistency of the three threshold parameterizations on a
    random parameter grid, plus the root identities and mu-monotonicity."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    mu = rng.uniform(-3.0, 0.25, n)
    p = rng.uniform(1.0 + 1e-6, 5.0, n)
    s = rng.uniform(-2.0, 5.0, n)

    mismatches = 0
    guarded = 0
    margins = np.empty(n)
    verdicts = []
    for i in range(n):
        roots = characteristic_roots(mu[i])
        threshold = roots.beta_minus * (p[i] - 1.0) + 2.0
        m_s = s[i] - threshold
        margins[i] = m_s
        v_s = verdict_from_threshold_s(mu[i], p[i], s[i])
        v_p = verdict_from_p_star(mu[i], p[i], s[i])
        v_m = verdict_from_mu_star(mu[i], p[i], s[i])
        verdicts.append(v_s.value)
        # points within 1e-10 of a threshold in any comparison quantity are
        # on the fence; all three must still agree outside the guard band
        close = abs(m_s) <= 1e-10
        if not close:
            if not (v_s == v_p == v_m):
                mismatches += 1
        else:
            guarded += 1
    cases = [CaseResult(
        "three-parameterization agreement",
        mismatches == 0,
        {"n": n, "mismatches": mismatches, "guarded": guarded, "tol": 1e-10},
    )]

    worst_identity = 0.0
    for m in mu[:200]:
        r = characteristic_roots(m)
        worst_identity = max(
            worst_identity,
            abs(r.beta_minus * (1.0 - r.beta_minus) - m),
            abs(r.beta_plus * (1.0 - r.beta_plus) - m),
            abs(r.beta_minus + r.beta_plus - 1.0),
            abs(r.beta_minus * r.beta_plus - m),
        )
    cases.append(CaseResult("root identities", worst_identity < 1e-12,
                            {"worst": worst_identity, "tol": 1e-12}))

    monotone_ok = True
    for _ in range(100):
        pp = rng.uniform(1.1, 5.0)
        ss = rng.uniform(-2.0, 5.0)
        seq = np.sort(rng.uniform(-3.0, 0.25, 8))
        was_existence = False
        for m in seq:
            v = verdict_from_threshold_s(m, pp, ss)
            if was_existence and v is Verdict.NONEXISTENCE:
                monotone_ok = False
            was_existence = was_existence or v is Verdict.EXISTENCE
    cases.append(CaseResult("verdict monotone in mu", monotone_ok, {}))

    elapsed = time.perf_counter() - t0
    artifacts = [{
        "name": "threshold_grid",
        "kind": "verdicts",
        "mu": mu.tolist(),
        "margin": margins.tolist(),
        "verdict": verdicts,
    }]
    cases.append(CaseResult("runtime < 1 s", elapsed < 1.0,
                            {"elapsed_s": elapsed}))
    return SuiteReport("thresholds", cases, elapsed, artifacts)


# ---------------------------------------------------------------------------
# ODE lemma


def ode_grid_problem(mu: float, p: float, s: float) -> OdeProblem:
    """Shooting template used by the dichotomy grid.

    The weight and right endpoint are chosen per mu so that unit-slope
    shooting separates the regimes inside the cap/radius budget: the
    blow-up radius shrinks roughly like rho * exp(-c / (rho * kappa)^(p-1))
    in the critical case, so rho must be large enough for the blow-up to
    stay above r_min, yet small enough that subcritical runs stay below
    the cap.  At the double root the positivity window of the
    log-corrected weight forces rho < 1/e, and the plain
    d^(1/2) log^(1/2)(1/d) super-harmonic is used instead.
    """
    params = ProblemParams(mu, p, s)
    if mu == 0.25:
        return OdeProblem(params, log_power(0.5), rho=0.2, kappa=1.0)
    rho = 0.9 if mu < 0.0 else 0.4
    return OdeProblem(params, default_eta(params), rho=rho, kappa=1.0)


def run_ode_lemma() -> SuiteReport:
    """Blow-up dichotomy on the 27-cell grid plus the kappa sweep limits."""
    t0 = time.perf_counter()
    cases = []
    artifacts = []
    curves = []
    stability_worst = 0.0
    for mu in (-1.0, 0.0, 0.25):
        roots = characteristic_roots(mu)
        for p in (1.5, 2.0, 3.0):
            threshold = roots.beta_minus * (p - 1.0) + 2.0
            for ds in (-0.5, 0.0, 0.5):
                s = threshold + ds
                prob = ode_grid_problem(mu, p, s)
                traj = integrate_left(prob, r_min=1e-6, v_max=1e8)
                verdict = existence_verdict(ProblemParams(mu, p, s)).verdict
                expect_blow = verdict is Verdict.NONEXISTENCE
                got_blow = traj.terminal is Terminal.BLOW_UP
                ok = got_blow == expect_blow and traj.check_monotone()
                measured = {
                    "mu": mu, "p": p, "s": s,
                    "terminal": traj.terminal.value,
                    "verdict": verdict.value,
                }
                if got_blow:
                    traj2 = integrate_left(prob, r_min=1e-6, v_max=1e8,
                                           rtol=5e-10, atol=5e-13)
                    shift = abs((traj2.r_kappa or 0.0) - traj.r_kappa)
                    stability_worst = max(stability_worst, shift)
                    measured["r_kappa"] = traj.r_kappa
                    measured["r_kappa_shift_on_halved_tol"] = shift
                    ok = ok and shift < 1e-3
                cases.append(CaseResult(
                    f"dichotomy mu={mu} p={p} s={s:+.3f}", ok, measured))
                if ds == 0.0:
                    curves.append((f"mu={mu} p={p}", traj.r.tolist(),
                                   traj.v.tolist()))
    cases.append(CaseResult("blow-up radius stable to 1e-3 under tolerance halving",
                            stability_worst < 1e-3,
                            {"worst_shift": stability_worst}))

    # kappa sweep at the critical slab case (0, 3, 2)
    prob = OdeProblem(ProblemParams(0.0, 3.0, 2.0),
                      default_eta(ProblemParams(0.0, 3.0, 2.0)),
                      rho=0.9, kappa=1.0)
    entries = kappa_sweep(prob, [1.0, 1e-1, 1e-2, 1e-3])
    radii = [e.r_kappa for e in entries]
    sups = [e.sup_v_tail for e in entries]
    sweep_ok = (
        all(b <= a + 1e-15 for a, b in zip(radii, radii[1:]))
        and radii[-1] < 0.5 * radii[0]
        and all(b < a for a, b in zip(sups, sups[1:]))
        and sups[-1] < 1e-3
    )
    cases.append(CaseResult("kappa sweep limits", sweep_ok, {
        "kappas": [e.kappa for e in entries],
        "r_kappa": radii,
        "sup_v_tail": sups,
    }))
    elapsed = time.perf_counter() - t0
    cases.append(CaseResult("runtime < 40 s", elapsed < 40.0,
                            {"elapsed_s": elapsed}))
    artifacts.append({"name": "critical_trajectories", "kind": "trajectories",
                      "curves": curves})
    artifacts.append({"name": "kappa_sweep", "kind": "sweep",
                      "kappa": [e.kappa for e in entries],
                      "r_kappa": radii, "sup_v": sups})
    return SuiteReport("ode_lemma", cases, elapsed, artifacts)


# ---------------------------------------------------------------------------
# XXL amplitude in the slab


def run_xxl_slab() -> SuiteReport:
    """Exhaustion limit of the (mu=0, p=3, s=0) slab against sqrt(2)/d."""
    t0 = time.perf_counter()
    params = ProblemParams(0.0, 3.0, 0.0)
    geo = rs.Geometry(rs.GeometryKind.SLAB)
    stages = rs.exhaustion_solve(
        params, geo, eps_sequence=[4e-5, 2e-5, 1e-5],
        M_sequence=[1e2, 1e4, 1e6, 1e8], ratio=1.04, h_max=0.004)
    window = (1e-4, 1e-2)
    dw, limit = rs.exhaustion_limit_profile(stages, window)
    fit = fit_power(np.column_stack([dw, limit]), window)
    amp_err = abs(fit.amplitude - math.sqrt(2.0)) / math.sqrt(2.0)
    exp_err = abs(fit.exponent - (-1.0))
    cases = [
        CaseResult("amplitude within 2% of sqrt(2)", amp_err < 0.02,
                   {"amplitude": fit.amplitude, "target": math.sqrt(2.0),
                    "rel_err": amp_err}),
        CaseResult("exponent within 0.02 of -1", exp_err < 0.02,
                   {"exponent": fit.exponent, "err": exp_err}),
    ]
    fin = stages[-1]
    sel = (fin.grid.nodes >= 1e-3) & (fin.grid.nodes <= 1e-2)
    dev = float(np.max(np.abs(
        fin.values[sel] * fin.grid.nodes[sel] / math.sqrt(2.0) - 1.0)))
    cases.append(CaseResult("final-stage values within 2% on [1e-3, 1e-2]",
                            dev < 0.02, {"max_rel_dev": dev}))
    worst_margin = min(rs.ko_bound_margin(s, skip_layer_nodes=40) for s in stages)
    cases.append(CaseResult("envelope bound holds beyond the proxy collar",
                            worst_margin >= 0.0,
                            {"worst_margin": worst_margin, "skip_layer_nodes": 40}))
    elapsed = time.perf_counter() - t0
    cases.append(CaseResult("runtime < 10 s", elapsed < 10.0,
                            {"elapsed_s": elapsed}))
    artifacts = [{
        "name": "xxl_slab_profile", "kind": "profile",
        "delta": dw.tolist(), "u": limit.tolist(),
        "reference": (math.sqrt(2.0) / dw).tolist(),
        "ref_label": "sqrt(2)/d",
    }]
    return SuiteReport("xxl_slab", cases, elapsed, artifacts)


# ---------------------------------------------------------------------------
# exhaustion: exponent recovery and nonexistence collapse


EXPONENT_CASES = (
    # (mu, p, s), eps stages, proxy values, fit window
    ((-1.0, 2.0, 0.0), (4e-4, 2e-4, 1e-4),
     (1e4, 1e6, 1e8, 1e10, 1e12, 1e14), (1e-3, 1e-1)),
    ((0.2, 3.0, 1.0), (4e-5, 2e-5, 1e-5),
     (1e2, 1e4, 1e6, 1e8), (1e-4, 1e-2)),
    ((0.25, 2.0, 1.0), (4e-5, 2e-5, 1e-5),
     (1e2, 1e4, 1e6, 1e8, 1e10), (1e-4, 1e-2)),
)


def run_exhaustion() -> SuiteReport:
    t0 = time.perf_counter()
    geo = rs.Geometry(rs.GeometryKind.SLAB)
    cases = []
    artifacts = []

    for (mu, p, s), eps_seq, m_seq, window in EXPONENT_CASES:
        params = ProblemParams(mu, p, s)
        stages = rs.exhaustion_solve(params, geo, eps_seq, m_seq,
                                     ratio=1.04, h_max=0.004)
        dw, limit = rs.exhaustion_limit_profile(stages, window)
        fit = fit_power(np.column_stack([dw, limit]), window)
        target = params.ko_exponent
        err = abs(fit.exponent - target)
        margin = min(rs.ko_bound_margin(st, skip_layer_nodes=40) for st in stages)
        cases.append(CaseResult(
            f"exponent recovery mu={mu} p={p} s={s}",
            err <= 0.05 and margin >= 0.0,
            {"exponent": fit.exponent, "target": target, "err": err,
             "ko_margin": margin, "skip_layer_nodes": 40}))
        artifacts.append({
            "name": f"exhaustion_mu{mu}_p{p}_s{s}", "kind": "profile",
            "delta": dw.tolist(), "u": limit.tolist(),
            "reference": (fit.amplitude * dw ** target).tolist(),
            "ref_label": f"C d^{target:.3g}",
        })

    # nonexistence collapse at (0, 3, 2.5)
    params = ProblemParams(0.0, 3.0, 2.5)
    stages = rs.exhaustion_solve(params, geo, [1e-2, 1e-3, 1e-4], [1e6],
                                 ratio=1.04, h_max=0.004)
    vals = [float(st.interp(0.5)) for st in stages]
    decreasing = all(b < a for a, b in zip(vals, vals[1:]))
    u1, u2, u3 = vals
    denom = u1 + u3 - 2.0 * u2
    aitken = (u1 * u3 - u2 * u2) / denom if denom != 0.0 else 0.0
    trivial = aitken <= 0.12 * u1
    beta_plus = characteristic_roots(params.mu).beta_plus
    fin = stages[-1]
    sel = (fin.grid.nodes >= 1e-3) & (fin.grid.nodes <= 1e-1)
    fit = fit_power(np.column_stack([fin.grid.nodes[sel], fin.values[sel]]))
    s_class = fit.exponent >= beta_plus - 0.05
    cases.append(CaseResult(
        "collapse: values at d=0.5 decrease with eps", decreasing,
        {"values": vals}))
    cases.append(CaseResult(
        "collapse limit is S or trivial", trivial or s_class,
        {"aitken_limit": aitken, "relative_to_first": aitken / u1,
         "final_fit_exponent": fit.exponent, "beta_plus": beta_plus}))
    margin = min(rs.ko_bound_margin(st, skip_layer_nodes=40) for st in stages)
    cases.append(CaseResult(
        "envelope bound holds beyond the proxy collar", margin >= 0.0,
        {"worst_margin": margin, "skip_layer_nodes": 40}))
    artifacts.append({
        "name": "collapse_values", "kind": "sweep",
        "kappa": [1e-2, 1e-3, 1e-4], "r_kappa": vals, "sup_v": vals,
    })

    elapsed = time.perf_counter() - t0
    cases.append(CaseResult("runtime < 120 s", elapsed < 120.0,
                            {"elapsed_s": elapsed}))
    return SuiteReport("exhaustion", cases, elapsed, artifacts)


SUITES = {
    "thresholds": run_thresholds,
    "ode_lemma": run_ode_lemma,
    "xxl_slab": run_xxl_slab,
    "exhaustion": run_exhaustion,
}


def run_suite(name: str, **kwargs) -> SuiteReport:
    if name not in SUITES:
        raise HardyBlowupError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](**kwargs)
