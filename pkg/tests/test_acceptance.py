"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line with the measured quantities so
`pytest -s tests/test_acceptance.py` doubles as the acceptance report.
Criteria 1 and 3-7 run through the shared suite drivers (the same code
behind `hardy-blowup reproduce`); 2, 8, 9 and 10 are exercised directly.
"""

import math
import time

import numpy as np
import pytest

import hardyblowup.radial_solver as rs
from hardyblowup.barriers import verify_sign_dichotomy
from hardyblowup.regime import ProblemParams, characteristic_roots
from hardyblowup.reproduce import run_exhaustion, run_ode_lemma, run_thresholds, run_xxl_slab


def _report(number, title, passed, detail=""):
    line = f"ACCEPTANCE {number:2d} {'PASS' if passed else 'FAIL'}: {title}"
    if detail:
        line += f"  [{detail}]"
    print(line)
    assert passed, line


@pytest.fixture(scope="module")
def thresholds_report():
    return run_thresholds(seed=0, n=1000)


@pytest.fixture(scope="module")
def ode_report():
    return run_ode_lemma()


@pytest.fixture(scope="module")
def xxl_report():
    return run_xxl_slab()


@pytest.fixture(scope="module")
def exhaustion_report():
    return run_exhaustion()


def _case(report, prefix):
    return [c for c in report.cases if c.name.startswith(prefix)]


def test_criterion_1_threshold_cross_consistency(thresholds_report):
    rep = thresholds_report
    agree = _case(rep, "three-parameterization")[0]
    ok = rep.passed and rep.elapsed_s < 1.0
    _report(1, "threshold cross-consistency on 1000 random triples", ok,
            f"mismatches={agree.measured['mismatches']}, "
            f"elapsed={rep.elapsed_s:.3f}s")


def test_criterion_2_barrier_sign_dichotomy():
    t0 = time.perf_counter()
    checks = verify_sign_dichotomy(mu_values=(-1.0, -0.25, 0.0, 0.2, 0.25))
    elapsed = time.perf_counter() - t0
    bad = [c for c in checks if not c.ok]
    ok = not bad and elapsed < 1.0
    _report(2, "barrier sign dichotomy over the named catalog", ok,
            f"checks={len(checks)}, failures={len(bad)}, elapsed={elapsed:.3f}s")


def test_criterion_3_ode_dichotomy(ode_report):
    cells = _case(ode_report, "dichotomy")
    stability = _case(ode_report, "blow-up radius stable")[0]
    ok = all(c.passed for c in cells) and stability.passed
    n_blow = sum(1 for c in cells if c.measured["terminal"] == "BlowUp")
    _report(3, "ODE blow-up dichotomy matches the regime verdict (27 cells)",
            ok, f"blowups={n_blow}/27, worst R shift="
                f"{stability.measured['worst_shift']:.2e}, "
                f"elapsed={ode_report.elapsed_s:.1f}s")
    assert ode_report.elapsed_s < 30.0


def test_criterion_4_kappa_sweep(ode_report):
    sweep = _case(ode_report, "kappa sweep")[0]
    radii = sweep.measured["r_kappa"]
    sups = sweep.measured["sup_v_tail"]
    _report(4, "kappa sweep: radii shrink and tail suprema vanish",
            sweep.passed,
            f"R: {radii[0]:.3e} -> {radii[-1]:.3e}, sup: {sups[-1]:.2e}")


def test_criterion_5_exact_xxl_amplitude(xxl_report):
    amp = _case(xxl_report, "amplitude")[0]
    expn = _case(xxl_report, "exponent")[0]
    ok = amp.passed and expn.passed and xxl_report.elapsed_s < 10.0
    _report(5, "slab exhaustion limit matches sqrt(2)/d", ok,
            f"amplitude={amp.measured['amplitude']:.4f} "
            f"(err {amp.measured['rel_err']:.2%}), "
            f"exponent={expn.measured['exponent']:.4f}, "
            f"elapsed={xxl_report.elapsed_s:.1f}s")


def test_criterion_6_exponent_recovery(exhaustion_report):
    cases = _case(exhaustion_report, "exponent recovery")
    ok = all(c.passed for c in cases) and exhaustion_report.elapsed_s < 60.0
    detail = ", ".join(f"err={c.measured['err']:.3f}" for c in cases)
    _report(6, "existence-regime exponents within 0.05 of the envelope rate",
            ok, detail + f", elapsed={exhaustion_report.elapsed_s:.1f}s")


def test_criterion_7_nonexistence_collapse(exhaustion_report):
    dec = _case(exhaustion_report, "collapse: values")[0]
    cls = _case(exhaustion_report, "collapse limit")[0]
    ok = dec.passed and cls.passed
    _report(7, "nonexistence exhaustion collapses to S or trivial", ok,
            f"u(0.5): {', '.join(f'{v:.3f}' for v in dec.measured['values'])}; "
            f"extrapolated limit {cls.measured['relative_to_first']:.1%} of first")


def test_criterion_8_ko_bound(xxl_report, exhaustion_report):
    margins = []
    for report in (xxl_report, exhaustion_report):
        for c in report.cases:
            if "ko_margin" in c.measured:
                margins.append(c.measured["ko_margin"])
            if "worst_margin" in c.measured:
                margins.append(c.measured["worst_margin"])
    ok = bool(margins) and all(m >= 0.0 for m in margins)
    _report(8, "envelope bound enforced on every produced solution", ok,
            f"min margin={min(margins):.3e} over {len(margins)} checks")


def test_criterion_9_discrete_comparison():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240801)
    grid = rs.Grid.graded(1e-4, 1.0)
    geo = rs.Geometry(rs.GeometryKind.SLAB)
    failures = 0
    for _ in range(100):
        mu = rng.uniform(-2.0, 0.24)
        p = rng.uniform(1.3, 4.0)
        threshold = characteristic_roots(mu).beta_minus * (p - 1.0) + 2.0
        s = threshold - rng.uniform(0.3, 2.0)
        pair = rs.build_subsuper_pair(ProblemParams(mu, p, s), geo, grid)
        pair.sub.values = pair.sub.values * rng.uniform(0.2, 1.0)
        pair.sup.values = pair.sup.values * rng.uniform(1.0, 5.0)
        if not rs.discrete_comparison_check(pair.sub, pair.sup):
            failures += 1
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 5.0
    _report(9, "discrete comparison principle on 100 randomized pairs", ok,
            f"failures={failures}, elapsed={elapsed:.2f}s")


def test_criterion_10_supercritical_mu_ball():
    t0 = time.perf_counter()
    params = ProblemParams(1.0, 2.0, 0.0)
    geo = rs.Geometry(rs.GeometryKind.BALL, 3)
    grid = rs.Grid.graded(1e-4, 1.0, ratio=1.03, h_max=0.0025)
    d = grid.nodes
    initial = 7.0 * d ** -2.0 * np.clip((d - 1e-4) / 3e-4, 0.0, 1.0)
    sol = rs.solve_bvp(
        rs.discretize(geo, params, grid, rs.BoundaryConditions(0.0, 0.0)),
        initial)
    nontrivial = float(sol.interp(0.5)) > 1.0
    margin = rs.ko_bound_margin(sol)

    fine = grid.refine()
    sol_fine = rs.solve_bvp(
        rs.discretize(geo, params, fine, rs.BoundaryConditions(0.0, 0.0)),
        np.interp(fine.nodes, d, sol.values))
    probe = np.geomspace(0.1, 0.9, 50)
    shift = float(np.max(np.abs(sol.interp(probe) - sol_fine.interp(probe))
                         / sol_fine.interp(probe)))
    elapsed = time.perf_counter() - t0
    ok = nontrivial and margin >= 0.0 and shift < 1e-3 and elapsed < 10.0
    _report(10, "mu > 1/4 ball solution: positive, bounded, mesh-stable", ok,
            f"u(0.5)={float(sol.interp(0.5)):.2f}, ko margin={margin:.2f}, "
            f"refinement shift={shift:.2e}, elapsed={elapsed:.1f}s")
