import math

import numpy as np
import pytest

from hardyblowup.barriers import (
    BarrierFamily,
    DistanceWindow,
    Role,
    eval_barrier,
    fd_linear_residual,
    ko_amplitude,
    ko_power,
    ko_supersolution,
    large_subharmonic,
    large_superharmonic,
    lemma_barriers,
    linear_residual,
    log_power,
    nonlinear_residual,
    nonlinear_residual_of,
    power_eps_max,
    pure_power,
    small_subharmonic,
    small_superharmonic,
    validity_radius,
    verify_sign_dichotomy,
)
from hardyblowup.errors import DomainError
from hardyblowup.regime import ProblemParams, characteristic_roots

P0 = ProblemParams(0.0, 3.0, 0.0)


def test_eval_examples():
    assert eval_barrier(pure_power(0.5, mu=0.0), 0.25) == pytest.approx(0.5)
    # d^0 (1 + d^(1/2)) at d = 0.25
    hb = large_superharmonic(0.0, 0.5)
    assert eval_barrier(hb, 0.25) == pytest.approx(1.5)
    lp = log_power(1.0)
    assert eval_barrier(lp, math.exp(-1.0)) == pytest.approx(math.exp(-0.5))


def test_eval_domain_errors():
    with pytest.raises(DomainError):
        eval_barrier(pure_power(0.5, mu=0.0), 0.0)
    with pytest.raises(DomainError):
        eval_barrier(log_power(1.0), 1.0)
    with pytest.raises(DomainError):
        eval_barrier(ko_supersolution(P0, 0.1), 0.05)


def test_correction_exponent_validation():
    # the admissible ceiling shrinks with mu
    assert power_eps_max(0.2) == pytest.approx(math.sqrt(0.2))
    with pytest.raises(DomainError):
        large_superharmonic(0.2, 0.5)  # 0.5 > sqrt(1 - 4*0.2)
    with pytest.raises(DomainError):
        small_superharmonic(0.25, 1.5)  # log family needs eps < 1


def test_pure_power_exact_at_roots():
    for mu in (-1.0, -0.25, 0.0, 0.2, 0.25):
        roots = characteristic_roots(mu)
        params = ProblemParams(mu, 2.0, 0.0)
        delta = np.geomspace(1e-6, 0.5, 200)
        for beta in (roots.beta_minus, roots.beta_plus):
            res = linear_residual(pure_power(beta, mu=mu), params, delta)
            assert np.max(np.abs(res)) < 1e-12


def test_linear_residual_signs():
    # super-harmonics have positive residual near the boundary, subs negative
    hbar = small_superharmonic(0.0, 0.5)
    assert linear_residual(hbar, P0, 0.01) > 0.0
    p14 = ProblemParams(0.25, 2.0, 1.0)
    hund = large_subharmonic(0.25, 0.5)
    assert linear_residual(hund, p14, 0.01) < 0.0


def test_fd_cross_check():
    """Closed forms against high-precision centered differences at the
    reference step 1e-6 * delta; agreement far exceeds both the 1e-5
    sweep tolerance and the 1e-6 spot tolerance."""
    deltas = np.geomspace(1e-4, 0.3, 9)
    for mu in (-1.0, 0.0, 0.2, 0.25):
        params = ProblemParams(mu, 2.0, 0.0)
        eps = 0.5 if mu in (-1.0, 0.0, 0.25) else 0.2
        for spec in lemma_barriers(mu, eps).values():
            for d in deltas:
                closed = float(linear_residual(spec, params, d))
                fd = fd_linear_residual(spec, params, d)
                rel = abs(closed - fd) / (1.0 + abs(closed))
                assert rel < 1e-5
                assert rel < 1e-6


def test_fd_cross_check_envelope():
    params = ProblemParams(0.2, 3.0, 1.0)
    spec = ko_supersolution(params, 0.05)
    for d in np.geomspace(0.06, 0.5, 7):
        closed = float(linear_residual(spec, params, d))
        fd = fd_linear_residual(spec, params, d)
        assert abs(closed - fd) / (1.0 + abs(closed)) < 1e-5


def test_nonlinear_residual_examples():
    assert nonlinear_residual(0.0, 0.0, P0, 0.1) == 0.0
    d = 0.1
    u = math.sqrt(2.0) / d
    u2 = 2.0 * math.sqrt(2.0) / d ** 3
    assert abs(nonlinear_residual(u, u2, P0, d)) < 1e-12 * u2
    with pytest.raises(DomainError):
        nonlinear_residual(-1.0, 0.0, P0, 0.1)


def test_exact_envelope_amplitude():
    # gamma^(p-1) = b(b-1) + mu makes the pure envelope an exact solution
    for params in (P0, ProblemParams(0.25, 2.0, 1.0), ProblemParams(-1.0, 2.0, 0.0)):
        amp = ko_amplitude(params)
        spec = ko_power(params, gamma=amp)
        delta = np.geomspace(1e-4, 0.9, 50)
        res = nonlinear_residual_of(spec, params, delta)
        scale = np.abs(amp * delta ** (params.ko_exponent - 2.0))
        assert np.max(np.abs(res) / scale) < 1e-10


def test_validity_radius():
    window = DistanceWindow(1e-6, 0.5, 400)
    # strict interior power: exact super on the whole window
    params = ProblemParams(0.2, 2.0, 0.0)
    roots = characteristic_roots(0.2)
    mid = 0.5 * (roots.beta_minus + roots.beta_plus)
    assert validity_radius(pure_power(mid, mu=0.2), params, window) == window.delta_max
    # exterior power claimed super fails immediately
    bad = pure_power(roots.beta_plus + 0.1, mu=0.2, role=Role.SUPER_HARMONIC)
    assert validity_radius(bad, params, window) == 0.0
    # corrected super valid on the whole window in the slab
    hb = small_superharmonic(0.0, 0.5)
    assert validity_radius(hb, P0, DistanceWindow(1e-6, 0.3, 400)) >= 0.2


def test_ko_supersolution():
    spec = ko_supersolution(P0, 0.0)
    assert spec.gamma >= math.sqrt(2.0)
    delta = np.geomspace(1e-6, 0.99, 1000)
    assert np.all(nonlinear_residual_of(spec, P0, delta) >= 0.0)

    # pole offset: value diverges as delta approaches eps from above
    spec_eps = ko_supersolution(P0, 0.1)
    assert eval_barrier(spec_eps, 0.1 + 1e-12) > 1e10

    p14 = ProblemParams(0.25, 2.0, 1.0)
    spec14 = ko_supersolution(p14, 0.0)
    d = np.geomspace(1e-6, 0.9, 500)
    assert np.all(nonlinear_residual_of(spec14, p14, d) >= 0.0)


def test_sign_dichotomy_sweep():
    checks = verify_sign_dichotomy()
    assert all(c.ok for c in checks), [c for c in checks if not c.ok]


def test_barrier_spec_immutable_and_positive():
    spec = pure_power(0.5, mu=0.0)
    with pytest.raises(Exception):
        spec.beta = 1.0
    with pytest.raises(DomainError):
        ko_power(P0, gamma=-1.0)
