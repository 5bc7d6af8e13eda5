import math

import numpy as np
import pytest

from hardyblowup.errors import DomainError
from hardyblowup.regime import (
    ProblemParams,
    Verdict,
    characteristic_roots,
    critical_mu,
    critical_p,
    existence_verdict,
    verdict_from_mu_star,
    verdict_from_p_star,
    verdict_from_threshold_s,
)


def test_params_reject_bad_p():
    with pytest.raises(DomainError):
        ProblemParams(0.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        ProblemParams(0.0, 0.5, 0.0)
    with pytest.raises(DomainError):
        ProblemParams(math.nan, 2.0, 0.0)


def test_roots_examples():
    r = characteristic_roots(0.0)
    assert (r.beta_minus, r.beta_plus) == (0.0, 1.0)
    assert not r.degenerate

    r = characteristic_roots(0.25)
    assert (r.beta_minus, r.beta_plus) == (0.5, 0.5)
    assert r.degenerate

    assert characteristic_roots(0.3) is None

    r = characteristic_roots(-2.0)
    assert (r.beta_minus, r.beta_plus) == (-1.0, 2.0)
    # derived check: the roots satisfy beta(1-beta) + 2 = 0
    assert r.beta_minus * (1 - r.beta_minus) + 2 == pytest.approx(0.0, abs=1e-12)


def test_root_identities_random():
    rng = np.random.default_rng(7)
    for mu in rng.uniform(-5.0, 0.25, 300):
        r = characteristic_roots(mu)
        assert abs(r.beta_minus * (1 - r.beta_minus) - mu) < 1e-12
        assert abs(r.beta_plus * (1 - r.beta_plus) - mu) < 1e-12
        assert abs(r.beta_minus + r.beta_plus - 1.0) < 1e-12
        assert abs(r.beta_minus * r.beta_plus - mu) < 1e-12
        assert r.beta_minus <= r.beta_plus


def test_existence_verdict_examples():
    rep = existence_verdict(ProblemParams(0.0, 3.0, 0.0))
    assert rep.verdict is Verdict.EXISTENCE
    assert rep.threshold_s == pytest.approx(2.0)

    rep = existence_verdict(ProblemParams(0.0, 3.0, 2.0))
    assert rep.verdict is Verdict.NONEXISTENCE  # critical equality is closed

    rep = existence_verdict(ProblemParams(0.25, 3.0, 3.0))
    assert rep.verdict is Verdict.NONEXISTENCE
    assert rep.threshold_s == pytest.approx(3.0)  # (p+3)/2 at the double root

    rep = existence_verdict(ProblemParams(-0.75, 2.0, 1.0))
    assert rep.threshold_s == pytest.approx(1.5)
    assert rep.verdict is Verdict.EXISTENCE

    rep = existence_verdict(ProblemParams(0.3, 2.0, 0.0))
    assert rep.verdict is Verdict.NO_SUPERHARMONICS
    assert rep.roots is None and rep.threshold_s is None


def test_p_star_conventions():
    assert critical_p(0.0, 0.0) == math.inf
    assert critical_p(0.0, 2.0) == -math.inf
    assert critical_p(0.0, 3.0) == -math.inf
    assert critical_p(0.3, 1.0) is None
    # mu = -2: beta_minus = -1, s = 0: p* = 1 - 2/(-1) = 3
    assert critical_p(-2.0, 0.0) == pytest.approx(3.0)


def test_critical_mu_examples():
    assert critical_mu(3.0, 2.0) == pytest.approx(0.0, abs=1e-15)
    assert critical_mu(3.0, 3.0) == pytest.approx(0.25)
    assert critical_mu(2.0, 0.0) == pytest.approx(-6.0)
    # derived: beta_minus at mu* equals the envelope exponent
    r = characteristic_roots(-6.0)
    assert r.beta_minus == pytest.approx((0.0 - 2.0) / (2.0 - 1.0))


def test_critical_mu_flip():
    for p, s in ((2.0, 0.5), (3.0, 1.0), (1.5, -1.0), (4.0, 2.5)):
        mu_star = critical_mu(p, s)
        assert verdict_from_threshold_s(mu_star - 1e-7, p, s) is Verdict.NONEXISTENCE
        if mu_star + 1e-7 <= 0.25:
            assert verdict_from_threshold_s(mu_star + 1e-7, p, s) is Verdict.EXISTENCE


def test_cross_consistency_random_grid():
    rng = np.random.default_rng(1234)
    n = 1000
    for _ in range(n):
        mu = rng.uniform(-3.0, 0.25)
        p = rng.uniform(1.0 + 1e-6, 5.0)
        s = rng.uniform(-2.0, 5.0)
        roots = characteristic_roots(mu)
        margin = s - (roots.beta_minus * (p - 1.0) + 2.0)
        if abs(margin) <= 1e-10:
            continue
        v1 = verdict_from_threshold_s(mu, p, s)
        v2 = verdict_from_p_star(mu, p, s)
        v3 = verdict_from_mu_star(mu, p, s)
        assert v1 == v2 == v3, (mu, p, s)


def test_verdict_monotone_in_mu():
    rng = np.random.default_rng(99)
    for _ in range(200):
        p = rng.uniform(1.1, 5.0)
        s = rng.uniform(-2.0, 5.0)
        seen_existence = False
        for mu in np.sort(rng.uniform(-3.0, 0.25, 10)):
            v = verdict_from_threshold_s(mu, p, s)
            if seen_existence:
                assert v is Verdict.EXISTENCE
            seen_existence = seen_existence or v is Verdict.EXISTENCE


def test_report_serialization():
    rep = existence_verdict(ProblemParams(0.0, 3.0, 0.0))
    d = rep.to_dict()
    assert d["verdict"] == "Existence"
    assert d["p_star"] == "+inf"
