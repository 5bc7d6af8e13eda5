"""Threshold arithmetic for -u'' - (mu/d^2) u + u^p / d^s = 0 near d = 0.

The linear part -h'' - (mu/d^2) h admits positive solutions behaving like
d^beta where beta solves the characteristic equation

    beta * (1 - beta) = mu,

with real roots beta_minus <= beta_plus iff mu <= 1/4.  The nonlinear term
forces every sub-solution below the Keller-Osserman envelope
d^((s-2)/(p-1)), and boundary blow-up solutions exist iff that envelope
clears the d^beta_minus floor:

    existence  <=>  (s - 2)/(p - 1) < beta_minus  <=>  s < beta_minus*(p-1) + 2.

This module evaluates the roots, the three equivalent parameterizations of
the threshold (critical s, critical p, critical mu) and the resulting
existence/nonexistence verdict.  Everything here is exact scalar
arithmetic; no discretization is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError

__all__ = [
    "ProblemParams",
    "CharacteristicRoots",
    "Verdict",
    "RegimeReport",
    "characteristic_roots",
    "existence_verdict",
    "critical_mu",
    "critical_p",
    "verdict_from_threshold_s",
    "verdict_from_p_star",
    "verdict_from_mu_star",
]


@dataclass(frozen=True)
class ProblemParams:
    """Coefficient triple (mu, p, s) of the model equation.

    mu : strength of the singular potential mu/d^2 (any finite real)
    p  : nonlinearity exponent, must satisfy p > 1
    s  : power of the distance weight d^-s (any finite real)
    """

    mu: float
    p: float
    s: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.p) and math.isfinite(self.s)):
            raise DomainError("mu, p, s must be finite reals")
        if not self.p > 1.0:
            raise DomainError(f"nonlinearity exponent p must exceed 1, got p={self.p}")

    @property
    def ko_exponent(self) -> float:
        """Keller-Osserman envelope exponent (s-2)/(p-1)."""
        return (self.s - 2.0) / (self.p - 1.0)


@dataclass(frozen=True)
class CharacteristicRoots:
    """Real roots of beta*(1-beta) = mu; present only for mu <= 1/4."""

    beta_minus: float
    beta_plus: float
    degenerate: bool  # True iff mu = 1/4 (double root 1/2)


class Verdict(str, Enum):
    NO_SUPERHARMONICS = "NoSuperharmonics"  # mu > 1/4: no positive supersolutions of the linear part
    NONEXISTENCE = "Nonexistence"           # mu <= 1/4 and s >= beta_minus*(p-1) + 2
    EXISTENCE = "Existence"                 # mu <= 1/4 and s <  beta_minus*(p-1) + 2


def characteristic_roots(mu: float) -> CharacteristicRoots | None:
    """Roots beta = 1/2 +- sqrt(1/4 - mu) of beta*(1-beta) = mu.

    Returns None when mu > 1/4 (no real roots).  The two roots always
    satisfy beta_minus + beta_plus = 1 and beta_minus * beta_plus = mu.
    """
    if not math.isfinite(mu):
        raise DomainError("mu must be finite")
    if mu > 0.25:
        return None
    half_gap = math.sqrt(0.25 - mu)
    return CharacteristicRoots(
        beta_minus=0.5 - half_gap,
        beta_plus=0.5 + half_gap,
        degenerate=(mu == 0.25),
    )


def critical_mu(p: float, s: float, _self_check: bool = True) -> float:
    """Potential strength at which the existence threshold is crossed.

    Solving beta_minus(mu) = (s-2)/(p-1) for mu gives

        mu* = 1/4 - ((p - 2s + 3) / (2(p - 1)))^2,

    since sqrt(1/4 - mu) = 1/2 - (s-2)/(p-1) = (p - 2s + 3)/(2(p-1)).
    For s < (p+3)/2 the verdict flips from Nonexistence to Existence as mu
    increases through mu*; for s >= (p+3)/2 no mu <= 1/4 gives existence
    and the returned value is only the formal root of the relation.
    """
    if not p > 1.0:
        raise DomainError(f"p must exceed 1, got {p}")
    t = (p - 2.0 * s + 3.0) / (2.0 * (p - 1.0))
    mu_star = 0.25 - t * t
    if _self_check and s < (p + 3.0) / 2.0:
        # The flip must happen inside a +-1e-9 band around mu*.
        below = verdict_from_threshold_s(mu_star - 1e-9, p, s)
        if below is not Verdict.NONEXISTENCE:
            raise AssertionError(f"critical_mu inconsistent below mu* for p={p}, s={s}")
        above = mu_star + 1e-9
        if above <= 0.25 and verdict_from_threshold_s(above, p, s) is not Verdict.EXISTENCE:
            raise AssertionError(f"critical_mu inconsistent above mu* for p={p}, s={s}")
    return mu_star


def critical_p(mu: float, s: float) -> float | None:
    """Critical nonlinearity exponent p* = 1 - (2 - s)/beta_minus.

    Conventions at beta_minus = 0 (i.e. mu = 0): p* = +inf when s < 2 and
    p* = -inf when s >= 2, so that 'p on the existence side of p*' matches
    the s-threshold for every p > 1.  Returns None when mu > 1/4.
    """
    roots = characteristic_roots(mu)
    if roots is None:
        return None
    if roots.beta_minus == 0.0:
        return math.inf if s < 2.0 else -math.inf
    return 1.0 - (2.0 - s) / roots.beta_minus


def verdict_from_threshold_s(mu: float, p: float, s: float) -> Verdict:
    """Verdict from the primary parameterization s vs beta_minus*(p-1) + 2."""
    roots = characteristic_roots(mu)
    if roots is None:
        return Verdict.NO_SUPERHARMONICS
    threshold = roots.beta_minus * (p - 1.0) + 2.0
    return Verdict.EXISTENCE if s < threshold else Verdict.NONEXISTENCE


def verdict_from_p_star(mu: float, p: float, s: float) -> Verdict:
    """Verdict from the p-parameterization.

    For beta_minus > 0 larger p relaxes the threshold, so existence holds
    for p > p*; for beta_minus <= 0 the inequality reverses (existence for
    p < p*, which also absorbs the +-inf conventions at beta_minus = 0).
    The critical equality p = p* is nonexistence either way.
    """
    roots = characteristic_roots(mu)
    if roots is None:
        return Verdict.NO_SUPERHARMONICS
    p_star = critical_p(mu, s)
    if roots.beta_minus > 0.0:
        return Verdict.EXISTENCE if p > p_star else Verdict.NONEXISTENCE
    return Verdict.EXISTENCE if p < p_star else Verdict.NONEXISTENCE


def verdict_from_mu_star(mu: float, p: float, s: float) -> Verdict:
    """Verdict from the mu-parameterization (meaningful for s < (p+3)/2)."""
    if mu > 0.25:
        return Verdict.NO_SUPERHARMONICS
    if s >= (p + 3.0) / 2.0:
        return Verdict.NONEXISTENCE
    return Verdict.EXISTENCE if mu > critical_mu(p, s, _self_check=False) else Verdict.NONEXISTENCE


@dataclass(frozen=True)
class RegimeReport:
    """Full classification record for one parameter triple.

    threshold_s and p_star are None when mu > 1/4 (no characteristic
    roots).  p_star uses IEEE infinities for the beta_minus = 0
    conventions; it is never fed back into arithmetic.
    """

    params: ProblemParams
    roots: CharacteristicRoots | None
    threshold_s: float | None
    ko_exponent: float
    p_star: float | None
    mu_star: float
    verdict: Verdict

    def to_dict(self) -> dict:
        return {
            "mu": self.params.mu,
            "p": self.params.p,
            "s": self.params.s,
            "beta_minus": None if self.roots is None else self.roots.beta_minus,
            "beta_plus": None if self.roots is None else self.roots.beta_plus,
            "degenerate": None if self.roots is None else self.roots.degenerate,
            "threshold_s": self.threshold_s,
            "ko_exponent": self.ko_exponent,
            "p_star": _json_extended(self.p_star),
            "mu_star": self.mu_star,
            "verdict": self.verdict.value,
        }


def _json_extended(x: float | None):
    if x is None:
        return None
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return x


def existence_verdict(params: ProblemParams) -> RegimeReport:
    """Classify (mu, p, s): existence iff mu <= 1/4 and s < beta_minus*(p-1)+2.

    The critical equality s = beta_minus*(p-1) + 2 is classified as
    Nonexistence (the threshold is a closed nonexistence condition).
    """
    roots = characteristic_roots(params.mu)
    mu_star = critical_mu(params.p, params.s, _self_check=False)
    if roots is None:
        return RegimeReport(
            params=params,
            roots=None,
            threshold_s=None,
            ko_exponent=params.ko_exponent,
            p_star=None,
            mu_star=mu_star,
            verdict=Verdict.NO_SUPERHARMONICS,
        )
    threshold = roots.beta_minus * (params.p - 1.0) + 2.0
    verdict = Verdict.EXISTENCE if params.s < threshold else Verdict.NONEXISTENCE
    return RegimeReport(
        params=params,
        roots=roots,
        threshold_s=threshold,
        ko_exponent=params.ko_exponent,
        p_star=critical_p(params.mu, params.s),
        mu_star=mu_star,
        verdict=verdict,
    )
