"""Closed-form barriers for L[h] = -h'' - (mu/d^2) h and the nonlinear model.

All formulas are evaluated in slab geometry, where the distance d to the
singular boundary satisfies |grad d| = 1 and (lap d) = 0 exactly, so the
leading-order computations below are exact identities rather than
boundary-layer approximations.

Catalog (d in (0,1), L = log(1/d), roots beta_minus <= beta_plus of
beta*(1-beta) = mu, eps a small correction exponent):

  PurePower        d^beta
                   residual (beta*(1-beta) - mu) d^(beta-2); harmonic at
                   beta = beta_minus/plus, super inside (beta-, beta+),
                   sub outside [beta-, beta+].
  PowerCorrected   d^beta (1 +- d^eps), mu < 1/4:
                   base beta+ with minus / base beta- with plus are
                   positive super-harmonics; the opposite signs are subs
                   (requires eps < min(1, sqrt(1-4mu))).
  LogPower         d^(1/2) L^beta, mu = 1/4:
                   residual beta*(1-beta) L^(beta-2) d^(-3/2); harmonic at
                   beta in {0, 1}, super for beta in (0,1), sub outside.
  LogCorrected     d^(1/2)(1 -+ L^-eps) and d^(1/2) L (1 +- L^-eps),
                   mu = 1/4: the minus/plus pattern mirrors PowerCorrected.
  KOPower          g * d^((s-2)/(p-1)): universal envelope of the nonlinear
                   equation; super-solution iff g^(p-1) >= b(b-1) + mu
                   with b = (s-2)/(p-1) (always true when b lies between
                   the characteristic roots).
  KORegularized    g * d^(s/(p-1)) (d - eps)^(-2/(p-1)): the eps-shifted
                   envelope, a super-solution on {d > eps} for g large,
                   uniformly in eps >= 0.

Residuals of the power/log families are computed with the characteristic
quadratic in factored form, so a barrier built exactly at a root has
residual exactly zero in floating point.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import DomainError, NonConvergence
from .regime import ProblemParams, characteristic_roots

__all__ = [
    "BarrierFamily",
    "CorrectionSign",
    "Role",
    "BarrierSpec",
    "DistanceWindow",
    "pure_power",
    "log_power",
    "small_superharmonic",
    "large_superharmonic",
    "small_subharmonic",
    "large_subharmonic",
    "lemma_barriers",
    "power_eps_max",
    "ko_power",
    "ko_amplitude",
    "ko_supersolution",
    "eval_barrier",
    "barrier_derivatives",
    "linear_residual",
    "fd_linear_residual",
    "nonlinear_residual",
    "nonlinear_residual_of",
    "validity_radius",
    "verify_sign_dichotomy",
    "SignCheck",
]

logger = logging.getLogger(__name__)


class BarrierFamily(Enum):
    PURE_POWER = "PurePower"
    POWER_CORRECTED = "PowerCorrected"
    LOG_POWER = "LogPower"
    LOG_CORRECTED = "LogCorrected"
    KO_POWER = "KOPower"
    KO_REGULARIZED = "KORegularized"


class CorrectionSign(Enum):
    PLUS = 1
    MINUS = -1
    NONE = 0


class Role(Enum):
    SUB_HARMONIC = "SubHarmonic"
    SUPER_HARMONIC = "SuperHarmonic"
    SUB_SOLUTION = "SubSolution"
    SUPER_SOLUTION = "SuperSolution"


_LOG_FAMILIES = (BarrierFamily.LOG_POWER, BarrierFamily.LOG_CORRECTED)


@dataclass(frozen=True)
class BarrierSpec:
    """Immutable description of one closed-form barrier.

    beta     : base exponent.  PurePower/PowerCorrected: power of d.
               LogPower: power of L.  LogCorrected: base log power (0 or 1).
               KOPower: (s-2)/(p-1).  KORegularized: s/(p-1).
    epsilon  : correction exponent for the corrected families; for
               KORegularized it is the pole offset (the barrier lives on
               d > epsilon).
    gamma    : positive amplitude multiplying the whole expression.
    pole_exp : KORegularized only, the exponent -2/(p-1) of (d - eps).
    """

    family: BarrierFamily
    claimed_role: Role
    beta: float = 0.0
    epsilon: float = 0.0
    gamma: float = 1.0
    sign: CorrectionSign = CorrectionSign.NONE
    pole_exp: float = 0.0

    def __post_init__(self):
        if not self.gamma > 0.0:
            raise DomainError("barrier amplitude gamma must be positive")
        if self.family is BarrierFamily.POWER_CORRECTED and not self.epsilon > 0.0:
            raise DomainError("PowerCorrected requires correction exponent epsilon > 0")
        if self.family is BarrierFamily.LOG_CORRECTED and not 0.0 < self.epsilon < 1.0:
            raise DomainError("LogCorrected requires epsilon in (0, 1)")
        if self.family is BarrierFamily.KO_REGULARIZED and self.epsilon < 0.0:
            raise DomainError("KORegularized pole offset must be >= 0")


@dataclass(frozen=True)
class DistanceWindow:
    """Geometric sampling window 0 < delta_min < delta_max < 1."""

    delta_min: float
    delta_max: float
    n_samples: int = 1000

    def __post_init__(self):
        if not (0.0 < self.delta_min < self.delta_max < 1.0):
            raise DomainError("window must satisfy 0 < delta_min < delta_max < 1")
        if self.n_samples < 2:
            raise DomainError("window needs at least 2 samples")

    def samples(self) -> np.ndarray:
        return np.geomspace(self.delta_min, self.delta_max, self.n_samples)


# ---------------------------------------------------------------------------
# constructors


def power_eps_max(mu: float) -> float:
    """Largest admissible correction exponent min(1, sqrt(1-4mu)) for the
    PowerCorrected family; positive only for mu < 1/4."""
    if mu >= 0.25:
        return 0.0
    return min(1.0, math.sqrt(1.0 - 4.0 * mu))


def pure_power(beta: float, mu: float | None = None, gamma: float = 1.0,
               role: Role | None = None) -> BarrierSpec:
    """d^beta with claimed role inferred from mu when not given explicitly."""
    if role is None:
        if mu is None:
            raise DomainError("pure_power needs either an explicit role or mu")
        roots = characteristic_roots(mu)
        if roots is not None and roots.beta_minus <= beta <= roots.beta_plus:
            role = Role.SUPER_HARMONIC
        else:
            role = Role.SUB_HARMONIC
    return BarrierSpec(BarrierFamily.PURE_POWER, role, beta=beta, gamma=gamma)


def log_power(beta: float, gamma: float = 1.0, role: Role | None = None) -> BarrierSpec:
    """d^(1/2) log(1/d)^beta, the degenerate-root (mu = 1/4) family."""
    if role is None:
        role = Role.SUPER_HARMONIC if 0.0 <= beta <= 1.0 else Role.SUB_HARMONIC
    return BarrierSpec(BarrierFamily.LOG_POWER, role, beta=beta, gamma=gamma)


def _corrected(mu: float, eps: float, large: bool, super_: bool) -> BarrierSpec:
    roots = characteristic_roots(mu)
    if roots is None:
        raise DomainError("corrected barriers exist only for mu <= 1/4")
    if roots.degenerate:
        if not 0.0 < eps < 1.0:
            raise DomainError("log-corrected barriers need eps in (0, 1)")
        base = 1.0 if large else 0.0
        # large barriers carry the log factor; plus-correction goes with
        # super on the large branch and with sub on the small branch
        sign = (CorrectionSign.PLUS if super_ else CorrectionSign.MINUS) if large else \
               (CorrectionSign.MINUS if super_ else CorrectionSign.PLUS)
        role = Role.SUPER_HARMONIC if super_ else Role.SUB_HARMONIC
        return BarrierSpec(BarrierFamily.LOG_CORRECTED, role, beta=base, epsilon=eps, sign=sign)
    eps_max = power_eps_max(mu)
    if not 0.0 < eps < eps_max:
        raise DomainError(
            f"power-corrected barriers need eps in (0, {eps_max:.6g}) at mu={mu}")
    base = roots.beta_minus if large else roots.beta_plus
    sign = (CorrectionSign.PLUS if super_ else CorrectionSign.MINUS) if large else \
           (CorrectionSign.MINUS if super_ else CorrectionSign.PLUS)
    role = Role.SUPER_HARMONIC if super_ else Role.SUB_HARMONIC
    return BarrierSpec(BarrierFamily.POWER_CORRECTED, role, beta=base, epsilon=eps, sign=sign)


def small_superharmonic(mu: float, eps: float) -> BarrierSpec:
    """d^beta+ (1 - d^eps), or d^(1/2)(1 - L^-eps) at mu = 1/4."""
    return _corrected(mu, eps, large=False, super_=True)


def large_superharmonic(mu: float, eps: float) -> BarrierSpec:
    """d^beta- (1 + d^eps), or d^(1/2) L (1 + L^-eps) at mu = 1/4."""
    return _corrected(mu, eps, large=True, super_=True)


def small_subharmonic(mu: float, eps: float) -> BarrierSpec:
    """d^beta+ (1 + d^eps), or d^(1/2)(1 + L^-eps) at mu = 1/4."""
    return _corrected(mu, eps, large=False, super_=False)


def large_subharmonic(mu: float, eps: float) -> BarrierSpec:
    """d^beta- (1 - d^eps), or d^(1/2) L (1 - L^-eps) at mu = 1/4."""
    return _corrected(mu, eps, large=True, super_=False)


def lemma_barriers(mu: float, eps: float) -> dict[str, BarrierSpec]:
    """The four named corrected barriers at a given mu <= 1/4."""
    return {
        "small_super": small_superharmonic(mu, eps),
        "large_super": large_superharmonic(mu, eps),
        "small_sub": small_subharmonic(mu, eps),
        "large_sub": large_subharmonic(mu, eps),
    }


def ko_amplitude(params: ProblemParams) -> float | None:
    """Amplitude A with A^(p-1) = b(b-1) + mu making A d^b an exact slab
    solution, where b = (s-2)/(p-1); None when b(b-1) + mu <= 0 (then the
    pure envelope is a super-solution at every amplitude and no positive
    exact-power solution exists)."""
    b = params.ko_exponent
    c = b * (b - 1.0) + params.mu
    if c <= 0.0:
        return None
    return c ** (1.0 / (params.p - 1.0))


def ko_power(params: ProblemParams, gamma: float | None = None,
             role: Role | None = None) -> BarrierSpec:
    """Pure Keller-Osserman envelope gamma * d^((s-2)/(p-1))."""
    b = params.ko_exponent
    threshold = b * (b - 1.0) + params.mu
    if gamma is None:
        amp = ko_amplitude(params)
        gamma = amp if amp is not None else 1.0
    if role is None:
        role = Role.SUPER_SOLUTION if gamma ** (params.p - 1.0) >= threshold else Role.SUB_SOLUTION
    return BarrierSpec(BarrierFamily.KO_POWER, role, beta=b, gamma=gamma)


def ko_supersolution(params: ProblemParams, eps: float = 0.0,
                     n_samples: int = 1000, max_doublings: int = 20) -> BarrierSpec:
    """Envelope super-solution gamma d^(s/(p-1)) (d-eps)^(-2/(p-1)) on d > eps.

    The amplitude starts at max(1, b(b-1))^(1/(p-1)) with b = (s-2)/(p-1)
    and doubles until the nonlinear residual is nonnegative at every
    sampled point of (eps, 1); amplitudes beyond 2^20 times the start are
    rejected as NonConvergence.
    """
    if eps < 0.0:
        raise DomainError("pole offset eps must be >= 0")
    if eps >= 1.0:
        raise DomainError("pole offset eps must sit inside the unit slab")
    p, s = params.p, params.s
    b = params.ko_exponent
    gamma0 = max(1.0, b * (b - 1.0)) ** (1.0 / (p - 1.0))
    t = np.geomspace(max(eps * 1e-4, 1e-9), (1.0 - eps) * 0.999, n_samples)
    delta = eps + t
    gamma = gamma0
    for _ in range(max_doublings + 1):
        spec = BarrierSpec(
            BarrierFamily.KO_REGULARIZED,
            Role.SUPER_SOLUTION,
            beta=s / (p - 1.0),
            epsilon=eps,
            gamma=gamma,
            pole_exp=-2.0 / (p - 1.0),
        )
        res = nonlinear_residual_of(spec, params, delta)
        if np.all(res >= 0.0):
            return spec
        gamma *= 2.0
    raise NonConvergence(
        f"no envelope amplitude below 2^{max_doublings} * {gamma0:.3g} has "
        f"nonnegative residual for (mu={params.mu}, p={p}, s={s}, eps={eps})")


# ---------------------------------------------------------------------------
# evaluation


def _check_delta(spec: BarrierSpec, delta):
    arr = np.asarray(delta)
    if np.any(arr <= 0.0):
        raise DomainError("barriers are defined for delta > 0")
    if spec.family in _LOG_FAMILIES and np.any(arr >= 1.0):
        raise DomainError("log-family barriers require delta < 1")
    if spec.family is BarrierFamily.KO_REGULARIZED and np.any(arr <= spec.epsilon):
        raise DomainError("regularized envelope requires delta > pole offset")


def _log_recip(delta):
    """log(1/delta), dispatching to mpmath for its scalar types so the
    finite-difference cross-checks can run at arbitrary precision."""
    if type(delta).__module__.startswith("mpmath"):
        import mpmath

        return mpmath.log(1.0 / delta)
    return np.log(1.0 / delta)


def _power_atom(beta: float, delta):
    v = delta ** beta
    d1 = beta * delta ** (beta - 1.0)
    d2 = beta * (beta - 1.0) * delta ** (beta - 2.0)
    return v, d1, d2


def _log_atom(g: float, b: float, delta):
    # d^g * L^b with L = log(1/d); dL/dd = -1/d
    L = _log_recip(delta)
    v = delta ** g * L ** b
    d1 = delta ** (g - 1.0) * (g * L ** b - b * L ** (b - 1.0))
    d2 = delta ** (g - 2.0) * (
        g * (g - 1.0) * L ** b
        - b * (2.0 * g - 1.0) * L ** (b - 1.0)
        + b * (b - 1.0) * L ** (b - 2.0)
    )
    return v, d1, d2


def barrier_derivatives(spec: BarrierSpec, delta):
    """Value and first two derivatives at delta (scalar or array).

    All derivative formulas are hand-coded closed forms; dtype is
    preserved, so extended-precision inputs give extended-precision
    output (used by the finite-difference cross-checks).
    """
    _check_delta(spec, delta)
    fam = spec.family
    if fam is BarrierFamily.PURE_POWER or fam is BarrierFamily.KO_POWER:
        v, d1, d2 = _power_atom(spec.beta, delta)
    elif fam is BarrierFamily.POWER_CORRECTED:
        sgn = spec.sign.value
        v0, d10, d20 = _power_atom(spec.beta, delta)
        v1, d11, d21 = _power_atom(spec.beta + spec.epsilon, delta)
        v, d1, d2 = v0 + sgn * v1, d10 + sgn * d11, d20 + sgn * d21
    elif fam is BarrierFamily.LOG_POWER:
        v, d1, d2 = _log_atom(0.5, spec.beta, delta)
    elif fam is BarrierFamily.LOG_CORRECTED:
        sgn = spec.sign.value
        v0, d10, d20 = _log_atom(0.5, spec.beta, delta)
        v1, d11, d21 = _log_atom(0.5, spec.beta - spec.epsilon, delta)
        v, d1, d2 = v0 + sgn * v1, d10 + sgn * d11, d20 + sgn * d21
    elif fam is BarrierFamily.KO_REGULARIZED:
        a, c, eps = spec.beta, spec.pole_exp, spec.epsilon
        w = delta - eps
        v = delta ** a * w ** c
        d1 = a * delta ** (a - 1.0) * w ** c + c * delta ** a * w ** (c - 1.0)
        d2 = (
            a * (a - 1.0) * delta ** (a - 2.0) * w ** c
            + 2.0 * a * c * delta ** (a - 1.0) * w ** (c - 1.0)
            + c * (c - 1.0) * delta ** a * w ** (c - 2.0)
        )
    else:  # pragma: no cover
        raise DomainError(f"unknown barrier family {fam}")
    g = spec.gamma
    return g * v, g * d1, g * d2


def eval_barrier(spec: BarrierSpec, delta):
    """Closed-form barrier value at delta (scalar or array)."""
    return barrier_derivatives(spec, delta)[0]


def _q_factor(mu: float, beta, roots=None):
    """beta*(1-beta) - mu, factored through the characteristic roots when
    they exist so that the result is exactly zero at a root."""
    if roots is None:
        roots = characteristic_roots(mu)
    if roots is None:
        return beta * (1.0 - beta) - mu
    return (beta - roots.beta_minus) * (roots.beta_plus - beta)


def linear_residual(spec: BarrierSpec, params: ProblemParams, delta):
    """Residual -h'' - (mu/delta^2) h of the barrier in the slab.

    Positive residual means super-harmonic behavior, negative means
    sub-harmonic.  Power and log families use the factored characteristic
    quadratic, so residuals vanish identically (not just to rounding) for
    barriers built at the characteristic roots.
    """
    _check_delta(spec, delta)
    mu = params.mu
    roots = characteristic_roots(mu)
    fam = spec.family
    g = spec.gamma
    if fam is BarrierFamily.PURE_POWER or fam is BarrierFamily.KO_POWER:
        return g * _q_factor(mu, spec.beta, roots) * delta ** (spec.beta - 2.0)
    if fam is BarrierFamily.POWER_CORRECTED:
        sgn = spec.sign.value
        b0, b1 = spec.beta, spec.beta + spec.epsilon
        return g * (
            _q_factor(mu, b0, roots) * delta ** (b0 - 2.0)
            + sgn * _q_factor(mu, b1, roots) * delta ** (b1 - 2.0)
        )
    if fam in _LOG_FAMILIES:
        qhalf = _q_factor(mu, 0.5, roots)
        L = _log_recip(delta)

        def term(b):
            return qhalf * L ** b + b * (1.0 - b) * L ** (b - 2.0)

        if fam is BarrierFamily.LOG_POWER:
            bracket = term(spec.beta)
        else:
            bracket = term(spec.beta) + spec.sign.value * term(spec.beta - spec.epsilon)
        return g * delta ** -1.5 * bracket
    # envelope families: generic form from the hand-coded derivatives
    v, _, d2 = barrier_derivatives(spec, delta)
    return -d2 - (mu / delta ** 2) * v


def fd_linear_residual(spec: BarrierSpec, params: ProblemParams, delta: float,
                       rel_step: float = 1e-6, dps: int = 40) -> float:
    """Finite-difference evaluation of -h'' - (mu/delta^2) h.

    Centered differences at step rel_step * delta, evaluated in dps-digit
    arithmetic so that the differencing noise floor sits far below the
    truncation error even where the residual is orders of magnitude
    smaller than the barrier value.  Serves as the independent
    cross-check of the hand-derived closed forms.
    """
    import mpmath

    with mpmath.workdps(dps):
        d = mpmath.mpf(delta)
        step = d * mpmath.mpf(rel_step)
        f_hi = eval_barrier(spec, d + step)
        f_lo = eval_barrier(spec, d - step)
        f_0 = eval_barrier(spec, d)
        second = (f_hi - 2.0 * f_0 + f_lo) / (step * step)
        return float(-second - mpmath.mpf(params.mu) / (d * d) * f_0)


def nonlinear_residual(u_value, u_second_deriv, params: ProblemParams, delta):
    """Pointwise residual -u'' - (mu/delta^2) u + u^p / delta^s."""
    if np.any(np.asarray(delta) <= 0.0):
        raise DomainError("delta must be positive")
    if np.any(np.asarray(u_value) < 0.0):
        raise DomainError("u must be nonnegative (u^p undefined otherwise)")
    return (
        -u_second_deriv
        - (params.mu / delta ** 2) * u_value
        + u_value ** params.p / delta ** params.s
    )


def nonlinear_residual_of(spec: BarrierSpec, params: ProblemParams, delta):
    """Nonlinear residual of a barrier, via its closed-form derivatives."""
    v, _, d2 = barrier_derivatives(spec, delta)
    return nonlinear_residual(v, d2, params, delta)


# ---------------------------------------------------------------------------
# sign verification


def _residual_for_role(spec: BarrierSpec, params: ProblemParams, delta):
    if spec.claimed_role in (Role.SUB_HARMONIC, Role.SUPER_HARMONIC):
        return linear_residual(spec, params, delta)
    return nonlinear_residual_of(spec, params, delta)


def _residual_scale(spec: BarrierSpec, params: ProblemParams, delta):
    """Magnitude of the individual operator terms, used to turn the exact
    sign requirement into a rounding-tolerant one."""
    v, _, d2 = barrier_derivatives(spec, delta)
    scale = np.abs(d2) + np.abs(params.mu / delta ** 2 * v)
    if spec.claimed_role in (Role.SUB_SOLUTION, Role.SUPER_SOLUTION):
        scale = scale + np.abs(v) ** params.p / delta ** params.s
    return scale + 1.0


def validity_radius(spec: BarrierSpec, params: ProblemParams,
                    window: DistanceWindow, rel_tol: float = 1e-12) -> float:
    """Largest rho <= window.delta_max such that the residual keeps the
    claimed sign at every sampled delta in (delta_min, rho).

    Returns 0.0 (with a logged diagnostic) when the sign already fails at
    the innermost sample.  Residuals within rel_tol of zero relative to
    the term magnitudes count as either sign, so exact harmonics validate
    under both roles.
    """
    samples = window.samples()
    res = np.asarray(_residual_for_role(spec, params, samples), dtype=float)
    slack = rel_tol * np.asarray(_residual_scale(spec, params, samples), dtype=float)
    if spec.claimed_role in (Role.SUPER_HARMONIC, Role.SUPER_SOLUTION):
        ok = res >= -slack
    else:
        ok = res <= slack
    bad = np.flatnonzero(~ok)
    if bad.size == 0:
        return window.delta_max
    if bad[0] == 0:
        logger.info(
            "claimed %s sign fails at the innermost sample delta=%.3e "
            "(residual %.3e) for %s", spec.claimed_role.value,
            samples[0], res[0], spec.family.value)
        return 0.0
    return float(samples[bad[0] - 1])


@dataclass(frozen=True)
class SignCheck:
    name: str
    mu: float
    ok: bool
    detail: str


def _sweep_eps(mu: float) -> float:
    """Correction exponent for the sign sweep: 1/2 where admissible, else
    half of the admissible ceiling (the ceiling shrinks to sqrt(1-4mu) as
    mu approaches 1/4 from below; the log family at mu = 1/4 admits the
    full interval (0,1))."""
    if mu == 0.25:
        return 0.5
    cap = power_eps_max(mu)
    return 0.5 if 0.5 < cap else 0.5 * cap


def verify_sign_dichotomy(mu_values=(-1.0, -0.25, 0.0, 0.2, 0.25),
                          window: DistanceWindow | None = None) -> list[SignCheck]:
    """Sweep the named barrier catalog and check every claimed sign.

    For each mu the four corrected barriers (power form for mu < 1/4, log
    form at mu = 1/4) must have strictly signed residuals on the window,
    pure powers at the characteristic roots must have residual exactly
    zero to 1e-12, and pure powers strictly inside/outside the root
    interval must be strict supers/subs.
    """
    if window is None:
        window = DistanceWindow(1e-6, 0.05, 1000)
    samples = window.samples()
    checks: list[SignCheck] = []

    def record(name, mu, ok, detail=""):
        checks.append(SignCheck(name, mu, bool(ok), detail))

    for mu in mu_values:
        params = ProblemParams(mu=mu, p=2.0, s=0.0)  # p, s unused by linear residuals
        roots = characteristic_roots(mu)
        if roots is None:
            record("roots", mu, False, "mu > 1/4 has no barrier catalog")
            continue
        eps = _sweep_eps(mu)
        for name, spec in lemma_barriers(mu, eps).items():
            res = linear_residual(spec, params, samples)
            if spec.claimed_role is Role.SUPER_HARMONIC:
                ok = np.all(res > 0.0)
            else:
                ok = np.all(res < 0.0)
            record(name, mu, ok, f"eps={eps:.6g}")
        for tag, beta in (("root_minus", roots.beta_minus), ("root_plus", roots.beta_plus)):
            res = linear_residual(pure_power(beta, mu=mu), params, samples)
            ok = np.all(np.abs(res) < 1e-12)
            record(f"pure_power_{tag}", mu, ok, f"max|res|={np.max(np.abs(res)):.3e}")
        if not roots.degenerate:
            mid = 0.5 * (roots.beta_minus + roots.beta_plus)
            res = linear_residual(pure_power(mid, mu=mu), params, samples)
            record("pure_power_interior_super", mu, np.all(res > 0.0))
            res = linear_residual(pure_power(roots.beta_plus + 0.1, mu=mu), params, samples)
            record("pure_power_exterior_sub", mu, np.all(res < 0.0))
        else:
            res = linear_residual(log_power(0.5), params, samples)
            record("log_power_interior_super", mu, np.all(res > 0.0))
            res = linear_residual(log_power(1.5), params, samples)
            record("log_power_exterior_sub", mu, np.all(res < 0.0))
    return checks
