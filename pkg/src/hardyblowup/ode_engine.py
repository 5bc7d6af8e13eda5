"""Shooting integrator for the barrier ODE with blow-up detection.

Given a positive super-harmonic weight eta(r) of -h'' - (mu/r^2) h, a
curvature bound Hbar >= 0 and a shooting slope kappa > 0, the initial
value problem

    -v'' - (2 eta'/eta - Hbar) v' + (eta^(p-1) / r^s) v^p = 0,
    v(rho) = 0,   v'(rho) = -kappa,

is integrated leftward from r = rho toward r = 0.  Its maximal left
solution is positive and strictly decreasing in r; depending on (mu, p, s)
it either stays finite down to arbitrarily small r or explodes at a
positive radius R_kappa.  The product v(r) * eta(r) is then a
super-solution of the full nonlinear equation on (R_kappa, rho), which is
what makes the detected blow-up radius a nonexistence certificate:
blow-up occurs exactly in the regime s >= beta_minus*(p-1) + 2.

The integrator is a Dormand-Prince 5(4) embedded pair with the step
clamped to a fixed fraction of the distance to the coefficient
singularity at r = 0.  Blow-up is flagged when v exceeds a cap v_max; the
cap-crossing radius is then refined by step bisection, and
detect_blowup_radius extrapolates crossing radii over an increasing cap
sequence using the local pole model v ~ C (r - R)^(-2/(p-1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, NamedTuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from .barriers import (
    BarrierFamily,
    BarrierSpec,
    CorrectionSign,
    DistanceWindow,
    Role,
    eval_barrier,
    large_superharmonic,
    log_power,
    power_eps_max,
    small_superharmonic,
    validity_radius,
)
from .errors import (
    BracketFailure,
    DomainError,
    IncompatibleProblems,
    NotBlowingUp,
    PreconditionError,
)
from .regime import ProblemParams

__all__ = [
    "OdeProblem",
    "Terminal",
    "Trajectory",
    "default_eta",
    "integrate_left",
    "detect_blowup_radius",
    "BlowupRadiusEstimate",
    "kappa_sweep",
    "SweepEntry",
    "solve_bvp_eps",
    "ode_comparison_check",
    "ComparisonMode",
]


@dataclass(frozen=True)
class OdeProblem:
    """Data of one shooting run.

    eta   : positive super-harmonic weight (a BarrierSpec with claimed
            role SuperHarmonic, valid at least on (0, rho)).
    h_bar : constant curvature bound subtracted from the drift; 0 for the
            slab, (N-1)/(1-rho) for the unit ball exhausted up to radius
            1 - rho.
    rho   : right endpoint of the integration interval, in (0, 1).
    kappa : magnitude of the initial slope, v'(rho) = -kappa, kappa >= 0.
    """

    params: ProblemParams
    eta: BarrierSpec
    rho: float
    kappa: float
    h_bar: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise DomainError("rho must lie in (0, 1)")
        if self.kappa < 0.0:
            raise DomainError("kappa must be >= 0")
        if self.h_bar < 0.0:
            raise DomainError("h_bar must be >= 0")
        if self.eta.claimed_role is not Role.SUPER_HARMONIC:
            raise DomainError("eta must be a claimed super-harmonic")


class Terminal(Enum):
    REACHED_R_MIN = "ReachedRMin"
    BLOW_UP = "BlowUp"
    STEP_FAILURE = "StepFailure"


@dataclass
class Trajectory:
    """Sampled shooting solution, ordered by strictly decreasing r."""

    r: np.ndarray
    v: np.ndarray
    v_dot: np.ndarray
    terminal: Terminal
    r_min_target: float
    problem: OdeProblem
    r_kappa: float | None = None  # cap-crossing radius when terminal is BLOW_UP
    diagnostics: str = ""

    def check_monotone(self, strict: bool = True) -> bool:
        """True iff v > 0 and v' < 0 at every interior sample (the zero
        trajectory from kappa = 0 passes vacuously)."""
        if self.v.size <= 2 and np.all(self.v == 0.0):
            return True
        v, w = self.v[1:], self.v_dot[1:]
        if strict:
            return bool(np.all(v > 0.0) and np.all(w < 0.0))
        return bool(np.all(v >= 0.0) and np.all(w <= 0.0))


def default_eta(params: ProblemParams, eps: float | None = None) -> BarrierSpec:
    """Weight used by the nonexistence argument.

    mu < 1/4: r^beta_minus (1 + r^eps); mu = 1/4: r^(1/2)(1 - log(1/r)^-eps).
    eps defaults to 1/2, halved below the admissibility ceiling
    min(1, sqrt(1-4mu)) when 1/2 is not admissible.
    """
    mu = params.mu
    if mu > 0.25:
        raise DomainError("no positive super-harmonic weight exists for mu > 1/4")
    if mu == 0.25:
        return small_superharmonic(mu, 0.5 if eps is None else eps)
    if eps is None:
        cap = power_eps_max(mu)
        eps = 0.5 if 0.5 < cap else 0.5 * cap
    return large_superharmonic(mu, eps)


# ---------------------------------------------------------------------------
# fast scalar evaluation of eta and its logarithmic derivative

def _eta_closure(spec: BarrierSpec) -> Callable[[float], tuple[float, float]]:
    """Return r -> (eta(r), eta'(r)/eta(r)) using scalar math only."""
    g = spec.gamma
    fam = spec.family
    if fam in (BarrierFamily.PURE_POWER, BarrierFamily.KO_POWER):
        beta = spec.beta

        def f(r: float) -> tuple[float, float]:
            return g * r ** beta, beta / r

    elif fam is BarrierFamily.POWER_CORRECTED:
        beta, eps, sgn = spec.beta, spec.epsilon, float(spec.sign.value)

        def f(r: float) -> tuple[float, float]:
            re = r ** eps
            corr = 1.0 + sgn * re
            val = g * r ** beta * corr
            ratio = (beta + sgn * (beta + eps) * re) / (r * corr)
            return val, ratio

    elif fam is BarrierFamily.LOG_POWER:
        b = spec.beta

        def f(r: float) -> tuple[float, float]:
            L = -math.log(r)
            return g * math.sqrt(r) * L ** b, (0.5 - b / L) / r

    elif fam is BarrierFamily.LOG_CORRECTED:
        b0, eps, sgn = spec.beta, spec.epsilon, float(spec.sign.value)
        b1 = b0 - eps

        def f(r: float) -> tuple[float, float]:
            L = -math.log(r)
            A = L ** b0 + sgn * L ** b1
            dA = b0 * L ** (b0 - 1.0) + sgn * b1 * L ** (b1 - 1.0)
            val = g * math.sqrt(r) * A
            ratio = 0.5 / r - dA / (r * A)
            return val, ratio

    else:
        raise DomainError(f"unsupported eta family {fam}")
    return f


def _validate_eta(problem: OdeProblem, r_min: float) -> None:
    lo = min(r_min, problem.rho * 1e-3)
    window = DistanceWindow(lo, problem.rho, 400)
    vals = eval_barrier(problem.eta, window.samples())
    if not np.all(vals > 0.0):
        raise PreconditionError(
            "eta is not positive on the integration interval "
            f"(min value {np.min(vals):.3e}); shrink rho")
    vr = validity_radius(problem.eta, problem.params, window)
    if vr < problem.rho * (1.0 - 1e-12):
        raise PreconditionError(
            f"eta loses its super-harmonic sign at rho0={vr:.3e} < rho={problem.rho}")


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4)

_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0),
)
_B5 = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0)
# b5 - b4, including the FSAL stage
_E = (
    71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
    -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0,
)


def integrate_left(problem: OdeProblem, r_min: float = 1e-6, v_max: float = 1e8,
                   rtol: float = 1e-9, atol: float = 1e-12,
                   max_steps: int = 2_000_000) -> Trajectory:
    """Integrate the shooting problem from rho down toward r_min.

    Terminates with BLOW_UP when v exceeds v_max; the last accepted radius
    is then the cap-crossing radius, located by step bisection to a
    relative width of about 1e-13.  Steps are clamped to a tenth of the
    distance to r = 0, which keeps the drift coefficient ~ c/r resolved
    all the way down.  A step-controller underflow away from the cap is
    reported as STEP_FAILURE, never raised.

    Returns a Trajectory whose samples satisfy v > 0, v' < 0 strictly at
    interior points (kappa = 0 yields the zero trajectory).
    """
    if not 0.0 < r_min < problem.rho:
        raise DomainError("need 0 < r_min < rho")
    if v_max <= 0.0:
        raise DomainError("v_max must be positive")
    _validate_eta(problem, r_min)

    if problem.kappa == 0.0:
        r = np.array([problem.rho, r_min])
        z = np.zeros(2)
        return Trajectory(r, z.copy(), z.copy(), Terminal.REACHED_R_MIN,
                          r_min, problem)

    eta = _eta_closure(problem.eta)
    pm1 = problem.params.p - 1.0
    p = problem.params.p
    s = problem.params.s
    h_bar = problem.h_bar

    def f(r: float, v: float, w: float) -> tuple[float, float]:
        val, ratio = eta(r)
        a = 2.0 * ratio - h_bar
        b = val ** pm1 / r ** s
        vp = v ** p if v > 0.0 else 0.0
        return w, -a * w + b * vp

    rho = problem.rho
    r, v, w = rho, 0.0, -problem.kappa
    rs, vs, ws = [r], [v], [w]
    h = -min(0.05 * rho, 0.25 * (rho - r_min))
    terminal = Terminal.REACHED_R_MIN
    r_kappa = None
    diagnostics = ""
    steps = 0

    while True:
        if r <= r_min * (1.0 + 1e-14):
            terminal = Terminal.REACHED_R_MIN
            break
        if steps >= max_steps:
            terminal = Terminal.STEP_FAILURE
            diagnostics = f"step budget {max_steps} exhausted at r={r:.6e}"
            break
        # clamp toward the singularity and land exactly on r_min
        h = -min(-h, 0.1 * r)
        if r + h < r_min:
            h = r_min - r

        kv = [0.0] * 7
        kw = [0.0] * 7
        kv[0], kw[0] = f(r, v, w)
        bad = False
        for i in range(1, 7):
            ai = _A[i]
            dv = 0.0
            dw = 0.0
            for j in range(i):
                dv += ai[j] * kv[j]
                dw += ai[j] * kw[j]
            vi = v + h * dv
            wi = w + h * dw
            if not (math.isfinite(vi) and math.isfinite(wi)):
                bad = True
                break
            kv[i], kw[i] = f(r + _C[i] * h, vi, wi)
        if not bad:
            v5 = v + h * sum(b * k for b, k in zip(_B5, kv))
            w5 = w + h * sum(b * k for b, k in zip(_B5, kw))
            ev = h * sum(e * k for e, k in zip(_E, kv))
            ew = h * sum(e * k for e, k in zip(_E, kw))
            if math.isfinite(v5) and math.isfinite(w5) and math.isfinite(ev + ew):
                sv = atol + rtol * max(abs(v), abs(v5))
                sw = atol + rtol * max(abs(w), abs(w5))
                err = math.sqrt(0.5 * ((ev / sv) ** 2 + (ew / sw) ** 2))
            else:
                bad = True
        if bad:
            h *= 0.25
            if -h < 1e-16 * r:
                terminal = Terminal.STEP_FAILURE
                diagnostics = f"nonfinite stages at r={r:.6e}"
                break
            continue

        if err > 1.0:
            h *= max(0.2, 0.9 * err ** -0.2)
            if -h < 1e-16 * r:
                terminal = Terminal.STEP_FAILURE
                diagnostics = f"step underflow under error control at r={r:.6e}"
                break
            continue

        if v5 > v_max:
            # bisect the step toward the cap crossing
            if -h < 1e-13 * r:
                terminal = Terminal.BLOW_UP
                r_kappa = r
                break
            h *= 0.5
            continue

        r += h
        v, w = v5, w5
        rs.append(r)
        vs.append(v)
        ws.append(w)
        steps += 1
        h *= min(5.0, max(0.2, 0.9 * (err + 1e-300) ** -0.2))

    return Trajectory(
        np.array(rs), np.array(vs), np.array(ws), terminal, r_min, problem,
        r_kappa=r_kappa, diagnostics=diagnostics,
    )


class BlowupRadiusEstimate(NamedTuple):
    limit: float
    error_estimate: float
    radii: tuple[float, ...]
    v_max_sequence: tuple[float, ...]


def detect_blowup_radius(problem: OdeProblem,
                         v_max_sequence=(1e4, 1e6, 1e8),
                         r_min: float = 1e-6,
                         rtol: float = 1e-9, atol: float = 1e-12) -> BlowupRadiusEstimate:
    """Certified blow-up radius from an increasing sequence of caps.

    The crossing radius for cap V sits at R + (C/V)^((p-1)/2) by the pole
    model, so successive radii must decrease and be Cauchy; the limit is
    extrapolated from the last two entries with that exponent and the
    extrapolation shift is reported as the error estimate.

    Raises NotBlowingUp when the trajectory reaches r_min without touching
    one of the caps, or when the crossing radii fail to decrease.
    """
    if len(v_max_sequence) < 2:
        raise DomainError("need at least two caps to extrapolate")
    if any(b <= a for a, b in zip(v_max_sequence, v_max_sequence[1:])):
        raise DomainError("v_max_sequence must be strictly increasing")
    radii = []
    for vm in v_max_sequence:
        traj = integrate_left(problem, r_min=r_min, v_max=vm, rtol=rtol, atol=atol)
        if traj.terminal is not Terminal.BLOW_UP:
            raise NotBlowingUp(
                f"no blow-up above r_min={r_min} below cap v_max={vm:.1e} "
                f"(terminal {traj.terminal.value})")
        radii.append(traj.r_kappa)
    for a, b in zip(radii, radii[1:]):
        if b > a * (1.0 + 1e-10):
            raise NotBlowingUp(
                f"cap-crossing radii not decreasing: {radii}; "
                "growth is too slow to certify blow-up")
    theta = (v_max_sequence[-1] / v_max_sequence[-2]) ** (-(problem.params.p - 1.0) / 2.0)
    r_prev, r_last = radii[-2], radii[-1]
    limit = (r_last - theta * r_prev) / (1.0 - theta)
    return BlowupRadiusEstimate(limit, abs(limit - r_last), tuple(radii),
                                tuple(v_max_sequence))


class SweepEntry(NamedTuple):
    kappa: float
    r_kappa: float       # 0.0 when no blow-up is detected above r_min
    sup_v_tail: float    # sup of v on [r_star, rho]
    terminal: Terminal


def kappa_sweep(problem_template: OdeProblem, kappas, r_star: float | None = None,
                r_min: float = 1e-6, v_max: float = 1e8,
                rtol: float = 1e-9, atol: float = 1e-12) -> list[SweepEntry]:
    """Shoot once per kappa and record blow-up radius and tail supremum.

    kappas must decrease strictly toward 0.  Along the sweep the detected
    radii are nonincreasing and the tail suprema decrease to zero; both
    are consequences of the initial-slope comparison principle and are
    asserted by the test-suite, not silently enforced here.
    """
    kappas = list(kappas)
    if any(b >= a for a, b in zip(kappas, kappas[1:])):
        raise DomainError("kappas must be strictly decreasing")
    if r_star is None:
        r_star = 0.5 * problem_template.rho
    entries = []
    for kappa in kappas:
        traj = integrate_left(replace(problem_template, kappa=kappa),
                              r_min=r_min, v_max=v_max, rtol=rtol, atol=atol)
        tail = traj.v[traj.r >= r_star * (1.0 - 1e-12)]
        sup_v = float(np.max(tail)) if tail.size else 0.0
        r_k = traj.r_kappa if traj.terminal is Terminal.BLOW_UP else 0.0
        entries.append(SweepEntry(kappa, r_k, sup_v, traj.terminal))
    return entries


def solve_bvp_eps(problem_template: OdeProblem, r_star: float, eps: float,
                  v_rel_tol: float = 1e-8, rtol: float = 1e-9,
                  atol: float = 1e-12) -> tuple[float, Trajectory]:
    """Shoot for the boundary value problem v(r_star) = eps, v(rho) = 0.

    Bisects on the initial slope kappa; v(r_star; kappa) is continuous and
    strictly increasing in kappa below blow-up, so the bracket closes
    geometrically.  Returns (kappa, trajectory) with
    |v(r_star) - eps| <= v_rel_tol * eps.
    """
    if not 0.0 < r_star < problem_template.rho:
        raise DomainError("need 0 < r_star < rho")
    if eps <= 0.0:
        raise DomainError("eps must be positive")

    cap = max(1e8, 1e4 * eps)

    def value_at(kappa: float) -> float:
        traj = integrate_left(replace(problem_template, kappa=kappa),
                              r_min=r_star, v_max=cap, rtol=rtol, atol=atol)
        if traj.terminal is Terminal.BLOW_UP:
            return math.inf
        if traj.terminal is Terminal.STEP_FAILURE:
            raise BracketFailure(f"integration failed at kappa={kappa}: {traj.diagnostics}")
        return float(traj.v[-1])

    kappa_hi = max(problem_template.kappa, 1.0)
    for _ in range(80):
        if value_at(kappa_hi) > eps:
            break
        kappa_hi *= 4.0
        if kappa_hi > 1e14:
            raise BracketFailure("no upper bracket: v(r_star) stays below eps")
    else:
        raise BracketFailure("no upper bracket found")
    kappa_lo = kappa_hi
    for _ in range(120):
        kappa_lo /= 4.0
        if kappa_lo < 1e-14:
            raise BracketFailure("no lower bracket: v(r_star) stays above eps")
        if value_at(kappa_lo) < eps:
            break
    else:
        raise BracketFailure("no lower bracket found")

    kappa = kappa_hi
    for _ in range(200):
        kappa = math.sqrt(kappa_lo * kappa_hi)
        val = value_at(kappa)
        if math.isfinite(val) and abs(val - eps) <= v_rel_tol * eps:
            break
        if val > eps:
            kappa_hi = kappa
        else:
            kappa_lo = kappa
    else:
        raise BracketFailure(
            f"bisection stalled: bracket [{kappa_lo}, {kappa_hi}] with "
            f"v(r_star)={value_at(kappa):.6e}, target {eps:.6e}")

    traj = integrate_left(replace(problem_template, kappa=kappa),
                          r_min=r_star, v_max=cap, rtol=rtol, atol=atol)
    return kappa, traj


class ComparisonMode(Enum):
    IVP = "IVP"
    BVP = "BVP"


def _same_coefficients(a: OdeProblem, b: OdeProblem) -> bool:
    return (a.params == b.params and a.eta == b.eta
            and a.h_bar == b.h_bar and a.rho == b.rho)


def ode_comparison_check(u_traj: Trajectory, v_traj: Trajectory,
                         mode: ComparisonMode) -> bool:
    """Ordering check for two trajectories of the same ODE.

    IVP mode: if u(rho) <= v(rho) and u'(rho) > v'(rho) then u < v at
    every interior common sample.  BVP mode: if u > v at both ends of the
    common interval then u > v throughout.  When the hypotheses fail the
    implication holds vacuously and True is returned.  Trajectories are
    resampled onto the union of their radii by monotone (PCHIP)
    interpolation.
    """
    if not _same_coefficients(u_traj.problem, v_traj.problem):
        raise IncompatibleProblems("trajectories come from different coefficient sets")
    lo = max(u_traj.r.min(), v_traj.r.min())
    hi = min(u_traj.r.max(), v_traj.r.max())
    if lo >= hi:
        raise IncompatibleProblems("trajectories have no overlapping radii")
    grid = np.unique(np.concatenate([u_traj.r, v_traj.r]))
    grid = grid[(grid >= lo) & (grid <= hi)]
    u_i = PchipInterpolator(u_traj.r[::-1], u_traj.v[::-1])(grid)
    v_i = PchipInterpolator(v_traj.r[::-1], v_traj.v[::-1])(grid)
    interior = grid[1:-1]
    u_int, v_int = u_i[1:-1], v_i[1:-1]
    if interior.size == 0:
        return True
    if mode is ComparisonMode.IVP:
        u_end = u_traj.v[0]
        v_end = v_traj.v[0]
        u_slope = u_traj.v_dot[0]
        v_slope = v_traj.v_dot[0]
        if not (u_end <= v_end and u_slope > v_slope):
            return True
        return bool(np.all(u_int < v_int))
    # BVP
    if not (u_i[-1] > v_i[-1] and u_i[0] > v_i[0]):
        return True
    return bool(np.all(u_int > v_int))
