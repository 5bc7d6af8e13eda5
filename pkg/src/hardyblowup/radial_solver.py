"""Graded-mesh finite differences for -lap(u) - (mu/d^2) u + u^p/d^s = 0.

Two one-dimensional geometries are supported, both parameterized by the
distance d to the blow-up boundary:

  Slab : domain (0,1), d = x, blow-up boundary at x = 0, Dirichlet data at
         the outer end x = 1.  lap(u) = u''.
  Ball : unit ball in R^N, radial profile u(r), d = 1 - r.  In the d
         variable lap(u) = u_dd - ((N-1)/(1-d)) u_d away from the center,
         and N * u_rr at the center d = 1, where regularity imposes
         u'(r=0) = 0 via the symmetric stencil.

The mesh is geometrically graded toward d = 0 so that power-law boundary
layers d^b with b < 0 are resolved with a few hundred nodes.  The
discrete system is solved by damped Newton with nonnegativity clamping
(the nonlinearity is evaluated as relu(u)^p) and a tridiagonal Thomas
solve; on stagnation it falls back to the shifted monotone iteration

    (-lap_h - mu/d^2 + lambda) u_next = lambda u - relu(u)^p / d^s,

whose shift lambda dominates the nonlinearity slope, giving monotone
convergence between ordered sub/super iterates.

Boundary blow-up is emulated by exhaustion: the problem is solved on
{d > eps} with a large Dirichlet proxy M at d = eps, M running through an
increasing sequence and eps through a decreasing one; solutions increase
in M and decrease on compacts as eps shrinks, and the stagewise limits
carry the boundary asymptotics that the fitting module classifies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .barriers import (
    BarrierSpec,
    eval_barrier,
    ko_amplitude,
    ko_supersolution,
    large_superharmonic,
    power_eps_max,
)
from .errors import DomainError, NonConvergence, PreconditionError, RegimeError
from .regime import ProblemParams, Verdict, characteristic_roots, existence_verdict

__all__ = [
    "GeometryKind",
    "Geometry",
    "Grid",
    "BoundaryConditions",
    "InnerBC",
    "GridSolution",
    "SubSuperPair",
    "DiscreteOperator",
    "discretize",
    "thomas_solve",
    "solve_bvp",
    "build_subsuper_pair",
    "exhaustion_solve",
    "discrete_comparison_check",
    "exhaustion_limit_profile",
    "ko_bound_margin",
    "ko_bound_margin_ball",
]


class GeometryKind(Enum):
    SLAB = "slab"
    BALL = "ball"


@dataclass(frozen=True)
class Geometry:
    kind: GeometryKind
    dim: int = 1  # ambient dimension, used by BALL only (N >= 2)

    def __post_init__(self):
        if self.kind is GeometryKind.BALL and self.dim < 2:
            raise DomainError("ball geometry needs dimension N >= 2")


@dataclass(frozen=True)
class Grid:
    """Strictly increasing d-nodes, geometrically graded toward d = 0."""

    nodes: np.ndarray
    ratio: float = 1.05
    h_max: float = 0.005

    def __post_init__(self):
        d = np.asarray(self.nodes, dtype=float)
        if d.ndim != 1 or d.size < 4:
            raise DomainError("grid needs at least 4 nodes")
        h = np.diff(d)
        if np.any(h <= 0.0):
            raise DomainError("grid nodes must be strictly increasing")
        q = h[1:] / h[:-1]
        # slack covers cumsum rounding of the node coordinates
        if np.any(q < 1.0 - 1e-8) or np.any(q > 1.2 * (1.0 + 1e-8)):
            raise DomainError("consecutive spacing ratios must stay in [1, 1.2]")
        object.__setattr__(self, "nodes", d)

    @property
    def delta_min(self) -> float:
        return float(self.nodes[0])

    @property
    def delta_max(self) -> float:
        return float(self.nodes[-1])

    @property
    def n(self) -> int:
        return int(self.nodes.size)

    @classmethod
    def graded(cls, delta_min: float, delta_max: float = 1.0,
               ratio: float = 1.05, h_max: float = 0.005) -> "Grid":
        """Geometric grading from delta_min outward, spacing capped at h_max.

        Spacings grow as h0 * ratio^k from h0 = delta_min*(ratio-1) until
        the cap, then stay constant; the whole list is rescaled so the
        last node lands exactly on delta_max (rescaling preserves the
        spacing ratios, hence the [1, 1.2] invariant).
        """
        if not 0.0 < delta_min < delta_max:
            raise DomainError("need 0 < delta_min < delta_max")
        if not 1.0 < ratio <= 1.2:
            raise DomainError("grading ratio must lie in (1, 1.2]")
        span = delta_max - delta_min
        spacings = []
        h = delta_min * (ratio - 1.0)
        total = 0.0
        while total < span:
            spacings.append(h)
            total += h
            h = min(h * ratio, h_max)
        arr = np.array(spacings) * (span / total)
        nodes = delta_min + np.concatenate([[0.0], np.cumsum(arr)])
        nodes[-1] = delta_max
        return cls(nodes, ratio=ratio, h_max=h_max)

    def refine(self) -> "Grid":
        """Roughly double the resolution (halved cap, square-rooted ratio)."""
        return Grid.graded(self.delta_min, self.delta_max,
                           ratio=math.sqrt(self.ratio), h_max=0.5 * self.h_max)


class InnerBC(Enum):
    DIRICHLET = "DirichletValue"
    EXHAUSTED = "Exhausted"


@dataclass(frozen=True)
class BoundaryConditions:
    """Inner Dirichlet value at d = delta_min plus the outer condition.

    outer_value applies at d = delta_max for the slab; the ball replaces
    the outer Dirichlet row by the symmetry condition at the center and
    ignores outer_value.
    """

    inner_value: float
    outer_value: float = 0.0
    inner_kind: InnerBC = InnerBC.DIRICHLET
    exhaustion_eps: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.inner_value) or self.inner_value < 0.0:
            raise DomainError("inner boundary value must be finite and >= 0")
        if not math.isfinite(self.outer_value) or self.outer_value < 0.0:
            raise DomainError("outer boundary value must be finite and >= 0")


@dataclass
class GridSolution:
    """A converged (or candidate) nonnegative profile on a grid."""

    grid: Grid
    values: np.ndarray
    geometry: Geometry
    params: ProblemParams
    bc: BoundaryConditions
    residual_norm: float
    iterations: int

    def compact_values(self, lo: float = 0.1, hi: float = 0.9):
        mask = (self.grid.nodes >= lo) & (self.grid.nodes <= hi)
        return self.grid.nodes[mask], self.values[mask]

    def interp(self, delta):
        return np.interp(delta, self.grid.nodes, self.values)


@dataclass
class SubSuperPair:
    sub: GridSolution
    sup: GridSolution
    ordered: bool


def thomas_solve(sub: np.ndarray, diag: np.ndarray, sup: np.ndarray,
                 rhs: np.ndarray) -> np.ndarray:
    """Gaussian elimination for a tridiagonal system, no pivoting.

    sub[i] multiplies x[i-1] in row i (sub[0] unused), sup[i] multiplies
    x[i+1] (sup[-1] unused).  Deterministic: a fixed input order always
    produces bit-identical output.
    """
    n = diag.size
    c = np.empty(n)
    d = np.empty(n)
    c[0] = sup[0] / diag[0]
    d[0] = rhs[0] / diag[0]
    for i in range(1, n):
        m = diag[i] - sub[i] * c[i - 1]
        c[i] = sup[i] / m if i < n - 1 else 0.0
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m
    x = np.empty(n)
    x[-1] = d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


class DiscreteOperator:
    """Second-order nonuniform finite differences with eliminated Dirichlet rows.

    Rows (unknowns) are the interior nodes, plus the center node for the
    ball.  The residual of a full-length value array is

        F_i = -lap_h(u)_i - (mu/d_i^2) u_i + relu(u_i)^p / d_i^s .
    """

    def __init__(self, geometry: Geometry, params: ProblemParams, grid: Grid,
                 bc: BoundaryConditions):
        self.geometry = geometry
        self.params = params
        self.grid = grid
        self.bc = bc
        d = grid.nodes
        n = d.size
        h = np.diff(d)
        hm = h[:-1]
        hp = h[1:]
        # u'' weights at interior nodes 1..n-2
        self._d2m = 2.0 / (hm * (hm + hp))
        self._d2c = -2.0 / (hm * hp)
        self._d2p = 2.0 / (hp * (hm + hp))
        # u' weights (second-order nonuniform central)
        self._d1m = -hp / (hm * (hm + hp))
        self._d1c = (hp - hm) / (hm * hp)
        self._d1p = hm / (hp * (hm + hp))
        di = d[1:-1]
        if geometry.kind is GeometryKind.BALL:
            self._drift = (geometry.dim - 1.0) / (1.0 - di)  # lap = u_dd - drift u_d
            self._center = True
            self._h_center = h[-1]
        else:
            self._drift = np.zeros_like(di)
            self._center = False
        self.hardy = params.mu / d ** 2
        self.weight = d ** (-params.s)
        self._n = n
        # unknown rows: interior plus center for the ball
        self.rows = np.arange(1, n - 1 if not self._center else n)

    # -- assembly -----------------------------------------------------------

    def apply_bc(self, values: np.ndarray) -> np.ndarray:
        u = np.array(values, dtype=float)
        u[0] = self.bc.inner_value
        if not self._center:
            u[-1] = self.bc.outer_value
        return u

    def laplacian(self, values: np.ndarray) -> np.ndarray:
        """Discrete lap_h(u) at the unknown rows."""
        u = np.asarray(values, dtype=float)
        d2 = self._d2m * u[:-2] + self._d2c * u[1:-1] + self._d2p * u[2:]
        d1 = self._d1m * u[:-2] + self._d1c * u[1:-1] + self._d1p * u[2:]
        lap = d2 - self._drift * d1
        if self._center:
            nd = self.geometry.dim
            lc = 2.0 * nd * (u[-2] - u[-1]) / self._h_center ** 2
            lap = np.concatenate([lap, [lc]])
        return lap

    def residual(self, values: np.ndarray) -> np.ndarray:
        """F at the unknown rows (boundary values read from the array)."""
        u = np.asarray(values, dtype=float)
        rows = self.rows
        up = np.maximum(u[rows], 0.0)
        return (-self.laplacian(u) - self.hardy[rows] * u[rows]
                + up ** self.params.p * self.weight[rows])

    def residual_scale(self, values: np.ndarray) -> np.ndarray:
        """1 + sum of term magnitudes, for relative residual norms."""
        u = np.asarray(values, dtype=float)
        rows = self.rows
        up = np.maximum(u[rows], 0.0)
        return (1.0 + np.abs(self.laplacian(u)) + np.abs(self.hardy[rows] * u[rows])
                + up ** self.params.p * self.weight[rows])

    def residual_noise(self, values: np.ndarray) -> np.ndarray:
        """Rounding floor of the residual evaluation at each unknown row.

        The second-difference stencil multiplies O(1/h^2) coefficients
        into nearly-cancelling neighbor values, so the assembled residual
        cannot be evaluated below eps times the assembly magnitude; the
        convergence test discounts imbalances under this floor.
        """
        u = np.abs(np.asarray(values, dtype=float))
        assembly = (np.abs(self._d2m) + np.abs(self._d1m) * np.abs(self._drift)) * u[:-2] \
            + (np.abs(self._d2c) + np.abs(self._d1c) * np.abs(self._drift)) * u[1:-1] \
            + (np.abs(self._d2p) + np.abs(self._d1p) * np.abs(self._drift)) * u[2:]
        if self._center:
            nd = self.geometry.dim
            ac = 2.0 * nd * (u[-2] + u[-1]) / self._h_center ** 2
            assembly = np.concatenate([assembly, [ac]])
        rows = self.rows
        up = np.maximum(u[rows], 0.0)
        assembly = assembly + np.abs(self.hardy[rows]) * u[rows] \
            + up ** self.params.p * self.weight[rows]
        return 100.0 * np.finfo(float).eps * assembly

    def scaled_norms(self, values: np.ndarray) -> tuple[float, float]:
        """(max, rms) of the residual relative to the term magnitudes.

        The max norm ignores imbalances below the rounding floor; it is
        the provable relative defect and is what convergence tests check.
        """
        f = np.abs(self.residual(values))
        w = self.residual_scale(values)
        noise = self.residual_noise(values)
        meaningful = np.maximum(f - noise, 0.0) / w
        smooth = f / (w + noise / np.finfo(float).eps ** 0.5)
        return float(np.max(meaningful)), float(math.sqrt(np.mean(smooth * smooth)))

    def jacobian(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Tridiagonal bands of dF/du over the unknown rows."""
        u = np.asarray(values, dtype=float)
        p = self.params.p
        rows = self.rows
        up = np.maximum(u[rows], 0.0)
        nl = p * up ** (p - 1.0) * self.weight[rows]
        sub_i = -(self._d2m - self._drift * self._d1m)
        diag_i = -(self._d2c - self._drift * self._d1c) - self.hardy[1:-1]
        sup_i = -(self._d2p - self._drift * self._d1p)
        if self._center:
            nd = self.geometry.dim
            coef = 2.0 * nd / self._h_center ** 2
            sub = np.concatenate([sub_i, [-coef]])
            diag = np.concatenate([diag_i, [coef - self.hardy[-1]]])
            sup = np.concatenate([sup_i, [0.0]])
        else:
            sub, diag, sup = sub_i.copy(), diag_i.copy(), sup_i.copy()
        diag = diag + nl
        return sub, diag, sup

    def linear_bands(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Bands of the linear part -lap_h - mu/d^2 over the unknown rows."""
        zero = np.zeros(self._n)
        sub, diag, sup = self.jacobian(zero)
        return sub, diag, sup  # relu'(0) = 0, so this is purely linear


def discretize(geometry: Geometry, params: ProblemParams, grid: Grid,
               bc: BoundaryConditions) -> DiscreteOperator:
    """Assemble the discrete operator handle for one boundary-value problem."""
    return DiscreteOperator(geometry, params, grid, bc)


# ---------------------------------------------------------------------------
# nonlinear solve


def solve_bvp(operator: DiscreteOperator, initial, tol: float = 1e-9,
              max_iter: int = 80, fallback_iter: int = 5000) -> GridSolution:
    """Damped Newton with nonnegativity clamping, monotone-iteration fallback.

    The residual norm is relative: max_i |F_i| / (1 + term magnitudes),
    so convergence means the equation balances to `tol` at every node
    regardless of how singular the coefficients are there.  Raises
    NonConvergence with the last norm when both phases stall.
    """
    if isinstance(initial, GridSolution):
        initial = initial.values
    u = operator.apply_bc(np.maximum(np.asarray(initial, dtype=float), 0.0))
    rows = operator.rows
    iterations = 0

    max_n, rms = operator.scaled_norms(u)
    for _ in range(max_iter):
        if max_n < tol:
            return _pack(operator, u, max_n, iterations)
        f = operator.residual(u)
        sub, diag, sup = operator.jacobian(u)
        step = thomas_solve(sub, diag, sup, -f)
        lam = 1.0
        improved = False
        for _ in range(30):
            u_try = u.copy()
            u_try[rows] = np.maximum(u[rows] + lam * step, 0.0)
            m_try, r_try = operator.scaled_norms(u_try)
            if r_try < rms or m_try < max_n:
                u, max_n, rms = u_try, m_try, r_try
                improved = True
                break
            lam *= 0.5
        iterations += 1
        if not improved:
            break
    if max_n < tol:
        return _pack(operator, u, max_n, iterations)

    # monotone fallback: shift past the nonlinearity slope
    sub_l, diag_l, sup_l = operator.linear_bands()
    p = operator.params.p
    w = operator.weight[rows]
    best = max_n
    stalled = 0
    for _ in range(fallback_iter):
        up = np.maximum(u[rows], 0.0)
        lam_shift = float(np.max(p * up ** (p - 1.0) * w)) + 1.0
        rhs = lam_shift * u[rows] - up ** p * w
        # move the known boundary neighbors to the right-hand side
        rhs[0] -= sub_l[0] * u[0]
        if not operator._center:
            rhs[-1] -= sup_l[-1] * u[-1]
        u_new = u.copy()
        u_new[rows] = np.maximum(
            thomas_solve(sub_l, diag_l + lam_shift, sup_l, rhs), 0.0)
        u = u_new
        iterations += 1
        max_n, rms = operator.scaled_norms(u)
        if max_n < tol:
            return _pack(operator, u, max_n, iterations)
        if max_n < best * (1.0 - 1e-3):
            best = max_n
            stalled = 0
        else:
            stalled += 1
            if stalled > 60:
                break
    raise NonConvergence("nonlinear solve stalled", residual=max_n,
                         iterations=iterations)


def _pack(operator: DiscreteOperator, u: np.ndarray, norm: float,
          iterations: int) -> GridSolution:
    if np.any(u < 0.0):
        raise NonConvergence("negative values survived clamping", residual=norm)
    return GridSolution(
        grid=operator.grid, values=u, geometry=operator.geometry,
        params=operator.params, bc=operator.bc,
        residual_norm=norm, iterations=iterations)


# ---------------------------------------------------------------------------
# sub/super-solution constructions


def _halve_until_signed(values_of, operator, want_nonpositive, label,
                        start=1.0, max_halvings=50, rel_slack=1e-9):
    """Scale a candidate profile down until its discrete residual has the
    required sign at every unknown row.  The profile's own boundary values
    are kept (the operator's Dirichlet data plays no role here)."""
    scale = start
    for _ in range(max_halvings):
        u = np.maximum(np.asarray(values_of(scale), dtype=float), 0.0)
        f = operator.residual(u)
        tol = rel_slack * operator.residual_scale(u)
        ok = np.all(f <= tol) if want_nonpositive else np.all(f >= -tol)
        if ok:
            return scale, u
        scale *= 0.5
    raise NonConvergence(f"could not sign the {label} residual by scaling down")


def build_subsuper_pair(params: ProblemParams, geometry: Geometry, grid: Grid,
                        target: str = "xxl", rho: float = 0.25) -> SubSuperPair:
    """Ordered discrete sub/super-solution pair in the existence regime.

    target "xxl": sub = gamma (d^b - kappa d^(1/2) log^(1/2)(1/d))_+ cut off
    at d = rho and extended by zero (b the envelope exponent, kappa chosen
    so the bracket vanishes at rho, gamma halved from half the exact
    envelope amplitude until the discrete residual is nonpositive); sup is
    the envelope super-solution.

    target "ml": sub = (d^beta- - kappa d^alpha)_+ with alpha the midpoint
    of (beta-, min(beta- p + 2 - s, beta- + 1, beta+)), or its logarithmic
    analogue at mu = 1/4; sup = min(tau * large super-harmonic, shifted
    envelope), a concave-kink minimum of two super-solutions.
    """
    report = existence_verdict(params)
    if report.verdict is not Verdict.EXISTENCE:
        raise RegimeError(
            f"sub/super pair requires the existence regime, got {report.verdict.value}")
    if not 0.0 < rho < 1.0:
        raise DomainError("rho must lie in (0,1)")
    d = grid.nodes
    roots = report.roots
    b = params.ko_exponent
    op = discretize(geometry, params, grid,
                    BoundaryConditions(inner_value=0.0, outer_value=0.0))

    if target == "xxl":
        amp = ko_amplitude(params)
        if amp is None:  # unreachable in the existence regime; guard anyway
            raise RegimeError("no positive envelope amplitude")
        L = np.log(1.0 / np.minimum(d, 1.0 - 1e-12))
        kappa = rho ** (b - 0.5) * math.log(1.0 / rho) ** -0.5
        base = d ** b - kappa * np.sqrt(d) * np.sqrt(L)

        def sub_values(scale):
            prof = np.where(d < rho, np.maximum(base, 0.0), 0.0)
            return scale * prof

        scale, sub_u = _halve_until_signed(sub_values, op, True, "xxl sub",
                                           start=0.5 * amp)
        ko = ko_supersolution(params, 0.0)
        sup_u = np.asarray(eval_barrier(ko, d), dtype=float)
    elif target == "ml":
        if roots.degenerate:
            alpha = 0.5
            Ld = np.log(1.0 / d)
            L_rho = math.log(1.0 / rho)
            kappa = L_rho ** (1.0 - alpha)
            base = np.sqrt(d) * (Ld - kappa * Ld ** alpha)
            eps_sup = 0.5
        else:
            hi = min(roots.beta_minus * params.p + 2.0 - params.s,
                     roots.beta_minus + 1.0, roots.beta_plus)
            alpha = 0.5 * (roots.beta_minus + hi)
            kappa = rho ** (roots.beta_minus - alpha)
            base = d ** roots.beta_minus - kappa * d ** alpha
            cap = power_eps_max(params.mu)
            eps_sup = 0.5 if 0.5 < cap else 0.5 * cap

        def sub_values(scale):
            prof = np.where(d < rho, np.maximum(base, 0.0), 0.0)
            return scale * prof

        scale, sub_u = _halve_until_signed(sub_values, op, True, "ml sub")
        big = large_superharmonic(params.mu, eps_sup)
        big_vals = eval_barrier(big, np.minimum(d, 1.0 - 1e-12))
        R = 0.5 * rho
        ko_r = ko_supersolution(params, R)
        # tau * large super-harmonic must clear the shifted envelope where
        # the two cross, i.e. around d = rho
        tau = max(1.0, 2.0 * float(eval_barrier(ko_r, rho) / eval_barrier(big, rho)))
        sup_u = tau * np.array(big_vals)
        far = d > R * 1.05
        sup_u[far] = np.minimum(sup_u[far], eval_barrier(ko_r, d[far]))
        f = op.residual(sup_u)
        tol = 1e-9 * op.residual_scale(sup_u)
        if not np.all(f >= -tol):
            raise NonConvergence("ml super-solution residual failed its sign check")
    else:
        raise DomainError(f"unknown pair target {target!r}")

    sub_sol = GridSolution(grid, sub_u, geometry, params,
                           BoundaryConditions(inner_value=float(sub_u[0]),
                                              outer_value=float(sub_u[-1])),
                           residual_norm=math.nan, iterations=0)
    sup_sol = GridSolution(grid, np.asarray(sup_u, dtype=float), geometry, params,
                           BoundaryConditions(inner_value=float(sup_u[0]),
                                              outer_value=float(sup_u[-1])),
                           residual_norm=math.nan, iterations=0)
    ordered = bool(np.all(sub_sol.values <= sup_sol.values * (1.0 + 1e-12) + 1e-300))
    return SubSuperPair(sub_sol, sup_sol, ordered)


def discrete_comparison_check(sub: GridSolution, sup: GridSolution,
                              rel_slack: float = 1e-9) -> bool:
    """Discrete comparison principle test.

    Verifies the preconditions (same grid and parameters; nonpositive sub
    residual and nonnegative sup residual at every unknown row; ordering
    at both boundary nodes), then reports whether sub <= sup holds at
    every node.  Precondition violations raise PreconditionError.
    """
    if not np.array_equal(sub.grid.nodes, sup.grid.nodes):
        raise PreconditionError("sub and sup live on different grids")
    if sub.params != sup.params or sub.geometry != sup.geometry:
        raise PreconditionError("sub and sup have different problem data")
    for sol, nonpos, label in ((sub, True, "sub"), (sup, False, "sup")):
        op = discretize(sol.geometry, sol.params, sol.grid,
                        BoundaryConditions(inner_value=float(sol.values[0]),
                                           outer_value=float(sol.values[-1])))
        f = op.residual(sol.values)
        tol = rel_slack * op.residual_scale(sol.values)
        ok = np.all(f <= tol) if nonpos else np.all(f >= -tol)
        if not ok:
            worst = float(np.max(f / tol) if nonpos else np.min(f / tol))
            raise PreconditionError(
                f"{label} residual has the wrong sign (worst scaled value {worst:.3g})")
    if sub.values[0] > sup.values[0] * (1.0 + 1e-12) or \
       sub.values[-1] > sup.values[-1] * (1.0 + 1e-12) + 1e-300:
        raise PreconditionError("boundary ordering sub <= sup fails")
    return bool(np.all(sub.values <= sup.values * (1.0 + 1e-12) + 1e-300))


# ---------------------------------------------------------------------------
# exhaustion


def _initial_profile(params: ProblemParams, grid: Grid, m_value: float,
                     bc_outer: float) -> np.ndarray:
    """Crude positive starting iterate: envelope profile capped at the
    boundary proxy, plus a decaying spike emanating from the proxy node."""
    d = grid.nodes
    p = params.p
    spike = m_value * (d[0] / d) ** (2.0 / (p - 1.0))
    amp = ko_amplitude(params)
    if amp is not None:
        prof = np.maximum(spike, np.minimum(amp * d ** params.ko_exponent, m_value))
    else:
        prof = spike + bc_outer
    return np.minimum(prof, m_value)


def exhaustion_solve(params: ProblemParams, geometry: Geometry,
                     eps_sequence, M_sequence, bc_outer: float = 0.0,
                     ratio: float = 1.05, h_max: float = 0.005,
                     tol: float = 1e-9, cauchy_tol: float = 1e-3,
                     compact=(0.1, 0.9)) -> list[GridSolution]:
    """Solve the family of proxy large-solution problems on {d > eps}.

    For each eps (strictly decreasing) a graded grid with inner node at
    eps is built and the problem is solved for each Dirichlet proxy M in
    the increasing M_sequence, warm-starting each solve from the previous
    one.  Within a stage the solutions must increase with M and be Cauchy
    on the compact window (relative cauchy_tol between the last two M);
    across stages the values on the common compact must not increase as
    eps shrinks.  Violations raise NonConvergence.

    Returns the final-M solution of each stage, tagged with its
    exhaustion data.
    """
    eps_sequence = list(eps_sequence)
    M_sequence = list(M_sequence)
    if any(b >= a for a, b in zip(eps_sequence, eps_sequence[1:])):
        raise DomainError("eps_sequence must be strictly decreasing")
    if any(e <= 0.0 for e in eps_sequence):
        raise DomainError("eps values must be positive")
    if any(b <= a for a, b in zip(M_sequence, M_sequence[1:])):
        raise DomainError("M_sequence must be strictly increasing")

    stages: list[GridSolution] = []
    prev: GridSolution | None = None
    for eps in eps_sequence:
        grid = Grid.graded(eps, 1.0, ratio=ratio, h_max=h_max)
        u = _initial_profile(params, grid, M_sequence[0], bc_outer)
        last_per_m: list[np.ndarray] = []
        sol = None
        for m_value in M_sequence:
            bc = BoundaryConditions(inner_value=m_value, outer_value=bc_outer,
                                    inner_kind=InnerBC.EXHAUSTED,
                                    exhaustion_eps=eps)
            op = discretize(geometry, params, grid, bc)
            sol = solve_bvp(op, u, tol=tol)
            u = sol.values
            last_per_m.append(u.copy())
        for a, bb in zip(last_per_m, last_per_m[1:]):
            if not np.all(bb >= a * (1.0 - 1e-8) - 1e-12):
                raise NonConvergence("proxy solutions failed to increase with M")
        if len(last_per_m) >= 2:
            lo = max(compact[0], 2.0 * eps)
            mask = (grid.nodes >= lo) & (grid.nodes <= compact[1])
            a, bb = last_per_m[-2][mask], last_per_m[-1][mask]
            denom = np.maximum(np.abs(bb), 1e-300)
            drift = float(np.max(np.abs(bb - a) / denom))
            if drift > cauchy_tol:
                raise NonConvergence(
                    f"proxy sequence not Cauchy on the compact window "
                    f"(relative drift {drift:.3e} at eps={eps})")
        if prev is not None:
            lo = max(compact[0], 2.0 * prev.grid.delta_min)
            dsel = prev.grid.nodes[(prev.grid.nodes >= lo)
                                   & (prev.grid.nodes <= compact[1])]
            new_vals = np.interp(dsel, grid.nodes, sol.values)
            old_vals = prev.interp(dsel)
            # slack covers cross-grid interpolation error, which can exceed
            # the true eps-to-eps decrease when consecutive eps are close
            if not np.all(new_vals <= old_vals * (1.0 + 1e-3) + 1e-12):
                raise NonConvergence(
                    "exhaustion family failed to decrease on compacts as eps shrank")
        stages.append(sol)
        prev = sol
    return stages


def exhaustion_limit_profile(stages: list[GridSolution], window: tuple[float, float]):
    """Richardson-extrapolated limit of an exhaustion family on a window.

    Each stage solution carries a boundary-proxy pole at distance ~ eps,
    so stage values on a fixed window differ from the limit by a series
    in eps.  Interpolating every stage onto the finest stage's window
    nodes (in log-log coordinates) and extrapolating nodewise with the
    Lagrange weights for eps -> 0 removes the polynomial part of that
    series; with three stages the leading two orders cancel.

    Returns (delta, values) of the extrapolated limit.  The window must
    clear the largest eps by a decade or more for the expansion to hold.
    """
    from scipy.interpolate import PchipInterpolator

    if len(stages) < 2:
        raise DomainError("need at least two exhaustion stages to extrapolate")
    eps = np.array([s.bc.exhaustion_eps if s.bc.exhaustion_eps is not None
                    else s.grid.delta_min for s in stages])
    if np.any(np.diff(eps) >= 0.0):
        raise DomainError("stages must come in strictly decreasing eps order")
    fin = stages[-1]
    d = fin.grid.nodes
    sel = (d >= window[0]) & (d <= window[1])
    dw = d[sel]
    if window[0] < 2.0 * eps[0]:
        raise DomainError("window must clear the coarsest stage boundary")
    profiles = []
    for s in stages:
        f = PchipInterpolator(np.log(s.grid.nodes), np.log(np.maximum(s.values, 1e-300)))
        profiles.append(np.exp(f(np.log(dw))))
    limit = np.zeros_like(dw)
    for j, prof in enumerate(profiles):
        w = 1.0
        for k in range(len(profiles)):
            if k != j:
                w *= (0.0 - eps[k]) / (eps[j] - eps[k])
        limit += w * prof
    return dw, limit


def ko_bound_margin(solution: GridSolution, gamma_spec: BarrierSpec | None = None,
                    skip_layer_nodes: int = 0) -> float:
    """Smallest gap (envelope - value) over the solution nodes.

    Exhausted solutions are compared against the shifted envelope
    gamma d^(s/(p-1)) (d - eps)^(-2/(p-1)) built at their own exhaustion
    offset, all others against the plain envelope gamma d^((s-2)/(p-1));
    the Dirichlet proxy node itself is excluded (it is data), and
    skip_layer_nodes further nodes can be excluded when the proxy value
    exceeds the local envelope so hard that the collapse layer is thinner
    than the first cell (only possible in the nonexistence regime).
    Nonnegative return value means the bound holds at every checked node.
    Ball solutions are routed to the curvature-aware variant.
    """
    if solution.geometry.kind is GeometryKind.BALL:
        return ko_bound_margin_ball(solution, skip_layer_nodes=skip_layer_nodes)
    params = solution.params
    if gamma_spec is None:
        eps = solution.bc.exhaustion_eps if solution.bc.inner_kind is InnerBC.EXHAUSTED else 0.0
        gamma_spec = ko_supersolution(params, eps or 0.0)
    start = 1 + max(skip_layer_nodes, 0)
    d = solution.grid.nodes[start:]
    bound = eval_barrier(gamma_spec, d)
    return float(np.min(bound - solution.values[start:]))


def ko_bound_margin_ball(solution: GridSolution, collar: float = 0.5,
                         skip_layer_nodes: int = 0,
                         max_doublings: int = 20) -> float:
    """Envelope margin for ball solutions: bound gamma * min(d, collar)^b.

    Near the ball's center the distance coordinate loses smoothness and
    the plain envelope gamma d^b stops being a super-solution (its radial
    drift term blows up at r = 0), so the envelope is only enforced on
    the boundary collar d <= collar and capped by its collar value across
    the core.  The amplitude is doubled until two checks pass on samples:
    the collar residual including the radial drift of the full geometry,
    and the constant-core super-solution condition.
    """
    params = solution.params
    nd = solution.geometry.dim
    p, s, mu = params.p, params.s, params.mu
    b = params.ko_exponent
    gamma = ko_supersolution(params, 0.0).gamma
    d = np.geomspace(1e-8, collar, 400)
    drift_term = (nd - 1.0) * b * d / (1.0 - d)  # from the radial first derivative
    need = b * (b - 1.0) + mu - drift_term       # gamma^(p-1) must dominate this
    for _ in range(max_doublings + 1):
        core = gamma * collar ** b
        collar_ok = gamma ** (p - 1.0) >= float(np.max(need))
        dcore = np.linspace(collar, 1.0, 50)
        core_ok = np.all(core ** (p - 1.0) >= mu * dcore ** (s - 2.0))
        if collar_ok and core_ok:
            break
        gamma *= 2.0
    else:
        raise NonConvergence("no envelope amplitude works on the ball collar")
    start = 1 + max(skip_layer_nodes, 0)
    nodes = solution.grid.nodes[start:]
    bound = gamma * np.minimum(nodes, collar) ** b
    return float(np.min(bound - solution.values[start:]))
