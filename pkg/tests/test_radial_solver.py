import math

import numpy as np
import pytest

from hardyblowup.errors import DomainError, PreconditionError, RegimeError
from hardyblowup.radial_solver import (
    BoundaryConditions,
    Geometry,
    GeometryKind,
    Grid,
    InnerBC,
    build_subsuper_pair,
    discrete_comparison_check,
    discretize,
    exhaustion_limit_profile,
    exhaustion_solve,
    ko_bound_margin,
    solve_bvp,
    thomas_solve,
)
from hardyblowup.regime import ProblemParams, characteristic_roots

SLAB = Geometry(GeometryKind.SLAB)
BALL3 = Geometry(GeometryKind.BALL, 3)
P0 = ProblemParams(0.0, 3.0, 0.0)


def test_grid_construction():
    g = Grid.graded(1e-5, 1.0)
    h = np.diff(g.nodes)
    q = h[1:] / h[:-1]
    assert g.nodes[0] == 1e-5 and g.nodes[-1] == 1.0
    assert q.min() > 1.0 - 1e-8 and q.max() < 1.2
    fine = g.refine()
    assert fine.n > 1.5 * g.n
    with pytest.raises(DomainError):
        Grid(np.array([0.1, 0.2, 0.15, 0.3]))


def test_thomas_solver():
    rng = np.random.default_rng(3)
    n = 40
    sub = rng.uniform(-1, 0, n)
    sup = rng.uniform(-1, 0, n)
    diag = 4.0 + rng.uniform(0, 1, n)
    rhs = rng.uniform(-1, 1, n)
    x = thomas_solve(sub, diag, sup, rhs)
    full = np.diag(diag) + np.diag(sub[1:], -1) + np.diag(sup[:-1], 1)
    assert np.allclose(full @ x, rhs, atol=1e-12)
    # bit-deterministic on identical input
    assert np.array_equal(x, thomas_solve(sub, diag, sup, rhs))


def test_discretize_trivial_checks():
    grid = Grid(np.linspace(0.1, 1.0, 91))
    op = discretize(SLAB, P0, grid, BoundaryConditions(0.0, 0.0))
    lap = op.laplacian(grid.nodes ** 2)
    assert np.allclose(lap, 2.0, atol=1e-8)

    opb = discretize(BALL3, P0, grid, BoundaryConditions(0.0, 0.0))
    r = 1.0 - grid.nodes
    lapb = opb.laplacian(1.0 - r ** 2)
    assert np.allclose(-lapb, 6.0, atol=1e-8)  # -lap(1 - r^2) = 2N

    params = ProblemParams(0.3, 2.0, 1.0)
    op2 = discretize(SLAB, params, grid, BoundaryConditions(0.0, 0.0))
    assert np.max(np.abs(op2.hardy - 0.3 / grid.nodes ** 2)) < 1e-14


def test_zero_bc_trivial_solution():
    # no nontrivial small solution exists for mu <= 1/4 in the slab
    grid = Grid.graded(1e-3, 1.0)
    op = discretize(SLAB, P0, grid, BoundaryConditions(0.0, 0.0))
    sol = solve_bvp(op, np.full(grid.n, 0.1))
    assert np.max(sol.values) < 1e-8


def test_slab_proxy_matches_exact_profile():
    grid = Grid.graded(1e-5, 1.0, ratio=1.04, h_max=0.004)
    op = discretize(SLAB, P0, grid, BoundaryConditions(1e6, 0.0))
    initial = np.minimum(math.sqrt(2.0) / grid.nodes, 1e6)
    sol = solve_bvp(op, initial)
    sel = (grid.nodes >= 1e-3) & (grid.nodes <= 1e-2)
    dev = np.abs(sol.values[sel] * grid.nodes[sel] / math.sqrt(2.0) - 1.0)
    assert np.max(dev) < 0.02


def test_ball_supercritical_mu_positive_solution():
    params = ProblemParams(1.0, 2.0, 0.0)
    grid = Grid.graded(1e-4, 1.0, ratio=1.03, h_max=0.0025)
    d = grid.nodes
    initial = 7.0 * d ** -2.0 * np.clip((d - 1e-4) / 3e-4, 0.0, 1.0)
    sol = solve_bvp(discretize(BALL3, params, grid, BoundaryConditions(0.0, 0.0)),
                    initial)
    assert float(sol.interp(0.5)) > 1.0  # nontrivial
    assert ko_bound_margin(sol) >= 0.0   # curvature-aware envelope holds


def test_build_subsuper_pair_variants():
    grid = Grid.graded(1e-4, 1.0)
    pair = build_subsuper_pair(P0, SLAB, grid, target="xxl")
    assert pair.ordered
    assert discrete_comparison_check(pair.sub, pair.sup)

    pair_log = build_subsuper_pair(ProblemParams(0.25, 2.0, 1.0), SLAB, grid,
                                   target="ml")
    assert pair_log.ordered and discrete_comparison_check(pair_log.sub, pair_log.sup)

    pair_ml = build_subsuper_pair(ProblemParams(0.1, 2.0, 1.0), SLAB, grid,
                                  target="ml")
    assert pair_ml.ordered and discrete_comparison_check(pair_ml.sub, pair_ml.sup)

    with pytest.raises(RegimeError):
        build_subsuper_pair(ProblemParams(0.0, 3.0, 2.0), SLAB, grid)


def test_comparison_check_preconditions():
    grid = Grid.graded(1e-4, 1.0)
    pair = build_subsuper_pair(P0, SLAB, grid)
    # swapping roles breaks the residual-sign precondition
    with pytest.raises(PreconditionError):
        discrete_comparison_check(pair.sup, pair.sub)


def test_comparison_randomized_scalings():
    rng = np.random.default_rng(20240801)
    grid = Grid.graded(1e-4, 1.0)
    for _ in range(30):
        mu = rng.uniform(-2.0, 0.24)
        p = rng.uniform(1.3, 4.0)
        threshold = characteristic_roots(mu).beta_minus * (p - 1.0) + 2.0
        s = threshold - rng.uniform(0.3, 2.0)
        pair = build_subsuper_pair(ProblemParams(mu, p, s), SLAB, grid)
        pair.sub.values = pair.sub.values * rng.uniform(0.2, 1.0)
        pair.sup.values = pair.sup.values * rng.uniform(1.0, 5.0)
        assert discrete_comparison_check(pair.sub, pair.sup)


def test_exhaustion_family_and_limit():
    stages = exhaustion_solve(P0, SLAB, [1e-3, 1e-4], [1e2, 1e4, 1e6, 1e8],
                              ratio=1.04, h_max=0.004)
    assert len(stages) == 2
    assert stages[-1].bc.inner_kind is InnerBC.EXHAUSTED
    assert stages[-1].bc.exhaustion_eps == 1e-4
    # limit profile on a window clear of the coarse stage
    dw, limit = exhaustion_limit_profile(stages, (1e-2, 1e-1))
    dev = np.abs(limit * dw / math.sqrt(2.0) - 1.0)
    assert np.max(dev) < 0.01
    with pytest.raises(DomainError):
        exhaustion_limit_profile(stages, (1e-4, 1e-2))  # inside coarse eps


def test_exhaustion_argument_validation():
    with pytest.raises(DomainError):
        exhaustion_solve(P0, SLAB, [1e-4, 1e-3], [1e2])
    with pytest.raises(DomainError):
        exhaustion_solve(P0, SLAB, [1e-3], [1e4, 1e2])


def test_mesh_convergence_on_compacts():
    grid = Grid.graded(1e-5, 1.0, ratio=1.04, h_max=0.004)
    op = discretize(SLAB, P0, grid, BoundaryConditions(1e6, 0.0))
    sol = solve_bvp(op, np.minimum(math.sqrt(2.0) / grid.nodes, 1e6))
    fine = Grid.graded(5e-6, 1.0, ratio=math.sqrt(1.04), h_max=0.002)
    opf = discretize(SLAB, P0, fine, BoundaryConditions(1e6, 0.0))
    solf = solve_bvp(opf, np.minimum(math.sqrt(2.0) / fine.nodes, 1e6))
    probe = np.geomspace(0.1, 0.9, 40)
    rel = np.abs(sol.interp(probe) - solf.interp(probe)) / solf.interp(probe)
    assert np.max(rel) < 1e-4
