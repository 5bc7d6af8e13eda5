"""Numerical toolkit for boundary blow-up in -u'' - (mu/d^2) u + u^p/d^s = 0.

The package splits into the exact threshold arithmetic (`regime`), the
closed-form barrier catalog (`barriers`), the blow-up-detecting shooting
integrator (`ode_engine`), the graded-mesh finite-difference solver with
exhaustion (`radial_solver`), boundary-behavior fitting (`asymptotics`),
and a CLI (`cli`) with a reproduction driver (`reproduce`).
"""

from .asymptotics import (
    AsymptoticFit,
    ClassVerdict,
    SolutionClass,
    classify,
    classify_profile,
    fit_power,
    fit_power_log,
)
from .barriers import (
    BarrierFamily,
    BarrierSpec,
    DistanceWindow,
    Role,
    eval_barrier,
    ko_supersolution,
    linear_residual,
    nonlinear_residual,
    validity_radius,
)
from .ode_engine import (
    OdeProblem,
    Terminal,
    Trajectory,
    default_eta,
    detect_blowup_radius,
    integrate_left,
    kappa_sweep,
    solve_bvp_eps,
)
from .radial_solver import (
    BoundaryConditions,
    Geometry,
    GeometryKind,
    Grid,
    GridSolution,
    build_subsuper_pair,
    discrete_comparison_check,
    discretize,
    exhaustion_limit_profile,
    exhaustion_solve,
    ko_bound_margin,
    solve_bvp,
)
from .regime import (
    CharacteristicRoots,
    ProblemParams,
    RegimeReport,
    Verdict,
    characteristic_roots,
    critical_mu,
    critical_p,
    existence_verdict,
)

__version__ = "0.1.0"
