"""Command line interface.

Subcommands mirror the library modules one to one:

  regime     threshold classification of one (mu, p, s) triple or a batch
  barrier    evaluate a named barrier over a window, or verify the whole
             sign catalog (`barrier verify`, exit 2 on failure)
  shoot      one shooting integration with blow-up detection
  sweep      shooting over a list of slopes
  solve      finite-difference solve, optionally the full exhaustion family
  classify   fit and classify a (delta, u) CSV profile
  reproduce  run an acceptance suite and write report, CSV and figures

Outputs are deterministic: floats are printed with 17 significant digits,
JSON keys are sorted, and batch results are ordered by input index.  Exit
codes: 0 success, 1 domain/runtime errors (structured JSON on stderr),
2 verification failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import radial_solver as rs
from .asymptotics import classify_profile
from .barriers import (
    DistanceWindow,
    Role,
    barrier_derivatives,
    eval_barrier,
    ko_power,
    ko_supersolution,
    large_subharmonic,
    large_superharmonic,
    linear_residual,
    log_power,
    nonlinear_residual_of,
    pure_power,
    small_subharmonic,
    small_superharmonic,
    verify_sign_dichotomy,
)
from .errors import HardyBlowupError
from .ode_engine import (
    OdeProblem,
    Terminal,
    default_eta,
    detect_blowup_radius,
    integrate_left,
    kappa_sweep,
)
from .regime import ProblemParams, existence_verdict
from .reproduce import SUITES, run_suite

__all__ = ["main"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERIFY = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(json.dumps({"error": "UsageError", "message": message}),
              file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _fmt(x) -> str:
    return f"{x:.17g}"


def _emit_json(obj, path=None):
    text = json.dumps(obj, sort_keys=True, indent=2, default=str)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _emit_csv(header, columns, path=None):
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(_fmt(x) if isinstance(x, float) else str(x)
                              for x in row))
    text = "\n".join(lines) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _thread_count() -> int:
    env = os.environ.get("HARDY_BLOWUP_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _load_config(ns: argparse.Namespace) -> argparse.Namespace:
    """Fill None-valued options from a JSON config file, if given."""
    cfg_path = getattr(ns, "config", None)
    if not cfg_path:
        return ns
    cfg = json.loads(Path(cfg_path).read_text())
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if getattr(ns, attr, None) is None:
            setattr(ns, attr, value)
    return ns


# ---------------------------------------------------------------------------
# regime


def _cmd_regime(ns) -> int:
    if ns.batch:
        entries = json.loads(Path(ns.batch).read_text())

        def one(entry):
            if isinstance(entry, dict):
                params = ProblemParams(entry["mu"], entry["p"], entry["s"])
            else:
                params = ProblemParams(*entry)
            return existence_verdict(params).to_dict()

        with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
            results = list(pool.map(one, entries))
        _emit_json(results, ns.output)
        return EXIT_OK
    if ns.mu is None or ns.p is None or ns.s is None:
        raise HardyBlowupError("regime needs --mu, --p and --s (or --batch)")
    report = existence_verdict(ProblemParams(ns.mu, ns.p, ns.s))
    _emit_json(report.to_dict(), ns.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# barrier


_BARRIER_BUILDERS = {
    "small-super": lambda ns, params: small_superharmonic(params.mu, ns.eps),
    "large-super": lambda ns, params: large_superharmonic(params.mu, ns.eps),
    "small-sub": lambda ns, params: small_subharmonic(params.mu, ns.eps),
    "large-sub": lambda ns, params: large_subharmonic(params.mu, ns.eps),
    "pure-power": lambda ns, params: pure_power(ns.beta, mu=params.mu, gamma=ns.gamma),
    "log-power": lambda ns, params: log_power(ns.beta, gamma=ns.gamma),
    "ko-power": lambda ns, params: ko_power(params, gamma=None if ns.gamma == 1.0 else ns.gamma),
    "ko-regularized": lambda ns, params: ko_supersolution(params, ns.pole_eps),
}


def _cmd_barrier(ns) -> int:
    if ns.action == "verify":
        checks = verify_sign_dichotomy()
        bad = [c for c in checks if not c.ok]
        _emit_json({
            "checks": len(checks),
            "failures": [{"name": c.name, "mu": c.mu, "detail": c.detail}
                         for c in bad],
        }, ns.output)
        return EXIT_VERIFY if bad else EXIT_OK
    if ns.family is None:
        raise HardyBlowupError("barrier eval needs --family")
    params = ProblemParams(ns.mu, ns.p, ns.s)
    spec = _BARRIER_BUILDERS[ns.family](ns, params)
    window = DistanceWindow(ns.delta_min, ns.delta_max, ns.n)
    delta = window.samples()
    value = np.asarray(eval_barrier(spec, delta), dtype=float)
    if spec.claimed_role in (Role.SUB_SOLUTION, Role.SUPER_SOLUTION):
        residual = np.asarray(nonlinear_residual_of(spec, params, delta), dtype=float)
    else:
        residual = np.asarray(linear_residual(spec, params, delta), dtype=float)
    _emit_csv(["delta", "value", "residual"],
              [delta.tolist(), value.tolist(), residual.tolist()], ns.output)
    if ns.figures:
        from .plotting import save_profile_figure
        Path(ns.figures).mkdir(parents=True, exist_ok=True)
        save_profile_figure(Path(ns.figures) / f"barrier_{ns.family}.png",
                            delta, np.abs(value), title=f"{ns.family} (|value|)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# shoot / sweep


def _build_problem(ns) -> OdeProblem:
    params = ProblemParams(ns.mu, ns.p, ns.s)
    if ns.eta == "log-power":
        eta = log_power(0.5)
    else:
        eta = default_eta(params, ns.eta_eps)
    h_bar = 0.0
    if ns.geometry == "ball":
        h_bar = (ns.dim - 1.0) / (1.0 - ns.rho)
    return OdeProblem(params, eta, rho=ns.rho, kappa=ns.kappa, h_bar=h_bar)


def _cmd_shoot(ns) -> int:
    problem = _build_problem(ns)
    traj = integrate_left(problem, r_min=ns.r_min, v_max=ns.v_max)
    summary = {
        "terminal": traj.terminal.value,
        "R_kappa": traj.r_kappa,
        "error_estimate": None,
        "samples": int(traj.r.size),
    }
    if traj.terminal is Terminal.BLOW_UP:
        est = detect_blowup_radius(problem, r_min=ns.r_min)
        summary["R_kappa"] = est.limit
        summary["error_estimate"] = est.error_estimate
    _emit_csv(["r", "v", "v_dot"],
              [traj.r.tolist(), traj.v.tolist(), traj.v_dot.tolist()], ns.output)
    _emit_json(summary, ns.summary)
    if ns.figures:
        from .plotting import save_trajectory_figure
        Path(ns.figures).mkdir(parents=True, exist_ok=True)
        save_trajectory_figure(Path(ns.figures) / "trajectory.png",
                               [(f"kappa={ns.kappa}", traj.r, traj.v)])
    return EXIT_OK


def _cmd_sweep(ns) -> int:
    problem = _build_problem(ns)
    kappas = [float(x) for x in ns.kappas.split(",")]
    entries = kappa_sweep(problem, kappas, r_min=ns.r_min, v_max=ns.v_max)
    _emit_csv(["kappa", "R_kappa", "sup_v"],
              [[e.kappa for e in entries], [e.r_kappa for e in entries],
               [e.sup_v_tail for e in entries]], ns.output)
    if ns.figures:
        from .plotting import save_sweep_figure
        Path(ns.figures).mkdir(parents=True, exist_ok=True)
        save_sweep_figure(Path(ns.figures) / "sweep.png",
                          [e.kappa for e in entries],
                          [e.r_kappa for e in entries],
                          [e.sup_v_tail for e in entries])
    return EXIT_OK


# ---------------------------------------------------------------------------
# solve


def _cmd_solve(ns) -> int:
    params = ProblemParams(ns.mu, ns.p, ns.s)
    geometry = rs.Geometry(rs.GeometryKind(ns.geometry), ns.dim)
    report = existence_verdict(params)
    ko_gamma = ko_supersolution(params, 0.0).gamma
    if ns.exhaust:
        eps_seq = [float(x) for x in ns.eps_seq.split(",")]
        m_seq = [float(x) for x in ns.m_seq.split(",")]
        stages = rs.exhaustion_solve(params, geometry, eps_seq, m_seq,
                                     bc_outer=ns.bc_outer,
                                     cauchy_tol=ns.cauchy_tol)
        sol = stages[-1]
        summary = {
            "residual_norm": sol.residual_norm,
            "iterations": sol.iterations,
            "ko_gamma": ko_gamma,
            "bracket_used": False,
            "stages": [{"eps": st.bc.exhaustion_eps,
                        "M": st.bc.inner_value,
                        "residual_norm": st.residual_norm} for st in stages],
        }
    else:
        grid = rs.Grid.graded(ns.delta_min, 1.0)
        inner = 0.0 if ns.bc_inner == "zero" else float(ns.bc_inner)
        bc = rs.BoundaryConditions(inner_value=inner, outer_value=ns.bc_outer)
        op = rs.discretize(geometry, params, grid, bc)
        bracket_used = False
        if report.verdict.value == "Existence" and inner > 0.0:
            try:
                pair = rs.build_subsuper_pair(params, geometry, grid)
                initial = np.minimum(np.maximum(pair.sub.values, ns.bc_outer), inner)
                bracket_used = pair.ordered
            except HardyBlowupError:
                initial = np.full(grid.n, max(ns.bc_outer, 1e-2))
        else:
            initial = np.full(grid.n, max(ns.bc_outer, 1e-2))
        sol = rs.solve_bvp(op, initial)
        summary = {
            "residual_norm": sol.residual_norm,
            "iterations": sol.iterations,
            "ko_gamma": ko_gamma,
            "bracket_used": bracket_used,
        }
    _emit_csv(["delta", "u"],
              [sol.grid.nodes.tolist(), sol.values.tolist()], ns.output)
    _emit_json(summary, ns.summary)
    if ns.figures:
        from .plotting import save_profile_figure
        Path(ns.figures).mkdir(parents=True, exist_ok=True)
        positive = sol.values > 0
        save_profile_figure(Path(ns.figures) / "solution.png",
                            sol.grid.nodes[positive], sol.values[positive])
    return EXIT_OK


# ---------------------------------------------------------------------------
# classify


def _cmd_classify(ns) -> int:
    data = np.loadtxt(ns.input, delimiter=",", skiprows=1)
    if data.ndim != 2 or data.shape[1] < 2:
        raise HardyBlowupError("classify expects a CSV with (delta, u) columns")
    params = ProblemParams(ns.mu, ns.p, ns.s)
    report = existence_verdict(params)
    window = None
    if ns.window_lo is not None and ns.window_hi is not None:
        window = (ns.window_lo, ns.window_hi)
    mask = data[:, 1] > 0.0
    result = classify_profile(data[mask, 0], data[mask, 1], report, window)
    _emit_json(result.to_dict(), ns.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# reproduce


def _render_artifact(art: dict, outdir: Path, figures: bool):
    from . import plotting

    name = art["name"]
    kind = art["kind"]
    if kind == "profile":
        _emit_csv(["delta", "u"], [art["delta"], art["u"]],
                  outdir / f"{name}.csv")
        if figures:
            plotting.save_profile_figure(
                outdir / f"{name}.png", np.array(art["delta"]),
                np.array(art["u"]), reference=np.array(art["reference"]),
                ref_label=art.get("ref_label"), title=name)
    elif kind == "trajectories":
        for label, r, v in art["curves"]:
            safe = label.replace(" ", "_").replace("=", "")
            _emit_csv(["r", "v"], [r, v], outdir / f"{name}_{safe}.csv")
        if figures:
            plotting.save_trajectory_figure(
                outdir / f"{name}.png",
                [(label, np.array(r), np.array(v))
                 for label, r, v in art["curves"]], title=name)
    elif kind == "sweep":
        _emit_csv(["kappa", "R_kappa", "sup_v"],
                  [art["kappa"], art["r_kappa"], art["sup_v"]],
                  outdir / f"{name}.csv")
        if figures:
            plotting.save_sweep_figure(outdir / f"{name}.png", art["kappa"],
                                       art["r_kappa"], art["sup_v"], title=name)
    elif kind == "verdicts":
        _emit_csv(["mu", "margin", "verdict"],
                  [art["mu"], art["margin"], art["verdict"]],
                  outdir / f"{name}.csv")
        if figures:
            plotting.save_verdict_figure(outdir / f"{name}.png", art["mu"],
                                         art["margin"], art["verdict"],
                                         title=name)


def _cmd_reproduce(ns) -> int:
    names = list(SUITES) if ns.suite == "all" else [ns.suite]
    outdir = Path(ns.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    reports = []
    for name in names:
        kwargs = {"seed": ns.seed} if name == "thresholds" else {}
        rep = run_suite(name, **kwargs)
        reports.append(rep)
        suite_dir = outdir / name
        suite_dir.mkdir(parents=True, exist_ok=True)
        _emit_json(rep.to_dict(), suite_dir / "report.json")
        for art in rep.artifacts:
            _render_artifact(art, suite_dir, figures=not ns.no_figures)
    combined = {"passed": all(r.passed for r in reports),
                "suites": [r.to_dict() for r in reports]}
    _emit_json(combined)
    return EXIT_OK if combined["passed"] else EXIT_VERIFY


# ---------------------------------------------------------------------------
# parser


def _add_params(p, required=True):
    p.add_argument("--mu", type=float, required=required)
    p.add_argument("--p", type=float, required=required)
    p.add_argument("--s", type=float, required=required)


def build_parser() -> _Parser:
    parser = _Parser(prog="hardy-blowup",
                     description="boundary blow-up toolkit for the "
                                 "Hardy-potential reaction equation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("regime", parents=[], help="threshold classification")
    _add_params(p, required=False)
    p.add_argument("--batch", help="JSON array of parameter triples")
    p.add_argument("--config")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_regime)

    p = sub.add_parser("barrier", help="barrier evaluation / sign verification")
    p.add_argument("action", nargs="?", choices=["eval", "verify"], default="eval")
    p.add_argument("--family", choices=sorted(_BARRIER_BUILDERS))
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--pole-eps", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--delta-min", type=float, default=1e-6)
    p.add_argument("--delta-max", type=float, default=0.5)
    p.add_argument("-n", type=int, default=200)
    p.add_argument("--config")
    p.add_argument("--output")
    p.add_argument("--figures")
    p.set_defaults(func=_cmd_barrier)

    for name in ("shoot", "sweep"):
        p = sub.add_parser(name, help=f"shooting ODE {name}")
        _add_params(p)
        p.add_argument("--kappa", type=float, default=1.0)
        p.add_argument("--kappas", default="1,0.1,0.01,0.001")
        p.add_argument("--geometry", choices=["slab", "ball"], default="slab")
        p.add_argument("--dim", type=int, default=3)
        p.add_argument("--rho", type=float, default=0.5)
        p.add_argument("--eta", choices=["default", "log-power"], default="default")
        p.add_argument("--eta-eps", type=float, default=None)
        p.add_argument("--r-min", type=float, default=1e-6)
        p.add_argument("--v-max", type=float, default=1e8)
        p.add_argument("--config")
        p.add_argument("--output")
        p.add_argument("--summary")
        p.add_argument("--figures")
        p.set_defaults(func=_cmd_shoot if name == "shoot" else _cmd_sweep)

    p = sub.add_parser("solve", help="finite-difference boundary value solve")
    _add_params(p)
    p.add_argument("--geometry", choices=["slab", "ball"], default="slab")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--bc-inner", default="zero",
                   help="'zero' or a Dirichlet proxy value M")
    p.add_argument("--bc-outer", type=float, default=0.0)
    p.add_argument("--delta-min", type=float, default=1e-5)
    p.add_argument("--exhaust", action="store_true")
    p.add_argument("--eps-seq", default="1e-3,1e-4,1e-5")
    p.add_argument("--m-seq", default="1e2,1e4,1e6,1e8")
    p.add_argument("--cauchy-tol", type=float, default=1e-3)
    p.add_argument("--config")
    p.add_argument("--output")
    p.add_argument("--summary")
    p.add_argument("--figures")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("classify", help="fit and classify a profile CSV")
    p.add_argument("--input", required=True)
    _add_params(p)
    p.add_argument("--window-lo", type=float)
    p.add_argument("--window-hi", type=float)
    p.add_argument("--config")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("reproduce", help="run an acceptance suite")
    p.add_argument("--suite", choices=sorted(SUITES) + ["all"], required=True)
    p.add_argument("--outdir", default="reproduce_out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=_cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        ns = _load_config(ns)
        return ns.func(ns)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_OK
    except HardyBlowupError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
