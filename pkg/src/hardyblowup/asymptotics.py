"""Boundary-behavior fitting and solution classification.

Profiles computed by the solvers behave near d = 0 like C d^m, or like
C d^(1/2) log(1/d)^q when the characteristic roots collide (mu = 1/4).
This module fits those models by least squares in log coordinates and
classifies the result against the regime thresholds:

  S    boundary exponent at (or above) beta_plus: the profile is dominated
       by every positive super-harmonic;
  ML   exponent at beta_minus (or the d^(1/2) log(1/d) shape at mu = 1/4):
       large, but still dominated by one super-harmonic;
  XXL  exponent at the envelope rate (s-2)/(p-1), the fastest possible
       growth of any sub-solution;
  Indeterminate everything else, including fits whose relative residual
       exceeds 5 percent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError
from .regime import RegimeReport

__all__ = [
    "FitModel",
    "AsymptoticFit",
    "ClassVerdict",
    "SolutionClass",
    "InsufficientSamples",
    "NonpositiveValues",
    "fit_power",
    "fit_power_log",
    "classify",
    "classify_profile",
    "window_sensitivity",
    "EXPONENT_TOL",
]

EXPONENT_TOL = 0.05       # matches achievable mesh accuracy at delta_min = 1e-5
LOG_POWER_TOL = 0.15
RESIDUAL_CUTOFF = 0.05    # fits worse than this are Indeterminate


class InsufficientSamples(DomainError):
    pass


class NonpositiveValues(DomainError):
    pass


class FitModel(Enum):
    PURE_POWER = "PurePower"
    POWER_TIMES_LOG_POWER = "PowerTimesLogPower"


@dataclass(frozen=True)
class AsymptoticFit:
    amplitude: float
    exponent: float
    log_power: float
    fit_window: tuple[float, float]
    max_rel_residual: float
    model: FitModel
    n_samples: int = 0

    def predict(self, delta):
        delta = np.asarray(delta, dtype=float)
        out = self.amplitude * delta ** self.exponent
        if self.model is FitModel.POWER_TIMES_LOG_POWER:
            out = out * np.log(1.0 / delta) ** self.log_power
        return out

    def to_dict(self) -> dict:
        return {
            "amplitude": self.amplitude,
            "exponent": self.exponent,
            "log_power": self.log_power,
            "fit_window": list(self.fit_window),
            "max_rel_residual": self.max_rel_residual,
            "model": self.model.value,
            "n_samples": self.n_samples,
        }


class ClassVerdict(Enum):
    S = "S"
    ML = "ML"
    XXL = "XXL"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class SolutionClass:
    verdict: ClassVerdict
    evidence: AsymptoticFit
    beta_minus: float | None
    beta_plus: float | None
    ko_exponent: float
    tol: float = EXPONENT_TOL

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "evidence": self.evidence.to_dict(),
            "beta_minus": self.beta_minus,
            "beta_plus": self.beta_plus,
            "ko_exponent": self.ko_exponent,
            "tol": self.tol,
        }


def _window_arrays(samples, window):
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 2:
        raise DomainError("samples must be a sequence of (delta, value) pairs")
    delta, value = samples[:, 0], samples[:, 1]
    if window is not None:
        lo, hi = window
        mask = (delta >= lo) & (delta <= hi)
        delta, value = delta[mask], value[mask]
    else:
        window = (float(np.min(delta)), float(np.max(delta)))
    if delta.size < 8:
        raise InsufficientSamples(
            f"need at least 8 samples in the window, got {delta.size}")
    if np.any(value <= 0.0):
        raise NonpositiveValues("all values in the window must be positive")
    if np.any(delta <= 0.0):
        raise DomainError("all delta in the window must be positive")
    return delta, value, (float(window[0]), float(window[1]))


def fit_power(samples, window=None) -> AsymptoticFit:
    """Least-squares power law: regress log(value) on log(delta).

    amplitude = exp(intercept), exponent = slope; the recorded residual is
    the worst relative deviation of the data from the fitted curve.
    """
    delta, value, window = _window_arrays(samples, window)
    slope, intercept = np.polyfit(np.log(delta), np.log(value), 1)
    amplitude = float(np.exp(intercept))
    fitted = amplitude * delta ** slope
    max_rel = float(np.max(np.abs(value - fitted) / fitted))
    return AsymptoticFit(amplitude, float(slope), 0.0, window, max_rel,
                         FitModel.PURE_POWER, delta.size)


def fit_power_log(samples, window=None) -> AsymptoticFit:
    """Fit value = C d^(1/2) log(1/d)^q, the collided-roots boundary model.

    The d^(1/2) factor is divided out and log(value) - log(d)/2 is
    regressed on log(log(1/d)), giving q (log_power) and C.
    """
    delta, value, window = _window_arrays(samples, window)
    if window[1] >= 1.0:
        raise DomainError("log model requires the window to sit inside (0, 1)")
    big_l = np.log(1.0 / delta)
    y = np.log(value) - 0.5 * np.log(delta)
    slope, intercept = np.polyfit(np.log(big_l), y, 1)
    amplitude = float(np.exp(intercept))
    fitted = amplitude * np.sqrt(delta) * big_l ** slope
    max_rel = float(np.max(np.abs(value - fitted) / fitted))
    return AsymptoticFit(amplitude, 0.5, float(slope), window, max_rel,
                         FitModel.POWER_TIMES_LOG_POWER, delta.size)


def classify(fit: AsymptoticFit, report: RegimeReport,
             tol: float = EXPONENT_TOL) -> SolutionClass:
    """Assign S / ML / XXL from a fitted boundary behavior.

    Scale invariant: only the exponent (and log power) enter, never the
    amplitude.  A fit with max_rel_residual >= 5 percent, or a report
    without characteristic roots (mu > 1/4), is Indeterminate.
    """
    roots = report.roots
    ko = report.ko_exponent
    if roots is None or fit.max_rel_residual >= RESIDUAL_CUTOFF:
        return SolutionClass(ClassVerdict.INDETERMINATE, fit,
                             None if roots is None else roots.beta_minus,
                             None if roots is None else roots.beta_plus,
                             ko, tol)
    verdict = ClassVerdict.INDETERMINATE
    if fit.model is FitModel.POWER_TIMES_LOG_POWER and roots.degenerate:
        # at mu = 1/4 the ML and S shapes share the d^(1/2) factor and are
        # told apart by the log power (1 for ML, 0 for S)
        if abs(fit.exponent - 0.5) <= tol:
            if abs(fit.log_power - 1.0) <= LOG_POWER_TOL:
                verdict = ClassVerdict.ML
            elif abs(fit.log_power) <= LOG_POWER_TOL:
                verdict = ClassVerdict.S
    else:
        if fit.exponent >= roots.beta_plus - tol and fit.log_power == 0.0:
            verdict = ClassVerdict.S
        elif abs(fit.exponent - ko) <= tol:
            verdict = ClassVerdict.XXL
        elif not roots.degenerate and abs(fit.exponent - roots.beta_minus) <= tol:
            verdict = ClassVerdict.ML
    # exponent-based XXL detection also applies to the degenerate case
    if verdict is ClassVerdict.INDETERMINATE and fit.model is FitModel.PURE_POWER \
            and abs(fit.exponent - ko) <= tol and ko < roots.beta_minus - tol:
        verdict = ClassVerdict.XXL
    return SolutionClass(verdict, fit, roots.beta_minus, roots.beta_plus, ko, tol)


def classify_profile(delta, values, report: RegimeReport,
                     window=None, tol: float = EXPONENT_TOL) -> SolutionClass:
    """Fit and classify a sampled profile in one step.

    Uses the plain power model; at mu = 1/4 the log model is fitted as
    well and kept when it explains the data better.
    """
    samples = np.column_stack([np.asarray(delta, float), np.asarray(values, float)])
    if window is None:
        dmin = float(np.min(samples[:, 0]))
        window = (10.0 * dmin, min(1000.0 * dmin, 0.5))
    fit = fit_power(samples, window)
    if report.roots is not None and report.roots.degenerate and window[1] < 1.0:
        log_fit = fit_power_log(samples, window)
        if log_fit.max_rel_residual < fit.max_rel_residual:
            fit = log_fit
    return classify(fit, report, tol)


def window_sensitivity(samples, window) -> float:
    """Exponent change when the fit window shifts down by one decade.

    Values above ~0.02 flag an under-resolved or non-power profile."""
    base = fit_power(samples, window)
    shifted = fit_power(samples, (window[0] / 10.0, window[1] / 10.0))
    return abs(base.exponent - shifted.exponent)
