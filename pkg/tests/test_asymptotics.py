import numpy as np
import pytest

from hardyblowup.asymptotics import (
    ClassVerdict,
    FitModel,
    InsufficientSamples,
    NonpositiveValues,
    classify,
    classify_profile,
    fit_power,
    fit_power_log,
    window_sensitivity,
)
from hardyblowup.regime import ProblemParams, existence_verdict

DELTA = np.geomspace(1e-7, 0.5, 120)


def _samples(values):
    return np.column_stack([DELTA, values])


def test_fit_power_exact():
    rng = np.random.default_rng(5)
    for exponent in rng.uniform(-3.0, 3.0, 12):
        fit = fit_power(_samples(DELTA ** exponent))
        assert abs(fit.exponent - exponent) < 1e-10
        assert abs(fit.amplitude - 1.0) < 1e-9
        assert fit.max_rel_residual < 1e-10


def test_fit_power_perturbed():
    values = np.sqrt(2.0) * DELTA ** -1.0 * (1.0 + DELTA)
    fit = fit_power(_samples(values), (1e-4, 1e-3))
    assert abs(fit.exponent + 1.0) < 0.01


def test_fit_power_constant():
    fit = fit_power(_samples(np.full_like(DELTA, 3.0)))
    assert abs(fit.exponent) < 1e-12
    assert fit.amplitude == pytest.approx(3.0)


def test_fit_power_errors():
    with pytest.raises(InsufficientSamples):
        fit_power(np.column_stack([DELTA[:4], DELTA[:4]]))
    bad = _samples(DELTA.copy())
    bad[10, 1] = -1.0
    with pytest.raises(NonpositiveValues):
        fit_power(bad)


def test_fit_power_log():
    values = np.sqrt(DELTA) * np.log(1.0 / DELTA)
    fit = fit_power_log(_samples(values), (1e-6, 1e-4))
    assert abs(fit.log_power - 1.0) < 0.02
    assert fit.exponent == 0.5

    flat = fit_power_log(_samples(np.sqrt(DELTA)), (1e-6, 1e-4))
    assert abs(flat.log_power) < 1e-10


def test_classify_branches():
    report = existence_verdict(ProblemParams(0.0, 3.0, 0.0))
    fit = fit_power(_samples(1.4 * DELTA ** -1.0), (1e-6, 1e-3))
    assert classify(fit, report).verdict is ClassVerdict.XXL

    fit_s = fit_power(_samples(DELTA ** 1.0), (1e-6, 1e-3))
    assert classify(fit_s, report).verdict is ClassVerdict.S

    # strictly between beta_minus and the envelope exponent
    fit_mid = fit_power(_samples(DELTA ** -0.5), (1e-6, 1e-3))
    assert classify(fit_mid, report).verdict is ClassVerdict.INDETERMINATE

    rep_ml = existence_verdict(ProblemParams(0.1, 2.0, 1.0))
    bm = rep_ml.roots.beta_minus
    fit_ml = fit_power(_samples(DELTA ** bm), (1e-6, 1e-3))
    assert classify(fit_ml, rep_ml).verdict is ClassVerdict.ML


def test_classify_degenerate_root_log_shapes():
    report = existence_verdict(ProblemParams(0.25, 2.0, 1.0))
    ml = classify_profile(DELTA, np.sqrt(DELTA) * np.log(1.0 / DELTA), report,
                          (1e-7, 1e-4))
    assert ml.verdict is ClassVerdict.ML
    s = classify_profile(DELTA, np.sqrt(DELTA), report, (1e-7, 1e-4))
    assert s.verdict is ClassVerdict.S
    xxl = classify_profile(DELTA, 2.25 / DELTA, report, (1e-7, 1e-4))
    assert xxl.verdict is ClassVerdict.XXL


def test_classify_scale_invariance():
    report = existence_verdict(ProblemParams(0.0, 3.0, 0.0))
    rng = np.random.default_rng(11)
    base = 1.4 * DELTA ** -1.0
    v0 = classify(fit_power(_samples(base), (1e-6, 1e-3)), report).verdict
    for _ in range(10):
        c = rng.uniform(1e-6, 1e6)
        v = classify(fit_power(_samples(c * base), (1e-6, 1e-3)), report).verdict
        assert v == v0


def test_noisy_fit_is_indeterminate():
    rng = np.random.default_rng(2)
    noisy = DELTA ** -1.0 * np.exp(rng.uniform(-0.3, 0.3, DELTA.size))
    report = existence_verdict(ProblemParams(0.0, 3.0, 0.0))
    fit = fit_power(_samples(noisy), (1e-6, 1e-3))
    assert classify(fit, report).verdict is ClassVerdict.INDETERMINATE


def test_window_sensitivity():
    clean = _samples(DELTA ** -1.0)
    assert window_sensitivity(clean, (1e-4, 1e-2)) < 1e-10
    bent = _samples(DELTA ** -1.0 * (1.0 + 50.0 * DELTA))
    assert window_sensitivity(bent, (1e-3, 1e-1)) > 0.02
