import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bayesreg.errors import DimensionTooSmall, ValidationError, ZeroVector
from bayesreg.risk_lab import (
    SpikeSignal,
    james_stein,
    js_bounds,
    js_vs_threshold_experiment,
    mc_risk,
    risk_table_csv,
    threshold_estimator,
    universal_threshold,
)
from bayesreg.samplers import RngStream


def test_spike_signal_layout():
    s = SpikeSignal(10, 3, 5.0)
    np.testing.assert_allclose(s.theta, [math.sqrt(0.5)] * 3 + [0.0] * 7)
    assert s.norm2 == pytest.approx(float(s.theta @ s.theta), rel=1e-14)
    assert SpikeSignal.default(10, 4).total_energy == 4.0
    np.testing.assert_allclose(SpikeSignal.with_magnitude(100, 5, 3.0).theta[:5], 3.0)
    with pytest.raises(ValidationError):
        SpikeSignal(5, 6, 1.0)
    with pytest.raises(ValidationError):
        SpikeSignal(5, 2, -1.0)


def test_james_stein_examples():
    np.testing.assert_allclose(james_stein([2.0, 0, 0, 0, 0]), [0.5, 0, 0, 0, 0], atol=1e-15)
    # ||y||^2 = p - 2 with p = 4
    y = np.array([1.0, 1.0, 1.0, 0.0]) * math.sqrt(2 / 3)
    np.testing.assert_array_equal(james_stein(y), np.zeros(4))
    big = np.full(5, 1e8)
    np.testing.assert_allclose(james_stein(big), big, rtol=1e-15)


def test_james_stein_errors_and_positive_part():
    with pytest.raises(DimensionTooSmall):
        james_stein([1.0, 2.0])
    with pytest.raises(ZeroVector):
        james_stein(np.zeros(4))
    y = np.array([0.1, -0.2, 0.1, 0.05])
    assert np.all(np.sign(james_stein(y)) == -np.sign(y))
    np.testing.assert_array_equal(james_stein(y, positive_part=True), 0.0)


@given(arrays(np.float64, 6, elements=st.floats(-10, 10)), st.floats(0.1, 10))
def test_james_stein_ray_formula(y, c):
    n2 = float(y @ y)
    if n2 < 1e-6:
        return
    expected = c * (1 - 4 / (c * c * n2)) * y
    np.testing.assert_allclose(james_stein(c * y), expected, rtol=1e-9, atol=1e-9)


def test_threshold_examples():
    np.testing.assert_array_equal(threshold_estimator([1.0, 3.0], 2.0, "hard"), [0.0, 3.0])
    np.testing.assert_array_equal(threshold_estimator([-3.0], 1.0, "soft"), [-2.0])
    y = np.array([-1.5, 0.2, 4.0])
    np.testing.assert_array_equal(threshold_estimator(y, 0.0, "hard"), y)
    np.testing.assert_array_equal(threshold_estimator(y, 0.0, "soft"), y)
    with pytest.raises(ValidationError):
        threshold_estimator(y, -1.0)
    with pytest.raises(ValidationError):
        threshold_estimator(y, 1.0, "firm")
    assert universal_threshold(100) == pytest.approx(math.sqrt(2 * math.log(100)))


@given(arrays(np.float64, 8, elements=st.floats(-100, 100)), st.floats(0, 50))
def test_soft_threshold_contracts(y, t):
    out = threshold_estimator(y, t, "soft")
    assert np.all(np.abs(out) <= np.abs(y))


def test_js_bounds_examples():
    assert js_bounds(SpikeSignal(10, 0, 0.0))[:2] == (0.0, 2.0)
    b = js_bounds(SpikeSignal(20, 20, 20.0))
    assert b.lower == pytest.approx(10.0) and b.upper == pytest.approx(12.0) and b.consistent
    assert js_bounds(SpikeSignal(20, 20, 1e9)).lower == pytest.approx(20.0, rel=1e-6)
    assert not js_bounds(SpikeSignal.with_magnitude(100, 5, 6.0)).consistent


def test_mle_risk_is_p():
    for r in (0, 3, 10):
        rep = mc_risk(RngStream(1, r), "mle", SpikeSignal(10, r, 7.0), 20_000)
        assert abs(rep.mc_risk - 10) < 3 * rep.mc_se
        assert math.isnan(rep.lower_bound)


def test_js_risk_at_origin():
    rep = mc_risk(RngStream(2), "james-stein", SpikeSignal(10, 0, 0.0), 100_000)
    assert abs(rep.mc_risk - 2) < 3 * rep.mc_se
    assert (rep.lower_bound, rep.upper_bound) == (0.0, 2.0)


def test_mc_se_scaling():
    s = SpikeSignal(10, 2, 4.0)
    a = mc_risk(RngStream(3), "james-stein", s, 20_000)
    b = mc_risk(RngStream(4), "james-stein", s, 40_000)
    assert b.mc_se / a.mc_se == pytest.approx(1 / math.sqrt(2), rel=0.2)


def test_mc_risk_independent_of_workers():
    s = SpikeSignal(12, 3, 3.0)
    one = mc_risk(RngStream(5), "soft-threshold", s, 35_000, workers=1)
    four = mc_risk(RngStream(5), "soft-threshold", s, 35_000, workers=4)
    assert one == four


def test_mc_risk_validation():
    s = SpikeSignal(5, 1, 1.0)
    with pytest.raises(ValidationError):
        mc_risk(RngStream(0), "mle", s, 999)
    with pytest.raises(ValidationError):
        mc_risk(RngStream(0), "oracle", s, 1000)


def test_custom_estimator_callable():
    def zero(y):
        return np.zeros_like(y)

    s = SpikeSignal(5, 2, 5.0)
    rep = mc_risk(RngStream(0), zero, s, 1000)
    assert rep.estimator == "zero"
    assert rep.mc_risk == pytest.approx(s.norm2, rel=1e-12)


def test_sparse_spikes_favor_thresholding():
    p = 100
    d = SpikeSignal.with_magnitude(p, 5, 2 * universal_threshold(p)).total_energy
    reps = {r.estimator: r for r in js_vs_threshold_experiment(RngStream(6), p, 5, d, 50_000)}
    js, hard = reps["james-stein"], reps["hard-threshold"]
    assert hard.mc_risk + 3 * math.hypot(hard.mc_se, js.mc_se) < js.mc_risk


def test_dense_spikes_favor_james_stein():
    reps = js_vs_threshold_experiment(RngStream(7), 50, 50, None, 20_000)
    assert reps[0].estimator == "james-stein"
    risks = [r.mc_risk for r in reps]
    assert risks == sorted(risks)


def test_risk_table_csv():
    reps = js_vs_threshold_experiment(RngStream(8), 10, 2, None, 1000)
    lines = risk_table_csv(reps, ("bayesreg test",)).splitlines()
    assert lines[:2] == ["# bayesreg test", "estimator,risk,se,lower,upper"]
    assert len(lines) == 6
    js_row = next(line for line in lines if line.startswith("james-stein"))
    assert js_row.split(",")[3] != ""
    mle_row = next(line for line in lines if line.startswith("mle"))
    assert mle_row.endswith(",,")
