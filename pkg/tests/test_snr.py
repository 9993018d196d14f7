"""SNR estimators against hand-worked curves and closed-form recoveries."""

import math

import numpy as np
import pytest

from semdenoise.acf import AcfCurve, compute_acf
from semdenoise.errors import DegenerateAcfError
from semdenoise.image import GrayImage, NoiseSpec, add_awgn, make_synthetic
from semdenoise.snr import (
    METHODS,
    LagWindow,
    actual_snr,
    estimate_snr,
    noise_variance_from_acf,
    snr_fol,
    snr_lsr,
    snr_nllsr,
    snr_nn,
    snr_nn_fol,
    snr_to_db,
)


def curve(values, mean_sq=0.5):
    v = np.asarray(values, dtype=np.float64)
    return AcfCurve(values=v, mean=math.sqrt(mean_sq), mean_sq=mean_sq,
                    max_lag=len(v) - 1)


# ---------------------------------------------------------------------------
# hand-worked peaks

def test_nn_hand_values():
    # peak = h(1) = 2.0; snr = (2.0-0.5)/(2.5-2.0) = 3.0
    est = snr_nn(curve([2.5, 2.0]))
    assert est.peak_estimate == pytest.approx(2.0)
    assert est.snr_linear == pytest.approx(3.0)
    assert est.snr_db == pytest.approx(20 * math.log10(3.0))
    assert est.method == "nn"


def test_fol_hand_values():
    # peak = 2*2.0 - 1.8 = 2.2; snr = 1.7/0.3
    est = snr_fol(curve([2.5, 2.0, 1.8]))
    assert est.peak_estimate == pytest.approx(2.2)
    assert est.snr_linear == pytest.approx(1.7 / 0.3)


def test_nn_fol_hand_values():
    # peak = (3*2.0 - 1.8)/2 = 2.1; snr = 1.6/0.4 = 4.0
    est = snr_nn_fol(curve([2.5, 2.0, 1.8]))
    assert est.peak_estimate == pytest.approx(2.1)
    assert est.snr_linear == pytest.approx(4.0)
    assert est.snr_db == pytest.approx(20 * math.log10(4.0))


def test_nn_fol_is_midpoint_of_nn_and_fol():
    c = curve([2.5, 2.1, 1.9, 1.6], mean_sq=0.3)
    mid = (snr_nn(c).peak_estimate + snr_fol(c).peak_estimate) / 2
    assert snr_nn_fol(c).peak_estimate == pytest.approx(mid, abs=1e-15)


def test_nllsr_exact_power_law():
    # h(k) = C (k+1)^g with C = 1.8, g = -0.5 is fit exactly, so the peak
    # recovers C itself
    lags = np.arange(5)
    vals = 1.8 * np.power(lags + 1.0, -0.5)
    vals[0] = 2.5  # lag 0 is never part of the fit window
    est = snr_nllsr(curve(vals))
    assert est.peak_estimate == pytest.approx(1.8, abs=1e-9)
    assert est.snr_linear == pytest.approx((1.8 - 0.5) / (2.5 - 1.8))


def test_nllsr_two_point_closed_form():
    # window of exactly two lags: the fitted line passes through both points,
    # so ln C = ln h1 - slope*ln 2 with slope = (ln h2 - ln h1)/(ln 3 - ln 2)
    h1, h2 = 1.0, 0.8
    est = snr_nllsr(curve([2.5, h1, h2]), LagWindow(1, 2))
    slope = (math.log(h2) - math.log(h1)) / (math.log(3) - math.log(2))
    expected = math.exp(math.log(h1) - slope * math.log(2))
    assert est.peak_estimate == pytest.approx(expected, abs=1e-12)


def test_lsr_hand_values():
    # lags 1..4 lie on the line 2.0 - 0.1k: alpha = 2.0;
    # eps = (2.5 - 1.9)/2 = 0.3; peak = 2.3; snr = (2.3-1.0)/(2.5-2.3) = 6.5
    est = snr_lsr(curve([2.5, 1.9, 1.8, 1.7, 1.6], mean_sq=1.0))
    assert est.peak_estimate == pytest.approx(2.3, abs=1e-12)
    assert est.snr_linear == pytest.approx(6.5)
    assert est.snr_db == pytest.approx(16.25826713, abs=1e-6)


def test_lsr_exact_line_recovery():
    # any exact line over the window is recovered to machine precision
    for intercept, slope in [(3.0, -0.25), (1.2, -0.01), (0.9, 0.0)]:
        vals = [intercept + 1.0] + [intercept + slope * k for k in range(1, 5)]
        est = snr_lsr(curve(vals, mean_sq=0.1))
        expected_peak = intercept + (vals[0] - vals[1]) / 2
        assert est.peak_estimate == pytest.approx(expected_peak, abs=1e-12)


def test_custom_lag_window():
    vals = [2.5, 1.9, 1.8, 1.7, 1.6, 1.5, 1.4]
    a = snr_lsr(curve(vals), LagWindow(1, 4))
    b = snr_lsr(curve(vals), LagWindow(2, 6))
    assert a.peak_estimate == pytest.approx(b.peak_estimate, abs=1e-12)  # same line


# ---------------------------------------------------------------------------
# degenerate and boundary behavior

def test_flat_curve_degenerates():
    with pytest.raises(DegenerateAcfError, match="flat"):
        snr_nn(curve([0.36, 0.36, 0.36], mean_sq=0.36))


def test_over_extrapolated_curve_degenerates():
    # rising curve pushes the fol peak above h(0)
    with pytest.raises(DegenerateAcfError, match="over-extrapolated"):
        snr_fol(curve([2.5, 2.4, 2.2]))


def test_nllsr_rejects_non_positive_window():
    with pytest.raises(DegenerateAcfError, match="log"):
        snr_nllsr(curve([2.5, 1.0, 0.5, -0.1, 0.2]))


def test_zero_snr_gives_minus_inf_db():
    # peak equals mean^2: numerator 0
    est = snr_nn(curve([2.5, 0.5], mean_sq=0.5))
    assert est.snr_linear == 0.0
    assert est.snr_db == -math.inf


def test_negative_snr_gives_nan_db():
    est = snr_nn(curve([2.5, 0.4], mean_sq=0.5))
    assert est.snr_linear < 0.0
    assert math.isnan(est.snr_db)


def test_window_validation():
    with pytest.raises(ValueError):
        LagWindow(0, 4)
    with pytest.raises(ValueError):
        LagWindow(3, 2)
    c = curve([2.5, 1.9, 1.8])
    with pytest.raises(ValueError, match="curve stops"):
        snr_lsr(c, LagWindow(1, 4))
    with pytest.raises(ValueError, match="at least 2"):
        snr_lsr(curve([2.5, 1.9, 1.8, 1.7, 1.6]), LagWindow(2, 2))


def test_fol_needs_two_lags():
    with pytest.raises(ValueError):
        snr_fol(curve([2.5, 2.0]))


def test_dispatch_and_unknown_method():
    c = curve([2.5, 1.9, 1.8, 1.7, 1.6])
    for m in METHODS:
        assert estimate_snr(c, m).method == m
    with pytest.raises(ValueError, match="unknown method"):
        estimate_snr(c, "slr")


def test_snr_to_db():
    assert snr_to_db(10.0) == pytest.approx(20.0)
    assert snr_to_db(1.0) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        snr_to_db(0.0)


# ---------------------------------------------------------------------------
# noise variance readout and ground truth

def test_noise_variance_from_acf_hand_value():
    c = curve([2.5, 1.9, 1.8, 1.7, 1.6])
    assert noise_variance_from_acf(c, 2.3, 100) == pytest.approx(0.002)


def test_noise_variance_floors_at_zero():
    c = curve([2.5, 1.9])
    assert noise_variance_from_acf(c, 2.6, 100) == 0.0
    with pytest.raises(ValueError):
        noise_variance_from_acf(c, 2.3, 0)


def test_actual_snr_hand_pair():
    clean = GrayImage(np.array([[0.2, 0.4], [0.6, 0.8]]))
    noisy = GrayImage(clean.pixels + np.array([[0.01, -0.01], [0.01, -0.01]]))
    est = actual_snr(clean, noisy)
    assert est.method == "actual"
    assert est.snr_linear == pytest.approx(clean.pixels.var() / 0.0001)


def test_actual_snr_identical_images_sentinel():
    img = make_synthetic("gradient", 8, 8)
    est = actual_snr(img, img)
    assert est.snr_linear == math.inf
    assert est.snr_db == math.inf


def test_actual_snr_dimension_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        actual_snr(GrayImage(np.zeros((2, 2))), GrayImage(np.zeros((2, 3))))


def test_estimators_track_real_noise_level():
    # more injected noise must read as lower estimated SNR on a real scene
    img = make_synthetic("blobs", 96, 96, seed=6)
    db = []
    for i, nv in enumerate([0.002, 0.008]):
        noisy = add_awgn(img, NoiseSpec(nv, seed=3, stream=i))
        db.append(estimate_snr(compute_acf(noisy, 16), "lsr").snr_db)
    assert db[0] > db[1]
