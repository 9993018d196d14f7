"""Autocorrelation curve: hand-computed values and contract checks."""

import numpy as np
import pytest

from semdenoise.acf import AcfCurve, acf_to_csv, compute_acf, usable_max_lag
from semdenoise.image import GrayImage


def test_single_row_hand_values():
    # row [0.1, 0.2, 0.3]:
    #   h(0) = (0.01 + 0.04 + 0.09)/3 = 0.14/3
    #   h(1) = (0.1*0.2 + 0.2*0.3)/2  = 0.04
    #   h(2) = 0.1*0.3                = 0.03
    img = GrayImage(np.array([[0.1, 0.2, 0.3]]))
    curve = compute_acf(img, 2)
    assert curve.values == pytest.approx([0.14 / 3, 0.04, 0.03], abs=1e-15)
    assert curve.mean == pytest.approx(0.2)
    assert curve.mean_sq == pytest.approx(0.04)


def test_two_rows_average():
    # second row [0.2, 0.4, 0.6] alone gives h = [0.56/3, 0.16, 0.12];
    # the curve averages the per-row values
    img = GrayImage(np.array([[0.1, 0.2, 0.3], [0.2, 0.4, 0.6]]))
    curve = compute_acf(img, 2)
    assert curve.value(0) == pytest.approx((0.14 / 3 + 0.56 / 3) / 2)
    assert curve.value(1) == pytest.approx((0.04 + 0.16) / 2)
    assert curve.value(2) == pytest.approx((0.03 + 0.12) / 2)


def test_constant_image_flat_curve():
    img = GrayImage(np.full((4, 12), 0.6))
    curve = compute_acf(img, 3)
    assert curve.values == pytest.approx([0.36] * 4, abs=1e-15)
    assert curve.mean_sq == pytest.approx(0.36)


def test_symmetry_negative_lags():
    img = GrayImage(np.array([[0.1, 0.2, 0.3, 0.15]]))
    curve = compute_acf(img, 2)
    assert curve.value(-1) == curve.value(1)
    assert curve.value(-2) == curve.value(2)


def test_white_noise_drops_to_mean_square():
    rng = np.random.default_rng(7)
    img = GrayImage(np.clip(0.5 + 0.1 * rng.standard_normal((80, 80)), 0, 1))
    curve = compute_acf(img, 4)
    # lag 0 carries the variance; every other lag sits near mean^2
    assert curve.value(0) - curve.mean_sq == pytest.approx(0.01, rel=0.1)
    for k in range(1, 5):
        assert abs(curve.value(k) - curve.mean_sq) < 0.001


def test_max_lag_cap_wide_image():
    img = GrayImage(np.zeros((2, 48)))
    compute_acf(img, 12)  # floor(48/4)
    with pytest.raises(ValueError, match="too large"):
        compute_acf(img, 13)


def test_max_lag_cap_narrow_image():
    img = GrayImage(np.zeros((2, 7)))  # width < 8: limit is width-1
    compute_acf(img, 6)
    with pytest.raises(ValueError):
        compute_acf(img, 7)


def test_max_lag_must_be_positive():
    img = GrayImage(np.zeros((2, 16)))
    with pytest.raises(ValueError):
        compute_acf(img, 0)


def test_usable_max_lag_clamps():
    wide = GrayImage(np.zeros((2, 64)))
    assert usable_max_lag(wide) == 16
    assert usable_max_lag(wide, 5) == 5
    narrow = GrayImage(np.zeros((2, 20)))
    assert usable_max_lag(narrow) == 5
    tiny = GrayImage(np.zeros((2, 3)))
    assert usable_max_lag(tiny) == 2
    assert usable_max_lag(GrayImage(np.zeros((2, 2))), 16) == 1


def test_curve_validation():
    with pytest.raises(ValueError):
        AcfCurve(values=np.array([1.0, 0.5]), mean=0.5, mean_sq=0.25, max_lag=2)
    with pytest.raises(ValueError):
        AcfCurve(values=np.array([1.0]), mean=0.5, mean_sq=0.25, max_lag=0)
    curve = AcfCurve(values=np.array([1.0, 0.5]), mean=0.5, mean_sq=0.25, max_lag=1)
    with pytest.raises(ValueError):
        curve.values[0] = 2.0


def test_csv_layout_full_precision():
    img = GrayImage(np.array([[0.1, 0.2, 0.3]]))
    curve = compute_acf(img, 2)
    text = acf_to_csv(curve)
    lines = text.strip().split("\n")
    assert lines[0] == "lag,value"
    assert len(lines) == 4
    lag, value = lines[1].split(",")
    assert lag == "0"
    assert float(value) == curve.value(0)  # repr round-trips exactly
