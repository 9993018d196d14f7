"""Single-image SNR estimators built on the autocorrelation curve.

All five estimators share one idea: white noise inflates the ACF only at lag
zero, so the noise-free peak h_nf(0) can be recovered by extrapolating the
curve from lags >= 1 back to 0. With an estimated peak p, the signal-to-noise
ratio follows as

    snr = (p - mu^2) / (h(0) - p)

where mu is the image mean. The estimators differ only in how they
extrapolate:

    nn       p = h(1)                        nearest neighbour
    fol      p = 2 h(1) - h(2)               first-order line through lags 1, 2
    nn_fol   p = (3 h(1) - h(2)) / 2         midpoint of the two above
    nllsr    p = C from  ln h(k) = ln C + g ln(k+1)   log-log least squares
    lsr      p = alpha + (h(0) - h(1)) / 2   linear least squares plus offset

Decibel values use the 20 log10 convention throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .acf import AcfCurve
from .errors import DegenerateAcfError
from .image import GrayImage

METHODS = ("nn", "fol", "nn_fol", "nllsr", "lsr")


@dataclass(frozen=True)
class SnrEstimate:
    """Estimated noise-free ACF peak plus the SNR it implies."""

    peak_estimate: float
    snr_linear: float
    snr_db: float
    method: str


@dataclass(frozen=True)
class LagWindow:
    """Inclusive lag range used by the regression-based estimators."""

    first_lag: int = 1
    last_lag: int = 4

    def __post_init__(self):
        if self.first_lag < 1:
            raise ValueError("first_lag must be >= 1")
        if self.last_lag < self.first_lag:
            raise ValueError("last_lag must be >= first_lag")

    def lags(self) -> np.ndarray:
        return np.arange(self.first_lag, self.last_lag + 1)


DEFAULT_WINDOW = LagWindow()


def snr_to_db(snr_linear: float) -> float:
    """20*log10 of a positive linear ratio."""
    if snr_linear <= 0.0:
        raise ValueError(f"snr must be positive for dB conversion, got {snr_linear}")
    return 20.0 * math.log10(snr_linear)


def _ratio(peak: float, acf: AcfCurve, method: str) -> SnrEstimate:
    h0 = acf.value(0)
    denom = h0 - peak
    if denom <= 0.0:
        kind = "flat" if denom == 0.0 else "over-extrapolated"
        raise DegenerateAcfError(
            f"{method}: peak estimate {peak:.6g} does not fall below h(0) "
            f"{h0:.6g} ({kind} curve)"
        )
    snr = (peak - acf.mean_sq) / denom
    if snr > 0.0:
        db = snr_to_db(snr)
    elif snr == 0.0:
        db = -math.inf
    else:
        db = math.nan
    return SnrEstimate(peak_estimate=peak, snr_linear=snr, snr_db=db, method=method)


def snr_nn(acf: AcfCurve) -> SnrEstimate:
    """Nearest-neighbour estimator: the peak is taken as h(1) directly."""
    return _ratio(acf.value(1), acf, "nn")


def snr_fol(acf: AcfCurve) -> SnrEstimate:
    """First-order linear extrapolation through h(1), h(2) back to lag 0."""
    if acf.max_lag < 2:
        raise ValueError("fol needs at least 2 lags")
    return _ratio(2.0 * acf.value(1) - acf.value(2), acf, "fol")


def snr_nn_fol(acf: AcfCurve) -> SnrEstimate:
    """Average of the nearest-neighbour and first-order peak estimates."""
    if acf.max_lag < 2:
        raise ValueError("nn_fol needs at least 2 lags")
    return _ratio((3.0 * acf.value(1) - acf.value(2)) / 2.0, acf, "nn_fol")


def _check_window(acf: AcfCurve, window: LagWindow, method: str):
    if window.last_lag > acf.max_lag:
        raise ValueError(
            f"{method}: window ends at lag {window.last_lag} but curve stops "
            f"at {acf.max_lag}"
        )
    if window.last_lag == window.first_lag:
        raise ValueError(f"{method}: window must span at least 2 lags")


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Ordinary least squares fit y = intercept + slope*x."""
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    slope = float(np.dot(dx, y - ym) / np.dot(dx, dx))
    return ym - slope * xm, slope


def snr_nllsr(acf: AcfCurve, window: LagWindow = DEFAULT_WINDOW) -> SnrEstimate:
    """Power-law extrapolation: fit ln h(k) = ln C + g*ln(k+1), peak = C.

    The regressor is shifted by one so the model is finite at lag 0, where it
    evaluates to the coefficient C itself.
    """
    _check_window(acf, window, "nllsr")
    lags = window.lags()
    h = acf.values[lags]
    if np.any(h <= 0.0):
        raise DegenerateAcfError(
            "nllsr: non-positive ACF value in window, cannot log-transform"
        )
    intercept, _ = _ols(np.log(lags + 1.0), np.log(h))
    return _ratio(float(np.exp(intercept)), acf, "nllsr")


def snr_lsr(acf: AcfCurve, window: LagWindow = DEFAULT_WINDOW) -> SnrEstimate:
    """Linear least squares on the lag window, plus the half-drop offset.

    The fitted intercept alpha estimates the curve height with the lag-zero
    noise spike excluded; half of the observed drop h(0)-h(1) is added back
    as the offset term, giving peak = alpha + (h(0)-h(1))/2.
    """
    _check_window(acf, window, "lsr")
    lags = window.lags()
    intercept, _ = _ols(lags.astype(np.float64), acf.values[lags])
    eps = (acf.value(0) - acf.value(1)) / 2.0
    return _ratio(intercept + eps, acf, "lsr")


def estimate_snr(acf: AcfCurve, method: str, window: LagWindow = DEFAULT_WINDOW) -> SnrEstimate:
    """Dispatch by method name ('nn', 'fol', 'nn_fol', 'nllsr', 'lsr')."""
    if method == "nn":
        return snr_nn(acf)
    if method == "fol":
        return snr_fol(acf)
    if method == "nn_fol":
        return snr_nn_fol(acf)
    if method == "nllsr":
        return snr_nllsr(acf, window)
    if method == "lsr":
        return snr_lsr(acf, window)
    raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")


def noise_variance_from_acf(acf: AcfCurve, peak_estimate: float, image_size: int) -> float:
    """Noise variance implied by the lag-zero spike: (h(0) - peak)/size, floored at 0."""
    if image_size <= 0:
        raise ValueError("image_size must be positive")
    return max(0.0, (acf.value(0) - peak_estimate) / float(image_size))


def actual_snr(clean: GrayImage, noisy: GrayImage) -> SnrEstimate:
    """Ground-truth SNR for a synthetic pair: var(clean) / var(noisy - clean).

    Population variances; a zero-variance difference (no noise) yields the
    infinite-SNR sentinel rather than an error.
    """
    if clean.pixels.shape != noisy.pixels.shape:
        raise ValueError(
            f"dimension mismatch: clean {clean.pixels.shape} vs noisy "
            f"{noisy.pixels.shape}"
        )
    signal_var = float(np.var(clean.pixels))
    noise_var = float(np.var(noisy.pixels - clean.pixels))
    peak = float(np.mean(clean.pixels * clean.pixels))
    if noise_var == 0.0:
        return SnrEstimate(peak_estimate=peak, snr_linear=math.inf,
                           snr_db=math.inf, method="actual")
    snr = signal_var / noise_var
    db = snr_to_db(snr) if snr > 0.0 else -math.inf
    return SnrEstimate(peak_estimate=peak, snr_linear=snr, snr_db=db, method="actual")
