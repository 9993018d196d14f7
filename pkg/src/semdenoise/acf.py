"""Horizontal autocorrelation of a grayscale image.

The curve is the raw (not mean-subtracted) product autocorrelation taken
along rows and averaged over all rows:

    values[k] = mean over rows r of  (1/(width-k)) * sum_x I(x, r) * I(x+k, r)

for k = 0 .. max_lag. Each lag uses the unbiased divisor width-k. The curve
is symmetric by definition, so negative lags read the positive entry.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .image import GrayImage

DEFAULT_MAX_LAG = 16


@dataclass(frozen=True)
class AcfCurve:
    """Row-averaged horizontal autocorrelation with image mean statistics.

    values[k] holds the lag-k autocorrelation (intensity² units); mean and
    mean_sq are the image mean and its square, used by the SNR estimators.
    """

    values: np.ndarray
    mean: float
    mean_sq: float
    max_lag: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.shape[0] != self.max_lag + 1:
            raise ValueError(
                f"need max_lag+1 = {self.max_lag + 1} lag values, got shape {v.shape}"
            )
        if self.max_lag < 1:
            raise ValueError("max_lag must be at least 1")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def value(self, lag: int) -> float:
        """h(lag); symmetric, so h(-k) == h(k)."""
        return float(self.values[abs(lag)])


def usable_max_lag(image: GrayImage, requested: int = DEFAULT_MAX_LAG) -> int:
    """Requested lag count clamped to what the image width supports."""
    w = image.width
    cap = w // 4 if w >= 8 else w - 1
    return max(1, min(requested, cap))


def compute_acf(image: GrayImage, max_lag: int = DEFAULT_MAX_LAG) -> AcfCurve:
    """Row-averaged horizontal autocorrelation up to max_lag.

    For images of contract width (>= 8 pixels) max_lag is capped at
    floor(width/4) so the shrinking 1/(width-k) divisor stays well
    conditioned; narrower test images only require lag products to exist
    (max_lag <= width-1).
    """
    w = image.width
    if max_lag < 1:
        raise ValueError("max_lag must be at least 1")
    cap = w // 4 if w >= 8 else w - 1
    if max_lag > cap:
        raise ValueError(
            f"max_lag {max_lag} too large for width {w} (limit {cap})"
        )
    a = image.pixels
    values = np.empty(max_lag + 1, dtype=np.float64)
    for k in range(max_lag + 1):
        if k == 0:
            values[0] = float(np.mean(a * a))
        else:
            values[k] = float(np.mean(a[:, :-k] * a[:, k:]))
    mu = float(np.mean(a))
    return AcfCurve(values=values, mean=mu, mean_sq=mu * mu, max_lag=max_lag)


def acf_to_csv(curve: AcfCurve) -> str:
    """Two-column lag,value dump with full float precision."""
    buf = io.StringIO()
    buf.write("lag,value\n")
    for k in range(curve.max_lag + 1):
        buf.write(f"{k},{curve.value(k)!r}\n")
    return buf.getvalue()
