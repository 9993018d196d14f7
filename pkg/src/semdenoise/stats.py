"""Image-quality metrics and paired-sample statistics.

The Student-t machinery is self-contained: the CDF is evaluated through the
regularized incomplete beta function with a Lentz-style continued fraction
(good to ~1e-14), and critical values come from bisection on that CDF. No
statistics library is involved, so the numbers are reproducible down to the
printing precision of the benchmark tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStatsError
from .image import GrayImage

# ---------------------------------------------------------------------------
# pixel metrics


def _check_dims(a: GrayImage, b: GrayImage):
    if a.pixels.shape != b.pixels.shape:
        raise ValueError(
            f"dimension mismatch: {a.pixels.shape} vs {b.pixels.shape}"
        )


def mse(a: GrayImage, b: GrayImage) -> float:
    """Mean squared difference over all pixels."""
    _check_dims(a, b)
    d = a.pixels - b.pixels
    return float(np.mean(d * d))


def psnr(a: GrayImage, b: GrayImage, peak: float = 1.0) -> float:
    """10*log10(peak^2 / mse); +inf for identical images."""
    m = mse(a, b)
    if m == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / m)


def _valid_window_mean(a: np.ndarray, kernel1d: np.ndarray) -> np.ndarray:
    # separable valid-mode convolution; kernel is symmetric so convolve ==
    # correlate
    rows = np.apply_along_axis(lambda r: np.convolve(r, kernel1d, mode="valid"), 1, a)
    return np.apply_along_axis(lambda c: np.convolve(c, kernel1d, mode="valid"), 0, rows)


def ssim(a: GrayImage, b: GrayImage, peak: float = 1.0) -> float:
    """Single-scale structural similarity, averaged over the valid map.

    Local statistics use the standard 11x11 Gaussian window with sigma 1.5;
    stabilizing constants are (0.01*peak)^2 and (0.03*peak)^2. The map is
    only evaluated where the window fits entirely inside both images.
    """
    _check_dims(a, b)
    side = 11
    if min(a.pixels.shape) < side:
        raise ValueError(
            f"image sides must be >= {side} for ssim, got {a.pixels.shape}"
        )
    x = np.arange(side, dtype=np.float64) - (side - 1) / 2.0
    g = np.exp(-(x * x) / (2.0 * 1.5 * 1.5))
    g /= g.sum()

    pa, pb = a.pixels, b.pixels
    mu_a = _valid_window_mean(pa, g)
    mu_b = _valid_window_mean(pb, g)
    var_a = _valid_window_mean(pa * pa, g) - mu_a * mu_a
    var_b = _valid_window_mean(pb * pb, g) - mu_b * mu_b
    cov = _valid_window_mean(pa * pb, g) - mu_a * mu_b

    c1 = (0.01 * peak) ** 2
    c2 = (0.03 * peak) ** 2
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))


def cosine_similarity(x, y) -> float:
    """Inner product of two vectors scaled by their norms."""
    xv = np.asarray(x, dtype=np.float64).ravel()
    yv = np.asarray(y, dtype=np.float64).ravel()
    if xv.shape != yv.shape or xv.size == 0:
        raise ValueError("vectors must have equal nonzero length")
    nx = float(np.linalg.norm(xv))
    ny = float(np.linalg.norm(yv))
    if nx == 0.0 or ny == 0.0:
        raise DegenerateStatsError("cosine similarity undefined for zero-norm vector")
    return float(np.dot(xv, yv) / (nx * ny))


# ---------------------------------------------------------------------------
# Student-t distribution via the regularized incomplete beta function


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Lentz evaluation of the continued fraction for the incomplete beta."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 301):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if not (a > 0.0 and b > 0.0):
        raise ValueError("shape parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # use whichever tail keeps the continued fraction well conditioned
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def student_t_cdf(t: float, df: float) -> float:
    """P(T <= t) for Student's t with df degrees of freedom."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x)
    return tail if t < 0.0 else 1.0 - tail


def student_t_ppf(p: float, df: float) -> float:
    """Inverse CDF by bisection (enough for critical-value use)."""
    if not (0.0 < p < 1.0):
        raise ValueError("p must lie strictly between 0 and 1")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -student_t_ppf(1.0 - p, df)
    lo, hi = 0.0, 1.0
    while student_t_cdf(hi, df) < p:
        hi *= 2.0
        if hi > 1e12:
            raise ArithmeticError("quantile search exceeded range")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if student_t_cdf(mid, df) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# paired t-test


@dataclass(frozen=True)
class TTestReport:
    """Paired two-sample t-test summary (matched to the usual spreadsheet layout)."""

    mean_x: float
    mean_y: float
    var_x: float
    var_y: float
    n: int
    pearson: float
    df: int
    t_stat: float
    p_one_tail: float
    p_two_tail: float
    t_crit_one: float
    t_crit_two: float
    alpha: float


def paired_t_test(x, y, alpha: float = 0.05) -> TTestReport:
    """Paired t-test of two equal-length samples.

    t = mean(d) / (std(d, n-1) / sqrt(n)) with d = x - y. The one-tail
    p-value is the tail probability in the observed direction (for negative
    t, the lower tail), the two-tail value is its double.
    """
    xv = np.asarray(x, dtype=np.float64).ravel()
    yv = np.asarray(y, dtype=np.float64).ravel()
    if xv.shape != yv.shape:
        raise ValueError("samples must have equal length")
    n = xv.size
    if n < 2:
        raise ValueError("need at least 2 paired observations")
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie strictly between 0 and 1")
    d = xv - yv
    sd = float(np.std(d, ddof=1))
    if sd == 0.0:
        raise DegenerateStatsError(
            "paired differences have zero variance, t statistic undefined"
        )
    t = float(np.mean(d)) / (sd / math.sqrt(n))
    df = n - 1

    vx = float(np.var(xv, ddof=1))
    vy = float(np.var(yv, ddof=1))
    if vx > 0.0 and vy > 0.0:
        covxy = float(np.sum((xv - xv.mean()) * (yv - yv.mean())) / (n - 1))
        pearson = covxy / math.sqrt(vx * vy)
    else:
        pearson = math.nan

    p_one = student_t_cdf(-abs(t), df)
    return TTestReport(
        mean_x=float(xv.mean()),
        mean_y=float(yv.mean()),
        var_x=vx,
        var_y=vy,
        n=n,
        pearson=pearson,
        df=df,
        t_stat=t,
        p_one_tail=p_one,
        p_two_tail=2.0 * p_one,
        t_crit_one=student_t_ppf(1.0 - alpha, df),
        t_crit_two=student_t_ppf(1.0 - alpha / 2.0, df),
        alpha=alpha,
    )


def format_ttest_report(report: TTestReport, label_x: str = "x", label_y: str = "y") -> str:
    """Row layout used by the benchmark tables, plus both one-tail readings.

    The two closing lines state the outcome under each direction of the
    one-sided null hypothesis; the numbers themselves are direction-free.
    """
    r = report
    g = lambda v: f"{v:.9g}"
    lines = [
        f"{'':34s}{label_x:>16s}{label_y:>16s}",
        f"{'Mean':34s}{g(r.mean_x):>16s}{g(r.mean_y):>16s}",
        f"{'Variance':34s}{g(r.var_x):>16s}{g(r.var_y):>16s}",
        f"{'Observations':34s}{r.n:>16d}{r.n:>16d}",
        f"{'Pearson Correlation':34s}{g(r.pearson):>16s}",
        f"{'Hypothesized Mean Difference':34s}{0:>16d}",
        f"{'df':34s}{r.df:>16d}",
        f"{'t Stat':34s}{g(r.t_stat):>16s}",
        f"{'P(T<=t) one-tail':34s}{g(r.p_one_tail):>16s}",
        f"{'t Critical one-tail':34s}{g(r.t_crit_one):>16s}",
        f"{'P(T<=t) two-tail':34s}{g(r.p_two_tail):>16s}",
        f"{'t Critical two-tail':34s}{g(r.t_crit_two):>16s}",
    ]
    reject_low = r.t_stat <= -r.t_crit_one
    reject_high = r.t_stat >= r.t_crit_one
    lines.append(
        f"one-tail at alpha={r.alpha:g}: "
        f"H0 mean({label_x}) >= mean({label_y}): "
        f"{'rejected' if reject_low else 'not rejected'}; "
        f"H0 mean({label_x}) <= mean({label_y}): "
        f"{'rejected' if reject_high else 'not rejected'}"
    )
    lines.append(
        f"two-tail at alpha={r.alpha:g}: H0 equal means: "
        f"{'rejected' if abs(r.t_stat) >= r.t_crit_two else 'not rejected'}"
    )
    return "\n".join(lines) + "\n"
