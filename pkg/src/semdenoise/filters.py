"""Spatial denoising filters.

Four families: box average, median, Gaussian blur, and the noise-variance
guided adaptive Wiener filter. The Wiener filter comes in two forms: the
local-statistics form (the one the processing pipeline uses, because its gain
adapts per pixel and preserves edges) and a frequency-domain form that
shrinks the periodogram toward an estimated clean power spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .image import GrayImage

BOUNDARY_MODES = ("symmetric", "replicate")

# numpy.pad name for each supported boundary rule
_PAD_MODE = {"symmetric": "symmetric", "replicate": "edge"}


@dataclass(frozen=True)
class FilterConfig:
    window: int = 3
    noise_variance: float = 0.0
    boundary: str = "symmetric"

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError("window must be an odd integer >= 3")
        if not (math.isfinite(self.noise_variance) and self.noise_variance >= 0.0):
            raise ValueError("noise_variance must be finite and >= 0")
        if self.boundary not in BOUNDARY_MODES:
            raise ValueError(f"boundary must be one of {BOUNDARY_MODES}")


def _check_window_fits(image: GrayImage, window: int) -> None:
    if window > min(image.height, image.width):
        raise ValueError(
            f"window {window} exceeds image extent "
            f"{image.height}x{image.width}")


def _padded(image: GrayImage, radius: int, boundary: str) -> np.ndarray:
    return np.pad(image.pixels, radius, mode=_PAD_MODE[boundary])


def _window_view(padded: np.ndarray, height: int, width: int,
                 window: int) -> np.ndarray:
    """(height, width, window*window) stack of each pixel's neighborhood."""
    shape = (height, width, window, window)
    strides = padded.strides * 2
    view = np.lib.stride_tricks.as_strided(padded, shape=shape, strides=strides)
    return view.reshape(height, width, window * window)


def average_filter(image: GrayImage, config: FilterConfig) -> GrayImage:
    """Each pixel becomes the mean of the window centered on it."""
    _check_window_fits(image, config.window)
    radius = config.window // 2
    padded = _padded(image, radius, config.boundary)
    windows = _window_view(padded, image.height, image.width, config.window)
    return GrayImage(windows.mean(axis=2))


def median_filter(image: GrayImage, config: FilterConfig) -> GrayImage:
    """Each pixel becomes the middle of its sorted odd-sized window."""
    _check_window_fits(image, config.window)
    radius = config.window // 2
    padded = _padded(image, radius, config.boundary)
    windows = _window_view(padded, image.height, image.width, config.window)
    return GrayImage(np.median(windows, axis=2))


def gaussian_kernel_1d(variance: float) -> np.ndarray:
    """Discrete Gaussian weights truncated at radius ceil(3*sigma), sum 1."""
    if not (math.isfinite(variance) and variance > 0.0):
        raise ValueError("variance must be finite and > 0")
    sigma = math.sqrt(variance)
    radius = math.ceil(3.0 * sigma)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    weights = np.exp(-(offsets * offsets) / (2.0 * variance))
    return weights / weights.sum()


def gaussian_filter(image: GrayImage, config: FilterConfig) -> GrayImage:
    """Separable Gaussian blur with sigma^2 = config.noise_variance."""
    kernel = gaussian_kernel_1d(config.noise_variance)
    radius = len(kernel) // 2
    padded = _padded(image, radius, config.boundary)
    rows = np.apply_along_axis(np.convolve, 1, padded, kernel, mode="valid")
    both = np.apply_along_axis(np.convolve, 0, rows, kernel, mode="valid")
    return GrayImage(np.clip(both, 0.0, 1.0))


def wiener_nv(image: GrayImage, config: FilterConfig) -> GrayImage:
    """Adaptive Wiener filter steered by a known noise variance.

    Gain per pixel: max(local_var - nv, 0) / max(local_var, nv). Flat
    neighborhoods collapse to their local mean; high-variance neighborhoods
    pass through nearly untouched, which is what keeps edges.
    """
    _check_window_fits(image, config.window)
    nv = config.noise_variance
    if nv == 0.0:
        return GrayImage(image.pixels)
    radius = config.window // 2
    padded = _padded(image, radius, config.boundary)
    windows = _window_view(padded, image.height, image.width, config.window)
    local_mean = windows.mean(axis=2)
    local_var = windows.var(axis=2)  # biased 1/n, deliberate
    gain = np.maximum(local_var - nv, 0.0) / np.maximum(local_var, nv)
    out = local_mean + gain * (image.pixels - local_mean)
    return GrayImage(np.clip(out, 0.0, 1.0))


def wiener_frequency(image: GrayImage, noise_variance: float) -> GrayImage:
    """Frequency-domain Wiener filter with a periodogram signal estimate.

    The clean power spectrum is estimated as max(|F|^2/N - nv*N, 0) and the
    per-bin gain is P_s/(P_s + nv*N); the DC bin is passed at gain 1 so the
    image mean survives. nv = 0 is the identity.
    """
    if not (math.isfinite(noise_variance) and noise_variance >= 0.0):
        raise ValueError("noise_variance must be finite and >= 0")
    if noise_variance == 0.0:
        return GrayImage(image.pixels)
    pixels = image.pixels
    n = pixels.size
    spectrum = np.fft.fft2(pixels)
    noise_power = noise_variance * n
    signal_power = np.maximum(np.abs(spectrum) ** 2 / n - noise_power, 0.0)
    gain = signal_power / (signal_power + noise_power)
    gain[0, 0] = 1.0
    out = np.fft.ifft2(spectrum * gain).real
    return GrayImage(np.clip(out, 0.0, 1.0))


FILTER_NAMES = ("average", "median", "gaussian", "wiener", "wiener-freq")


def apply_filter(name: str, image: GrayImage, config: FilterConfig) -> GrayImage:
    """Dispatch by CLI-facing filter name."""
    if name == "average":
        return average_filter(image, config)
    if name == "median":
        return median_filter(image, config)
    if name == "gaussian":
        return gaussian_filter(image, config)
    if name == "wiener":
        return wiener_nv(image, config)
    if name == "wiener-freq":
        return wiener_frequency(image, config.noise_variance)
    raise ValueError(f"unknown filter {name!r}; expected one of {FILTER_NAMES}")
