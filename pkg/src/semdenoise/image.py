"""Grayscale image container, PGM input/output, noise injection, synthetic scenes.

Images are immutable float64 rasters with intensities in [0, 1]. Files are
read and written in the netpbm PGM formats: ``P2`` (ASCII) and ``P5`` (binary,
big-endian for 16-bit samples), with ``#`` comments tolerated anywhere in the
header. Parse failures report a byte offset so a truncated or corrupt file can
be located with a hex editor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PgmError
from .rng import CounterRng

MAX_PGM_MAXVAL = 65535

SYNTHETIC_KINDS = ("gradient", "blobs", "bandlimited")


@dataclass(frozen=True)
class GrayImage:
    """A height x width raster of intensities in [0, 1], row-major."""

    pixels: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.pixels, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"image must be a 2-D array, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("image contains non-finite intensities")
        if a.min() < 0.0 or a.max() > 1.0:
            raise ValueError(
                f"intensities must lie in [0, 1], got range "
                f"[{a.min():.6g}, {a.max():.6g}]"
            )
        a = a.copy()
        a.flags.writeable = False
        object.__setattr__(self, "pixels", a)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class NoiseSpec:
    """Additive white Gaussian noise parameters.

    variance is an intensity-squared quantity in [0, 0.25]; seed and stream
    select the deterministic noise realization (one stream per image keeps
    realizations independent across a corpus).
    """

    variance: float
    seed: int = 0
    stream: int = field(default=0)

    def __post_init__(self):
        if not (0.0 <= self.variance <= 0.25):
            raise ValueError(f"noise variance must lie in [0, 0.25], got {self.variance}")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must fit in 64 bits")
        if int(self.stream) < 0:
            raise ValueError("stream id must be non-negative")


def add_awgn(image: GrayImage, spec: NoiseSpec) -> GrayImage:
    """Add white Gaussian noise of the requested variance, clamped to [0, 1].

    The same (image, spec) pair always produces the bitwise-identical result.
    Zero variance returns the input pixels unchanged.
    """
    if spec.variance == 0.0:
        return GrayImage(image.pixels)
    rng = CounterRng(spec.seed, spec.stream)
    noise = rng.normal(image.height * image.width)
    noisy = image.pixels + np.sqrt(spec.variance) * noise.reshape(image.height, image.width)
    return GrayImage(np.clip(noisy, 0.0, 1.0))


# ---------------------------------------------------------------------------
# PGM parsing

_WHITESPACE = b" \t\r\n\v\f"


class _Tokens:
    """Header tokenizer that skips whitespace and # comments, tracking offsets."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _skip_separators(self):
        data = self.data
        while self.pos < len(data):
            c = data[self.pos : self.pos + 1]
            if c in _WHITESPACE:
                self.pos += 1
            elif c == b"#":
                nl = data.find(b"\n", self.pos)
                self.pos = len(data) if nl < 0 else nl + 1
            else:
                return

    def next_token(self, what: str) -> tuple[bytes, int]:
        self._skip_separators()
        if self.pos >= len(self.data):
            raise PgmError(f"unexpected end of file while reading {what}", self.pos)
        start = self.pos
        while self.pos < len(self.data):
            c = self.data[self.pos : self.pos + 1]
            if c in _WHITESPACE or c == b"#":
                break
            self.pos += 1
        return self.data[start : self.pos], start

    def next_int(self, what: str, lo: int, hi: int) -> int:
        tok, start = self.next_token(what)
        try:
            value = int(tok)
        except ValueError:
            raise PgmError(f"expected integer for {what}, got {tok!r}", start) from None
        if not (lo <= value <= hi):
            raise PgmError(f"{what} {value} outside [{lo}, {hi}]", start)
        return value


def load_pgm(path) -> GrayImage:
    """Read a P2 or P5 PGM file and normalize intensities to [0, 1]."""
    with open(path, "rb") as fh:
        data = fh.read()
    toks = _Tokens(data)
    magic, magic_at = toks.next_token("magic number")
    if magic not in (b"P2", b"P5"):
        raise PgmError(f"unsupported magic {magic!r}, want P2 or P5", magic_at)
    width = toks.next_int("width", 1, 10**9)
    height = toks.next_int("height", 1, 10**9)
    maxval = toks.next_int("maxval", 1, MAX_PGM_MAXVAL)
    count = width * height

    if magic == b"P5":
        if toks.pos >= len(data) or data[toks.pos : toks.pos + 1] not in _WHITESPACE:
            raise PgmError("P5 header must end with a whitespace byte", toks.pos)
        start = toks.pos + 1
        itemsize = 1 if maxval < 256 else 2
        need = count * itemsize
        if len(data) - start < need:
            raise PgmError(
                f"raster truncated: need {need} bytes, have {len(data) - start}",
                len(data),
            )
        dtype = np.uint8 if itemsize == 1 else np.dtype(">u2")
        raw = np.frombuffer(data, dtype=dtype, count=count, offset=start)
        bad = np.nonzero(raw > maxval)[0]
        if bad.size:
            i = int(bad[0])
            raise PgmError(
                f"sample {int(raw[i])} exceeds maxval {maxval}", start + i * itemsize
            )
        samples = raw.astype(np.float64)
    else:
        samples = np.empty(count, dtype=np.float64)
        for i in range(count):
            samples[i] = toks.next_int(f"sample {i}", 0, maxval)
        toks._skip_separators()
        if toks.pos < len(data):
            raise PgmError("trailing content after raster", toks.pos)

    return GrayImage((samples / float(maxval)).reshape(height, width))


def save_pgm(image: GrayImage, path, maxval: int = 255) -> None:
    """Write a binary (P5) PGM, quantizing with round-half-up."""
    if maxval not in (255, MAX_PGM_MAXVAL):
        raise ValueError(f"maxval must be 255 or {MAX_PGM_MAXVAL}, got {maxval}")
    q = np.floor(image.pixels * maxval + 0.5).astype(np.uint16 if maxval > 255 else np.uint8)
    header = f"P5\n{image.width} {image.height}\n{maxval}\n".encode("ascii")
    body = q.astype(">u2").tobytes() if maxval > 255 else q.tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body)


# ---------------------------------------------------------------------------
# Synthetic scenes

def _rescale(a: np.ndarray, lo: float, hi: float) -> np.ndarray:
    amin, amax = float(a.min()), float(a.max())
    if amax == amin:
        return np.full_like(a, 0.5 * (lo + hi))
    return lo + (hi - lo) * (a - amin) / (amax - amin)


def _smooth(a: np.ndarray, sigma: float) -> np.ndarray:
    # separable Gaussian blur with reflected edges; local helper, the public
    # Gaussian filter lives in filters.py
    radius = max(1, int(np.ceil(3.0 * sigma)))
    radius = min(radius, min(a.shape) - 1) if min(a.shape) > 1 else 0
    if radius == 0:
        return a.copy()
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    k /= k.sum()
    padded = np.pad(a, radius, mode="reflect")
    out = np.apply_along_axis(lambda r: np.convolve(r, k, mode="valid"), 1, padded)
    out = np.apply_along_axis(lambda c: np.convolve(c, k, mode="valid"), 0, out)
    return out


def _standardized(a: np.ndarray) -> np.ndarray:
    s = float(a.std())
    return (a - a.mean()) / (s if s > 0.0 else 1.0)


def _micro_bumps(width: int, height: int, rng: CounterRng) -> np.ndarray:
    # dense field of sub-pixel Gaussian bumps; correlation dies out by lag 3
    n_bumps = max(6, (width * height) // 4)
    cx = rng.uniform(n_bumps) * (width - 1)
    cy = rng.uniform(n_bumps) * (height - 1)
    radius = 0.5 + 0.2 * rng.uniform(n_bumps)
    amp = np.where(rng.uniform(n_bumps) < 0.5, -1.0, 1.0)
    yy, xx = np.mgrid[0:height, 0:width]
    a = np.zeros((height, width), dtype=np.float64)
    for i in range(n_bumps):
        d2 = (xx - cx[i]) ** 2 + (yy - cy[i]) ** 2
        a += amp[i] * np.exp(-d2 / (2.0 * radius[i] ** 2))
    return a


# Micro-texture amplitude relative to the structural component (ratio of
# standard deviations). Large enough that the short-lag autocorrelation is
# texture-dominated, small enough that flat regions stay flat for the
# local-statistics filter.
_MICRO_MIX = 1.7


def make_synthetic(kind: str, width: int, height: int, seed: int = 0) -> GrayImage:
    """Deterministic test scene of the requested kind.

    gradient     row-major linear ramp spanning exactly [0, 1]
    blobs        two-level blob regions (thresholded smoothed noise) overlaid
                 with a field of sub-pixel Gaussian bumps
    bandlimited  soft-saturated low-band noise overlaid with the same kind of
                 sub-pixel bump texture

    The textured kinds layer two components. The structural layer (plateaus
    with soft edges) gives the scene locally flat regions and real edges,
    which is what a local-statistics denoiser needs to show a benefit. The
    micro-texture layer dominates the short-lag autocorrelation: it drops
    sharply from lag 0 to 1 and flattens by lag 3-4, the regime the peak
    extrapolators are built for. Either layer alone breaks one half of the
    benchmark suite: pure micro-texture leaves nothing for the filter to
    smooth, and pure smooth structure puts the extrapolation window on a
    curve whose fitted intercept overshoots the peak.
    """
    if width < 1 or height < 1:
        raise ValueError("image dimensions must be positive")
    if kind == "gradient":
        n = width * height
        ramp = np.arange(n, dtype=np.float64) / max(n - 1, 1)
        return GrayImage(ramp.reshape(height, width))

    rng = CounterRng(seed)
    if kind == "blobs":
        coarse = _smooth(rng.normal(width * height).reshape(height, width), 3.5)
        plateaus = np.where(coarse > np.median(coarse), 1.0, 0.0)
        structure = _smooth(plateaus, 0.6)
        micro = _micro_bumps(width, height, rng)
        a = _standardized(structure) + _MICRO_MIX * _standardized(micro)
        return GrayImage(_rescale(a, 0.05, 0.95))
    if kind == "bandlimited":
        coarse = _smooth(rng.normal(width * height).reshape(height, width), 5.0)
        scale = float(coarse.std())
        saturated = np.tanh(coarse / (0.35 * scale)) if scale > 0.0 else coarse
        micro = _micro_bumps(width, height, rng)
        a = _standardized(saturated) + _MICRO_MIX * _standardized(micro)
        return GrayImage(_rescale(a, 0.05, 0.95))
    raise ValueError(f"unknown synthetic kind {kind!r}, expected one of {SYNTHETIC_KINDS}")
