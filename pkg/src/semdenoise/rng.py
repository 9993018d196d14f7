"""Deterministic counter-based random numbers.

Every stochastic step in this package draws from the generator below instead
of a hidden global state, so a (seed, stream) pair pins down each noise
realization exactly, independent of evaluation order. The core is SplitMix64:
the k-th raw word is a fixed 64-bit mix of ``seed + (k+1) * GOLDEN``, which
makes the sequence random-access (a counter, not evolving state) and cheap to
vectorize with numpy's wrapping uint64 arithmetic.

Streams are independent child generators derived from (seed, stream_id);
callers that perturb many images use one stream per image so that adding or
reordering images never shifts anyone else's noise.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_STREAM_SALT = 0xD6E8FEB86659FD93

_U64_MASK = (1 << 64) - 1
_INV_2_53 = 1.0 / float(1 << 53)


def _mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer over uint64 arrays (wrapping arithmetic)."""
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _mix64_int(z: int) -> int:
    """Same finalizer on plain ints; numpy scalars warn on uint64 wraparound."""
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64_MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64_MASK
    return z ^ (z >> 31)


class CounterRng:
    """Counter-based 64-bit generator with splittable streams.

    Parameters
    ----------
    seed : int
        Any Python int; reduced modulo 2**64.
    stream : int
        Stream identifier. Distinct streams from the same seed produce
        statistically independent sequences.
    """

    def __init__(self, seed: int, stream: int = 0):
        base = int(seed) & _U64_MASK
        if stream:
            salt = int(stream) & _U64_MASK
            base = _mix64_int(((base ^ _STREAM_SALT)
                               + salt * 0x9E3779B97F4A7C15) & _U64_MASK)
        self._base = np.uint64(base)
        self._counter = 0

    def split(self, stream: int) -> "CounterRng":
        """Child generator for the given stream id, independent of draws made here."""
        return CounterRng(int(self._base), stream)

    def _words(self, n: int) -> np.ndarray:
        idx = np.arange(self._counter, self._counter + n, dtype=np.uint64)
        self._counter += n
        state = self._base + (idx + np.uint64(1)) * _GOLDEN
        return _mix64(state)

    def uniform(self, n: int) -> np.ndarray:
        """n doubles in the open interval (0, 1)."""
        if n < 0:
            raise ValueError("sample count must be non-negative")
        w = self._words(n)
        # top 53 bits, offset by half an ulp so 0.0 is unreachable (log-safe)
        return ((w >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53

    def normal(self, n: int) -> np.ndarray:
        """n standard normal deviates via the Box-Muller transform."""
        if n < 0:
            raise ValueError("sample count must be non-negative")
        m = (n + 1) // 2
        u1 = self.uniform(m)
        u2 = self.uniform(m)
        r = np.sqrt(-2.0 * np.log(u1))
        theta = (2.0 * np.pi) * u2
        z = np.empty(2 * m, dtype=np.float64)
        z[0::2] = r * np.cos(theta)
        z[1::2] = r * np.sin(theta)
        return z[:n]
