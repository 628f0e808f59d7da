"""Deterministic, splittable random streams.

The draw sequence of a stream is a pure function of ``(seed, stream_id)``,
independent of platform, call site, or thread scheduling. Normal variates
are produced by an inverse-CDF transform of 53-bit uniforms so that the
normal stream is an explicit function of the uniform stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_TWO53 = float(1 << 53)


def _splitmix64(z: int) -> int:
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def mix64(*parts: int) -> int:
    """Mix integers into a single 64-bit value (order sensitive)."""
    acc = 0
    for part in parts:
        acc = _splitmix64(acc ^ _splitmix64(part & _MASK64))
    return acc


@dataclass
class RngStream:
    """A consumable random stream identified by ``(seed, stream_id)``.

    Streams must not be shared between threads; derive one stream per
    (replication, purpose) instead.
    """

    seed: int
    stream_id: int = 0
    _bits: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        key = mix64(self.seed, self.stream_id)
        self._bits = np.random.Generator(np.random.PCG64(np.random.SeedSequence(key)))

    def derive(self, key: int) -> "RngStream":
        """Child stream for sub-task ``key``; does not consume this stream."""
        return RngStream(self.seed, mix64(self.stream_id, key))

    def fresh(self) -> "RngStream":
        """A restarted copy, unwinding any draws already consumed."""
        return RngStream(self.seed, self.stream_id)

    def uniform(self, size=None):
        """Uniform draws on the open interval (0, 1)."""
        return self._bits.integers(1, 1 << 53, size=size) / _TWO53

    def normal(self, size=None):
        """Standard normal draws via the inverse CDF of open uniforms."""
        return ndtri(self.uniform(size=size))

    def integers(self, low: int, high: int, size=None):
        return self._bits.integers(low, high, size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._bits.permutation(n)
