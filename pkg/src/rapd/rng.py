"""Deterministic counter-based random numbers for block sampling.

The generator is splitmix64: the state is a 64-bit counter advanced by a
fixed odd constant, and each output is a finalizing hash of the counter.
This keeps runs reproducible from a single integer seed without depending
on any external generator's stream guarantees.  Determinism is promised
per implementation, not bit-for-bit across languages.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    """splitmix64 finalizer: hash a 64-bit counter value."""
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


class CounterRng:
    """64-bit counter generator; the full state is ``(seed, counter)``."""

    def __init__(self, seed: int, counter: int = 0):
        self.seed = int(seed) & _MASK
        self.counter = int(counter)

    def clone(self) -> "CounterRng":
        return CounterRng(self.seed, self.counter)

    def next_u64(self) -> int:
        self.counter += 1
        return _mix((self.seed + self.counter * _GAMMA) & _MASK)

    def next_float(self) -> float:
        # 53 significant bits, uniform on [0, 1)
        return (self.next_u64() >> 11) * 2.0**-53


def sample_index(rng: CounterRng, m: int, p: np.ndarray | None = None) -> int:
    """Draw one index from ``{0..m-1}``.

    Uniform sampling uses the rejection-free scaled-integer method
    ``(u64 * m) >> 64``; non-uniform sampling inverts the cumulative
    distribution of ``p``.
    """
    if p is None:
        return (rng.next_u64() * m) >> 64
    u = rng.next_float()
    return int(np.searchsorted(np.cumsum(p), u, side="right").clip(0, m - 1))


def sample_indices(seed: int, m: int, count: int, p: np.ndarray | None = None) -> np.ndarray:
    """Vectorized variant of :func:`sample_index` for statistical tests.

    Produces exactly the sequence a fresh ``CounterRng(seed)`` would.
    """
    counters = (np.uint64(seed) + np.arange(1, count + 1, dtype=np.uint64) * np.uint64(_GAMMA))
    z = counters
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    if p is None:
        # floor(z * m / 2^64) without overflow: use object ints only at the end
        return ((z.astype(object) * m) >> 64).astype(np.int64)
    u = (z >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return np.searchsorted(np.cumsum(p), u, side="right").clip(0, m - 1).astype(np.int64)
