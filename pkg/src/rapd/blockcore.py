"""Block-structured vectors and diagonally weighted norms.

The primal variable is a dense vector partitioned into ``m`` contiguous
blocks of sizes ``n_i``.  All block-diagonal weight matrices used by the
step-size rules and the rate bounds are constant within each block, so a
weight vector of length ``m`` is enough.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionError


@dataclass(frozen=True)
class BlockPartition:
    """Partition of ``R^n`` into m contiguous blocks.

    Parameters
    ----------
    sizes : sequence of positive int
        Block lengths ``n_i``; ``n = sum(sizes)``.
    """

    sizes: tuple
    offsets: np.ndarray = field(init=False, repr=False, compare=False)

    def __init__(self, sizes):
        sizes = tuple(int(s) for s in sizes)
        if len(sizes) < 1 or any(s < 1 for s in sizes):
            raise DimensionError(f"block sizes must be positive, got {sizes}")
        object.__setattr__(self, "sizes", sizes)
        offsets = np.concatenate([[0], np.cumsum(sizes)])
        object.__setattr__(self, "offsets", offsets)

    @property
    def m(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return int(self.offsets[-1])

    def block_slice(self, i: int) -> slice:
        if not 0 <= i < self.m:
            raise DimensionError(f"block index {i} out of range [0, {self.m})")
        return slice(int(self.offsets[i]), int(self.offsets[i + 1]))

    def slices(self):
        return [self.block_slice(i) for i in range(self.m)]

    @staticmethod
    def even(n: int, m: int) -> "BlockPartition":
        """Split ``n`` coordinates into ``m`` blocks, last block shorter
        when ``m`` does not divide ``n``."""
        if not 1 <= m <= n:
            raise DimensionError(f"need 1 <= m <= n, got m={m}, n={n}")
        base = -(-n // m)  # ceil
        sizes = []
        left = n
        for _ in range(m):
            take = min(base, left - 0)
            # keep exactly m nonempty blocks
            remaining_blocks = m - len(sizes)
            take = min(take, left - (remaining_blocks - 1))
            sizes.append(take)
            left -= take
        return BlockPartition(sizes)


@dataclass
class BlockVector:
    """Dense vector with an attached block partition."""

    data: np.ndarray
    partition: BlockPartition

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.ndim != 1 or self.data.size != self.partition.n:
            raise DimensionError(
                f"data length {self.data.size} does not match partition total {self.partition.n}"
            )
        if not np.all(np.isfinite(self.data)):
            raise DimensionError("block vector entries must be finite")

    def block(self, i: int) -> np.ndarray:
        """Writable view of block ``i``; writes touch only that block."""
        return self.data[self.partition.block_slice(i)]

    def copy(self) -> "BlockVector":
        return BlockVector(self.data.copy(), self.partition)

    @staticmethod
    def zeros(partition: BlockPartition) -> "BlockVector":
        return BlockVector(np.zeros(partition.n), partition)


@dataclass(frozen=True)
class DiagWeights:
    """One nonnegative scalar weight per block."""

    values: np.ndarray

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1:
            raise DimensionError("weights must be a 1-d sequence")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise DimensionError("weights must be finite and nonnegative")
        object.__setattr__(self, "values", values)

    @property
    def m(self) -> int:
        return self.values.size

    def __add__(self, other: "DiagWeights") -> "DiagWeights":
        if other.m != self.m:
            raise DimensionError("weight lengths differ")
        return DiagWeights(self.values + other.values)

    def scaled(self, c: float) -> "DiagWeights":
        return DiagWeights(self.values * c)


def block_sq_norms(data: np.ndarray, partition: BlockPartition) -> np.ndarray:
    """Per-block squared Euclidean norms, length m."""
    return np.add.reduceat(np.square(data), partition.offsets[:-1])


def weighted_norm_sq(x: BlockVector, d: DiagWeights) -> float:
    """``sum_i d_i * ||x_i||^2`` for block weights ``d``."""
    if d.m != x.partition.m:
        raise DimensionError(
            f"weights have {d.m} entries but partition has {x.partition.m} blocks"
        )
    return float(d.values @ block_sq_norms(x.data, x.partition))


def weighted_norm_sq_raw(data: np.ndarray, partition: BlockPartition, weights: np.ndarray) -> float:
    """Same as :func:`weighted_norm_sq` on raw arrays (hot-loop path)."""
    return float(weights @ np.add.reduceat(np.square(data), partition.offsets[:-1]))


def block_view(x: BlockVector, i: int) -> np.ndarray:
    """Writable view of the i-th block of ``x``."""
    return x.block(i)
