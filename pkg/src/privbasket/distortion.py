"""Symbol-specific random distortion of transaction bits.

A set bit survives with probability p, a clear bit survives with
probability q. Every (row, item) cell draws its uniform from a
counter-based keyed generator, so the output is independent of row
order, chunking, and thread count, and a single row can be reproduced
in isolation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .corpus import TransactionDatabase
from .errors import ConfigError

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = float(2.0**-53)


@dataclass(frozen=True)
class DistortionParams:
    p: float  # probability a 1 stays 1
    q: float  # probability a 0 stays 0
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0 or not 0.0 <= self.q <= 1.0:
            raise ConfigError("p and q must lie in [0, 1]")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.p + self.q == 1.0:
            # legal to apply, but true supports cannot be recovered later
            warnings.warn(
                "p + q = 1 makes the distortion unrecoverable", stacklevel=2
            )


def _mix64(x: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer over uint64 arrays; wraparound is intended
    x = (x ^ (x >> np.uint64(30))) * _MIX1
    x = (x ^ (x >> np.uint64(27))) * _MIX2
    return x ^ (x >> np.uint64(31))


def _cell_uniforms(seed: int, row_ids: np.ndarray, num_items: int) -> np.ndarray:
    """Uniforms in [0, 1) for every (row, item) cell of the given rows."""
    idx = row_ids.astype(np.uint64)[:, None] * np.uint64(num_items) + np.arange(
        num_items, dtype=np.uint64
    )
    bits = _mix64(np.uint64(seed) + (idx + np.uint64(1)) * _GAMMA)
    return (bits >> np.uint64(11)).astype(np.float64) * _INV_2_53


def _distort_dense(
    dense: np.ndarray, row_ids: np.ndarray, params: DistortionParams
) -> np.ndarray:
    u = _cell_uniforms(params.seed, row_ids, dense.shape[1])
    return np.where(dense, u < params.p, u < 1.0 - params.q)


def distort_database(
    db: TransactionDatabase, params: DistortionParams, chunk_rows: int = 4096
) -> TransactionDatabase:
    """Flip every cell independently; returns a database of equal shape."""
    blocks = []
    for start, dense in db.dense_chunks(chunk_rows):
        row_ids = np.arange(start, start + dense.shape[0], dtype=np.uint64)
        out = _distort_dense(dense, row_ids, params)
        blocks.append(np.packbits(out, axis=1, bitorder="little"))
    if not blocks:
        return db
    return TransactionDatabase(np.vstack(blocks), db.num_items)


def distort_tuple(row, params: DistortionParams, row_index: int) -> np.ndarray:
    """Distort one row exactly as distort_database would at row_index."""
    dense = np.asarray(row, dtype=bool)
    if dense.ndim != 1 or dense.size == 0:
        raise ConfigError("row must be a non-empty 1-D boolean vector")
    if row_index < 0:
        raise ConfigError("row_index must be non-negative")
    out = _distort_dense(
        dense[None, :], np.array([row_index], dtype=np.uint64), params
    )
    return out[0]


def expected_row_length(true_ones: int, num_items: int, p: float, q: float) -> float:
    """Mean number of set bits after distorting a row with true_ones set."""
    if not 0 <= true_ones <= num_items:
        raise ConfigError("true_ones must lie in [0, num_items]")
    return true_ones * p + (num_items - true_ones) * (1.0 - q)
