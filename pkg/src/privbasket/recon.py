"""Support reconstruction for mining distorted databases.

A candidate with n items induces a (n+1)x(n+1) transition matrix M over
ones-counts: column j holds the distribution of distorted ones-counts
for a row that truly had j of the n items. Counting only all-ones
occurrences of the candidate's subsets is enough to recover, by
inclusion-exclusion, how many distorted rows carry exactly k of its
items; solving M c_true = c_distorted then estimates the true
ones-count spectrum, whose top entry is the reconstructed support
count. The reconstruction miner runs the standard level-wise passes on
the distorted database but prunes on reconstructed support.
"""

from __future__ import annotations

import itertools
from collections import ChainMap
from dataclasses import dataclass, field
from math import comb
from typing import Mapping, Sequence

import numpy as np

from .apriori import (
    FrequentLattice,
    Itemset,
    _mine_levelwise,
    count_all_ones,
    validate_itemset,
)
from .corpus import TransactionDatabase
from .errors import ConfigError, InternalConsistencyError, ReconstructionError

_SINGULAR_EPS = 1e-6
_RESIDUAL_EPS = 1e-8


@dataclass(eq=False)
class TransitionMatrix:
    """m[i][j] = probability that a row with j true ones among the n
    tracked items shows i ones after distortion."""

    n: int
    p: float
    q: float
    m: np.ndarray = field(repr=False)


def build_transition_matrix(n: int, p: float, q: float) -> TransitionMatrix:
    """Columns are convolutions of two binomials: of the j ones, k stay
    set (prob p each); of the n-j zeros, i-k flip to set (prob 1-q each)."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    if not 0.0 <= p <= 1.0 or not 0.0 <= q <= 1.0:
        raise ConfigError("p and q must lie in [0, 1]")
    # 0**0 = 1 in these tables, so the endpoints p,q in {0,1} stay exact
    pk = [p**k for k in range(n + 1)]
    pc = [(1.0 - p) ** k for k in range(n + 1)]
    qk = [q**k for k in range(n + 1)]
    qc = [(1.0 - q) ** k for k in range(n + 1)]
    m = np.zeros((n + 1, n + 1))
    for j in range(n + 1):
        for i in range(n + 1):
            lo = max(0, i + j - n)
            hi = min(i, j)
            acc = 0.0
            for k in range(lo, hi + 1):
                acc += (
                    comb(j, k)
                    * pk[k]
                    * pc[j - k]
                    * comb(n - j, i - k)
                    * qc[i - k]
                    * qk[(n - j) - (i - k)]
                )
            m[i, j] = acc
    colsum_err = float(np.abs(m.sum(axis=0) - 1.0).max())
    if colsum_err > 1e-12:
        raise InternalConsistencyError(
            f"transition matrix columns deviate from 1 by {colsum_err:g}"
        )
    return TransitionMatrix(n=n, p=p, q=q, m=m)


@dataclass(eq=False)
class CombinationCounts:
    """counts[k] = rows showing exactly k of the candidate's items;
    side is "distorted" (exact integers) or "true" (solved reals)."""

    counts: np.ndarray
    side: str

    @property
    def n(self) -> int:
        return len(self.counts) - 1


def combination_counts(
    candidate: Itemset, subset_counts: Mapping[Itemset, int], dbsize: int
) -> CombinationCounts:
    """Exact distorted ones-count spectrum from all-ones subset counts.

    subset_counts must hold the all-ones count of every non-empty subset
    of candidate (the level-wise pass structure guarantees this). All
    arithmetic is integer, so the result is exact.
    """
    cand = validate_itemset(candidate)
    n = len(cand)
    if dbsize < 0:
        raise ConfigError("dbsize must be non-negative")
    sums = [0] * (n + 1)  # sums[m] = sum of all-ones counts over size-m subsets
    sums[0] = dbsize
    for size in range(1, n + 1):
        for sub in itertools.combinations(cand, size):
            try:
                sums[size] += int(subset_counts[sub])
            except KeyError:
                raise InternalConsistencyError(
                    f"missing all-ones count for subset {sub} of {cand}"
                ) from None
    counts = np.zeros(n + 1, dtype=np.int64)
    for k in range(n + 1):
        acc = 0
        for m in range(k, n + 1):
            term = comb(m, k) * sums[m]
            acc += term if (m - k) % 2 == 0 else -term
        counts[k] = acc
    if counts.min() < 0 or int(counts.sum()) != dbsize:
        raise InternalConsistencyError(
            f"inconsistent subset counts for candidate {cand}"
        )
    return CombinationCounts(counts=counts, side="distorted")


def solve_true_counts(
    matrix: TransitionMatrix, distorted: CombinationCounts | Sequence[float]
) -> CombinationCounts:
    """Solve M c_true = c_distorted by partial-pivot LU (no explicit inverse).

    Entries of the result may be negative; thresholding is done on the
    raw values and clamping is left to reporting code.
    """
    if abs(matrix.p + matrix.q - 1.0) < _SINGULAR_EPS:
        raise ReconstructionError(
            "p + q = 1 makes the transition matrix singular, cannot reconstruct"
        )
    cd = np.asarray(
        distorted.counts if isinstance(distorted, CombinationCounts) else distorted,
        dtype=np.float64,
    )
    if cd.shape != (matrix.n + 1,):
        raise ConfigError("count vector length does not match matrix size")
    try:
        ct = np.linalg.solve(matrix.m, cd)
    except np.linalg.LinAlgError as exc:
        raise ReconstructionError(f"transition matrix is singular: {exc}") from None
    scale = max(1.0, float(cd.sum()))
    if float(np.abs(matrix.m @ ct - cd).max()) > _RESIDUAL_EPS * scale:
        raise InternalConsistencyError("reconstruction residual exceeds tolerance")
    if abs(float(ct.sum()) - float(cd.sum())) > 1e-6 * scale:
        raise InternalConsistencyError("reconstructed counts do not preserve total")
    return CombinationCounts(counts=ct, side="true")


def _check_pq(p: float, q: float) -> None:
    if not 0.0 <= p <= 1.0 or not 0.0 <= q <= 1.0:
        raise ConfigError("p and q must lie in [0, 1]")
    if abs(p + q - 1.0) < _SINGULAR_EPS:
        raise ReconstructionError("p + q = 1, true supports are unrecoverable")


def mine_distorted(
    distorted_db: TransactionDatabase,
    p: float,
    q: float,
    sup_min: float,
    count_mode: str = "vertical",
    threads: int = 1,
    counters: dict | None = None,
) -> FrequentLattice:
    """Level-wise mining over a distorted database, pruning on
    reconstructed support. Counting work per pass is identical to the
    exact miner on the same candidates; reconstruction adds one batched
    solve per level plus subset bookkeeping."""
    _check_pq(p, q)
    dbsize = distorted_db.dbsize
    matrices: dict[int, TransitionMatrix] = {}
    retained: dict[Itemset, int] = {}

    def select(level, cands, counts):
        if level not in matrices:
            matrices[level] = build_transition_matrix(level, p, q)
        mat = matrices[level]
        ncand = len(cands)
        cd = np.zeros((level + 1, ncand), dtype=np.float64)
        if level == 1:
            cd[1] = counts
            cd[0] = dbsize - counts
        elif level == 2:
            na = np.fromiter(
                (retained[(c[0],)] for c in cands), dtype=np.int64, count=ncand
            )
            nb = np.fromiter(
                (retained[(c[1],)] for c in cands), dtype=np.int64, count=ncand
            )
            cd[2] = counts
            cd[1] = na + nb - 2 * counts
            cd[0] = dbsize - na - nb + counts
        else:
            for j, cand in enumerate(cands):
                cc = combination_counts(
                    cand, ChainMap({cand: int(counts[j])}, retained), dbsize
                )
                cd[:, j] = cc.counts
        ct = np.linalg.solve(mat.m, cd)
        if float(np.abs(mat.m @ ct - cd).max()) > _RESIDUAL_EPS * max(1.0, dbsize):
            raise InternalConsistencyError("reconstruction residual exceeds tolerance")
        rec = ct[level]  # raw reconstructed counts, may be negative
        keep = rec / dbsize >= sup_min
        for i in np.flatnonzero(keep):
            retained[cands[i]] = int(counts[i])
        if counters is not None:
            counters["recon_candidates"] = counters.get("recon_candidates", 0) + ncand
        return keep, rec

    return _mine_levelwise(
        distorted_db,
        sup_min,
        select,
        count_mode=count_mode,
        threads=threads,
        counters=counters,
    )


def reconstructed_support(
    candidate: Itemset, distorted_db: TransactionDatabase, p: float, q: float
) -> float:
    """Estimated true support fraction of one candidate; may be negative."""
    _check_pq(p, q)
    cand = validate_itemset(candidate, distorted_db.num_items)
    subsets = [
        sub
        for size in range(1, len(cand) + 1)
        for sub in itertools.combinations(cand, size)
    ]
    counts = count_all_ones(distorted_db, subsets)
    lookup = dict(zip(subsets, counts))
    cc = combination_counts(cand, lookup, distorted_db.dbsize)
    mat = build_transition_matrix(len(cand), p, q)
    ct = solve_true_counts(mat, cc)
    return float(ct.counts[len(cand)]) / distorted_db.dbsize
