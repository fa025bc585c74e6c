"""Privacy estimates for distorted databases.

Basic privacy is the closed-form complement of an adversary's expected
success at reconstructing a single true 1 from one distorted bit.
Reinterrogation sharpens the attack with the published frequent
itemsets: seeing a frequent itemset inside a distorted row raises the
posterior that its member items were truly set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .apriori import FrequentLattice, Itemset, _MiningIndex
from .corpus import DatasetStats, TransactionDatabase
from .errors import ConfigError, DegenerateInputError


def _check_pq_range(p: float, q: float) -> None:
    if not 0.0 <= p <= 1.0 or not 0.0 <= q <= 1.0:
        raise ConfigError("p and q must lie in [0, 1]")


def reconstruction_prob_item(p: float, q: float, s: float) -> float:
    """Expected probability of correctly reconstructing a true 1 of an
    item with support s, from one distorted bit: sum over the distorted
    bit value of P(seen) * P(true 1 | seen)^2 ... collapsed closed form.
    """
    _check_pq_range(p, q)
    if not 0.0 < s <= 1.0:
        raise ConfigError("item support must lie in (0, 1]")
    num1 = p * p * s
    den1 = s * p + (1.0 - s) * (1.0 - q)
    num2 = (1.0 - p) * (1.0 - p) * s
    den2 = s * (1.0 - p) + (1.0 - s) * q
    if num1 == 0.0:
        t1 = 0.0
    elif den1 == 0.0:
        raise DegenerateInputError("no distorted 1s can occur, posterior undefined")
    else:
        t1 = num1 / den1
    if num2 == 0.0:
        t2 = 0.0
    elif den2 == 0.0:
        raise DegenerateInputError("no distorted 0s can occur, posterior undefined")
    else:
        t2 = num2 / den2
    return t1 + t2


def basic_privacy(
    p: float, q: float, stats: DatasetStats | float, mode: str = "simplified"
) -> float:
    """100 * (1 - reconstruction probability), in percent.

    "simplified" evaluates the closed form at the average support s0
    (stats may be a bare s0 float); "averaged" weights every item's
    reconstruction probability by its support, skipping zero-support
    items.
    """
    s0 = stats.avg_support if isinstance(stats, DatasetStats) else float(stats)
    if mode == "simplified":
        if not 0.0 < s0 <= 1.0:
            raise DegenerateInputError("average support must lie in (0, 1]")
        return 100.0 * (1.0 - reconstruction_prob_item(p, q, s0))
    if mode == "averaged":
        if not isinstance(stats, DatasetStats):
            raise ConfigError("averaged mode needs full DatasetStats")
        sup = np.asarray(stats.item_supports, dtype=float)
        sup = sup[sup > 0.0]
        if sup.size == 0:
            raise DegenerateInputError("all items have zero support")
        r = sum(s * reconstruction_prob_item(p, q, float(s)) for s in sup) / float(
            sup.sum()
        )
        return 100.0 * (1.0 - r)
    raise ConfigError(f"unknown mode {mode!r}")


def privacy_grid(p_values, q_values, s0: float) -> list[tuple[float, float, float]]:
    """(p, q, basic privacy) for every grid point, p-major order."""
    if not 0.0 < s0 <= 1.0:
        raise ConfigError("s0 must lie in (0, 1]")
    out = []
    for p in p_values:
        for q in q_values:
            out.append((float(p), float(q), 100.0 * (1.0 - reconstruction_prob_item(p, q, s0))))
    return out


def _lattice_tids(index: _MiningIndex, lattice: FrequentLattice) -> dict[Itemset, np.ndarray]:
    """Distorted-row index arrays for every stored itemset, reusing
    parents level by level (the lattice is downward closed)."""
    tids: dict[Itemset, np.ndarray] = {}
    for level in sorted(lattice.levels):
        for t in sorted(lattice.levels[level]):
            if level == 1:
                tids[t] = index.item_tid(t[0])
            elif t[:-1] in tids:
                tids[t] = index.narrow(tids[t[:-1]], t[-1])
            else:  # tolerate a non-closed lattice from outside
                tid = index.item_tid(t[0])
                for item in t[1:]:
                    tid = index.narrow(tid, item)
                tids[t] = tid
    return tids


def _check_same_shape(a: TransactionDatabase, b: TransactionDatabase) -> None:
    if a.num_items != b.num_items or a.dbsize != b.dbsize:
        raise ConfigError("original and distorted databases differ in shape")


def breach_table(
    original_db: TransactionDatabase,
    distorted_db: TransactionDatabase,
    lattice: FrequentLattice,
) -> dict[tuple[Itemset, int], float]:
    """For each stored itemset f and item i in f: the percentage of
    distorted rows containing f whose original row truly had i set.
    Itemsets appearing in no distorted row are omitted."""
    _check_same_shape(original_db, distorted_db)
    index = _MiningIndex(distorted_db)
    orig = original_db.to_dense()
    out: dict[tuple[Itemset, int], float] = {}
    for t, tid in _lattice_tids(index, lattice).items():
        if tid.size == 0:
            continue
        cnts = orig[np.ix_(tid, list(t))].sum(axis=0)
        for pos, i in enumerate(t):
            out[(t, i)] = 100.0 * float(cnts[pos]) / tid.size
    return out


def reinterrogated_privacy(
    original_db: TransactionDatabase,
    distorted_db: TransactionDatabase,
    lattice: FrequentLattice,
    bp: float,
) -> float:
    """Average privacy of the true 1s after the mining output is published.

    A 1 keeps basic privacy if its item sits in no published itemset or
    if distortion flipped it off; otherwise the worst breach among
    published itemsets visible in its distorted row caps its privacy.
    Never exceeds bp.
    """
    _check_same_shape(original_db, distorted_db)
    orig = original_db.to_dense()
    ones_per_item = orig.sum(axis=0, dtype=np.int64)
    total_ones = int(ones_per_item.sum())
    if total_ones == 0:
        raise DegenerateInputError("original database has no set bits")
    if len(lattice) == 0:
        return float(bp)

    index = _MiningIndex(distorted_db)
    tids = _lattice_tids(index, lattice)
    by_item: dict[int, list[Itemset]] = {}
    for t in tids:
        for i in t:
            by_item.setdefault(i, []).append(t)

    total = 0.0
    for i in range(original_db.num_items):
        cnt = int(ones_per_item[i])
        if cnt == 0:
            continue
        fs = by_item.get(i)
        if not fs:
            total += cnt * bp
            continue
        otid = np.flatnonzero(orig[:, i])
        max_breach = np.full(cnt, -1.0)  # -1: no published itemset applies
        for f in fs:
            tf = tids[f]
            if tf.size == 0:
                continue
            mask = orig[tf, i]
            hit = tf[mask]
            if hit.size == 0:
                continue
            b = 100.0 * hit.size / tf.size
            np.maximum.at(max_breach, np.searchsorted(otid, hit), b)
        retained = index.dense[otid, i]
        vals = np.where(
            retained & (max_breach >= 0.0),
            np.minimum(bp, 100.0 - max_breach),
            bp,
        )
        total += float(vals.sum())
    return min(total / total_ones, float(bp))


@dataclass(eq=False)
class PrivacyReport:
    bp: float
    rp: float | None = None
    per_item_bp: np.ndarray | None = None
    breaches: dict[tuple[Itemset, int], float] | None = None
