"""Exact level-wise frequent itemset mining.

Counting uses a transposed layout: per-item sorted row-index arrays
narrowed against a dense membership matrix, so the work per candidate
grows with how dense the database is. A row-scan mode is kept for
memory-constrained runs. The same pass engine drives the reconstruction
miner, which only swaps the survivor rule.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Callable, Sequence

import numpy as np

from .corpus import TransactionDatabase, _open
from .errors import ConfigError, EmptyDatabaseError

Itemset = tuple[int, ...]


def validate_itemset(itemset, num_items: int | None = None) -> Itemset:
    t = tuple(int(i) for i in itemset)
    if not t:
        raise ConfigError("itemset must be non-empty")
    if any(b <= a for a, b in zip(t, t[1:])):
        raise ConfigError(f"itemset {t} must be strictly ascending")
    if t[0] < 0 or (num_items is not None and t[-1] >= num_items):
        raise ConfigError(f"itemset {t} has ids outside the schema width")
    return t


@dataclass
class FrequentLattice:
    """Levelled result of a mining run; values are support counts.

    Counts are integers for exact mining and reals for reconstructed
    mining. Every stored itemset meets sup_min and has all its proper
    subsets stored one level down.
    """

    sup_min: float
    dbsize: int
    levels: dict[int, dict[Itemset, float]] = field(default_factory=dict)

    @property
    def max_level(self) -> int:
        return max(self.levels) if self.levels else 0

    def __len__(self) -> int:
        return sum(len(d) for d in self.levels.values())

    def __contains__(self, itemset) -> bool:
        t = tuple(itemset)
        return t in self.levels.get(len(t), {})

    def all_itemsets(self) -> set[Itemset]:
        out: set[Itemset] = set()
        for d in self.levels.values():
            out.update(d)
        return out

    def support(self, itemset) -> float:
        t = tuple(itemset)
        return self.levels[len(t)][t] / self.dbsize

    def support_map(self) -> dict[Itemset, float]:
        return {
            t: c / self.dbsize for d in self.levels.values() for t, c in d.items()
        }

    def to_tsv(self, sink: str | IO, meta: dict | None = None) -> None:
        """level <TAB> comma-joined ids <TAB> support fraction (8 decimals)."""
        with _open(sink, "w") as fh:
            if meta:
                fh.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
            for level in sorted(self.levels):
                for itemset in sorted(self.levels[level]):
                    sup = self.levels[level][itemset] / self.dbsize
                    ids = ",".join(str(i) for i in itemset)
                    fh.write(f"{level}\t{ids}\t{sup:.8f}\n")


def generate_candidates(frequent: Sequence[Itemset]) -> list[Itemset]:
    """Join frequent k-itemsets sharing a (k-1)-prefix, then prune any
    candidate with a missing k-subset. Output is sorted."""
    fs = sorted(set(tuple(int(i) for i in t) for t in frequent))
    if not fs:
        return []
    k = len(fs[0])
    for t in fs:
        if len(t) != k:
            raise ConfigError("mixed arity in candidate generation input")
        validate_itemset(t)
    if k == 1:
        # every 1-subset of a pair is frequent by construction, no prune
        return list(itertools.combinations([t[0] for t in fs], 2))
    fset = set(fs)
    out: list[Itemset] = []
    for prefix, group in itertools.groupby(fs, key=lambda t: t[:-1]):
        tails = [t[-1] for t in group]
        for i, a in enumerate(tails):
            for b in tails[i + 1 :]:
                cand = prefix + (a, b)
                # drop positions other than the two join tails
                if all(
                    cand[:j] + cand[j + 1 :] in fset for j in range(k - 1)
                ):
                    out.append(cand)
    return out


class _MiningIndex:
    """Vertical view of one database: dense membership plus item tids."""

    def __init__(self, db: TransactionDatabase):
        self.dense = db.to_dense()
        self.dbsize = db.dbsize
        self.num_items = db.num_items
        self.item_counts = self.dense.sum(axis=0, dtype=np.int64)

    def item_tid(self, item: int) -> np.ndarray:
        return np.flatnonzero(self.dense[:, item]).astype(np.int32)

    def group_counts(self, tid: np.ndarray, members: np.ndarray) -> np.ndarray:
        if tid.size == 0:
            return np.zeros(len(members), dtype=np.int64)
        return self.dense[np.ix_(tid, members)].sum(axis=0, dtype=np.int64)

    def narrow(self, tid: np.ndarray, item: int) -> np.ndarray:
        return tid[self.dense[tid, item]]


def _group_by_parent(
    cands: Sequence[Itemset],
) -> list[tuple[Itemset, np.ndarray, int]]:
    """Split a sorted candidate list into (parent, tail items, offset) runs."""
    groups = []
    offset = 0
    for parent, group in itertools.groupby(cands, key=lambda t: t[:-1]):
        tails = np.array([t[-1] for t in group], dtype=np.intp)
        groups.append((parent, tails, offset))
        offset += len(tails)
    return groups


def _count_pass(
    index: _MiningIndex,
    tids: dict[Itemset, np.ndarray],
    cands: Sequence[Itemset],
    threads: int = 1,
    counters: dict | None = None,
) -> np.ndarray:
    """All-ones counts for sorted same-arity candidates whose (k-1)-prefix
    parents all have tids. This is the only counting work in a pass; the
    engine is shared verbatim by the exact and the reconstruction miner."""
    groups = _group_by_parent(cands)
    counts = np.empty(len(cands), dtype=np.int64)

    def run(group):
        parent, tails, _ = group
        return index.group_counts(tids[parent], tails)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(run, groups))
    else:
        results = [run(g) for g in groups]
    for (parent, tails, offset), res in zip(groups, results):
        counts[offset : offset + len(tails)] = res
        if counters is not None:
            counters["count_groups"] = counters.get("count_groups", 0) + 1
            counters["count_cells"] = counters.get("count_cells", 0) + len(
                tids[parent]
            ) * len(tails)
    return counts


def _count_rowscan(db: TransactionDatabase, cands: Sequence[Itemset]) -> np.ndarray:
    """Chunked row scan; never materializes the full dense matrix."""
    counts = np.zeros(len(cands), dtype=np.int64)
    for _, dense in db.dense_chunks():
        for j, cand in enumerate(cands):
            counts[j] += int(dense[:, list(cand)].all(axis=1).sum())
    return counts


# survivor rule: (level, candidates, raw counts) -> (keep mask, stored values)
SelectFn = Callable[[int, Sequence[Itemset], np.ndarray], tuple[np.ndarray, np.ndarray]]


def _mine_levelwise(
    db: TransactionDatabase,
    sup_min: float,
    select: SelectFn,
    count_mode: str = "vertical",
    threads: int = 1,
    counters: dict | None = None,
) -> FrequentLattice:
    if not 0.0 < sup_min <= 1.0:
        raise ConfigError("sup_min must lie in (0, 1]")
    if db.dbsize == 0:
        raise EmptyDatabaseError("cannot mine an empty database")
    if count_mode not in ("vertical", "rowscan"):
        raise ConfigError(f"unknown count_mode {count_mode!r}")
    if threads < 1:
        raise ConfigError("threads must be >= 1")

    vertical = count_mode == "vertical"
    index = _MiningIndex(db) if vertical else None
    lattice = FrequentLattice(sup_min=sup_min, dbsize=db.dbsize, levels={})

    cands: list[Itemset] = [(i,) for i in range(db.num_items)]
    if vertical:
        counts = index.item_counts.copy()
        if counters is not None:
            counters["count_cells"] = counters.get("count_cells", 0) + db.dbsize * db.num_items
    else:
        counts = _count_rowscan(db, cands)
    tids: dict[Itemset, np.ndarray] = {}

    level = 1
    while cands:
        keep, values = select(level, cands, counts)
        kept_idx = np.flatnonzero(keep)
        if kept_idx.size == 0:
            break
        survivors = [cands[i] for i in kept_idx]
        lattice.levels[level] = {
            cands[i]: values[i].item() if hasattr(values[i], "item") else values[i]
            for i in kept_idx
        }
        if vertical:
            new_tids: dict[Itemset, np.ndarray] = {}
            for t in survivors:
                if level == 1:
                    new_tids[t] = index.item_tid(t[0])
                else:
                    new_tids[t] = index.narrow(tids[t[:-1]], t[-1])
            tids = new_tids

        cands = generate_candidates(survivors)
        if not cands:
            break
        level += 1
        if counters is not None:
            counters[f"candidates_level_{level}"] = len(cands)
        if vertical:
            counts = _count_pass(index, tids, cands, threads=threads, counters=counters)
        else:
            counts = _count_rowscan(db, cands)
    return lattice


def mine(
    db: TransactionDatabase,
    sup_min: float,
    count_mode: str = "vertical",
    threads: int = 1,
    counters: dict | None = None,
) -> FrequentLattice:
    """All itemsets with support count/dbsize >= sup_min (ties included)."""

    def select(level, cands, counts):
        keep = counts / db.dbsize >= sup_min
        return keep, counts

    return _mine_levelwise(
        db, sup_min, select, count_mode=count_mode, threads=threads, counters=counters
    )


def count_all_ones(
    db: TransactionDatabase,
    candidates: Sequence[Itemset],
    count_mode: str = "vertical",
) -> list[int]:
    """Rows where every item of the candidate is set, per candidate."""
    cands = [validate_itemset(c, db.num_items) for c in candidates]
    if not cands:
        return []
    if count_mode == "rowscan":
        return [int(c) for c in _count_rowscan(db, cands)]
    index = _MiningIndex(db)
    out = []
    for cand in cands:
        tid = index.item_tid(cand[0])
        for item in cand[1:]:
            tid = index.narrow(tid, item)
        out.append(int(tid.size))
    return out
