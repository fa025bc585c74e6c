"""Boolean transaction databases.

Rows are bit-packed (bit j of byte k is item 8*k+j), which is also the
on-disk binary layout. Two interchange formats are supported: a plain
item-list text format and a binary bit-matrix format, plus a synthetic
market-basket generator and per-item statistics.
"""

from __future__ import annotations

import contextlib
import struct
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

import numpy as np

from .errors import ConfigError, EmptyDatabaseError, FormatError

_MAGIC = b"EMB1"
_HEADER = struct.Struct("<4sIQ")  # magic, num_items u32, dbsize u64


def _row_bytes(num_items: int) -> int:
    return (num_items + 7) // 8


class TransactionDatabase:
    """Immutable bit-packed boolean matrix, one row per transaction."""

    def __init__(self, packed: np.ndarray, num_items: int):
        if num_items <= 0:
            raise ConfigError("num_items must be positive")
        packed = np.ascontiguousarray(packed, dtype=np.uint8)
        if packed.ndim != 2 or packed.shape[1] != _row_bytes(num_items):
            raise ConfigError(
                f"packed shape {packed.shape} does not match num_items={num_items}"
            )
        # bits past num_items in the last byte must stay zero so that
        # popcounts and file round trips agree
        tail = num_items % 8
        if tail and packed.shape[0] and int(packed[:, -1].max()) >> tail:
            raise ConfigError("padding bits beyond num_items are set")
        packed.flags.writeable = False
        self._packed = packed
        self._num_items = num_items

    @classmethod
    def from_rows(
        cls, rows: Iterable[Iterable[int]], num_items: int
    ) -> "TransactionDatabase":
        rows = list(rows)
        dense = np.zeros((len(rows), num_items), dtype=bool)
        for r, items in enumerate(rows):
            for it in items:
                if not 0 <= it < num_items:
                    raise ConfigError(f"item id {it} out of range 0..{num_items - 1}")
                dense[r, it] = True
        return cls.from_dense(dense, num_items)

    @classmethod
    def from_dense(cls, dense: np.ndarray, num_items: int | None = None) -> "TransactionDatabase":
        dense = np.asarray(dense, dtype=bool)
        if dense.ndim != 2:
            raise ConfigError("dense matrix must be 2-D")
        if num_items is None:
            num_items = dense.shape[1]
        if dense.shape[1] != num_items:
            raise ConfigError("dense width does not match num_items")
        packed = np.packbits(dense, axis=1, bitorder="little")
        if packed.shape[1] == 0:  # zero-width guard, caught again in __init__
            packed = packed.reshape(dense.shape[0], 0)
        return cls(packed, num_items)

    @property
    def num_items(self) -> int:
        return self._num_items

    @property
    def dbsize(self) -> int:
        return self._packed.shape[0]

    @property
    def packed(self) -> np.ndarray:
        return self._packed

    def __len__(self) -> int:
        return self.dbsize

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TransactionDatabase):
            return NotImplemented
        return self._num_items == other._num_items and np.array_equal(
            self._packed, other._packed
        )

    def __repr__(self) -> str:
        return f"TransactionDatabase(dbsize={self.dbsize}, num_items={self.num_items})"

    def to_dense(self) -> np.ndarray:
        """Unpacked boolean matrix of shape (dbsize, num_items)."""
        if self.dbsize == 0:
            return np.zeros((0, self._num_items), dtype=bool)
        return np.unpackbits(
            self._packed, axis=1, count=self._num_items, bitorder="little"
        ).astype(bool)

    def dense_chunks(self, chunk_rows: int = 8192) -> Iterator[tuple[int, np.ndarray]]:
        for start in range(0, self.dbsize, chunk_rows):
            block = self._packed[start : start + chunk_rows]
            yield start, np.unpackbits(
                block, axis=1, count=self._num_items, bitorder="little"
            ).astype(bool)

    def row_items(self, r: int) -> np.ndarray:
        row = np.unpackbits(self._packed[r], count=self._num_items, bitorder="little")
        return np.flatnonzero(row)


@dataclass(eq=False)
class DatasetStats:
    num_items: int
    dbsize: int
    item_supports: np.ndarray  # fraction of rows containing each item
    avg_support: float
    avg_row_length: float


@dataclass(frozen=True)
class GenParams:
    """Knobs of the synthetic generator (Quest-style T/I/N/L naming)."""

    dbsize: int
    avg_len: float  # T: mean transaction length
    num_items: int  # N: item universe size
    pattern_len: float = 4.0  # I: mean length of a base pattern
    num_patterns: int = 2000  # L: number of base patterns
    seed: int = 0

    def __post_init__(self):
        if self.dbsize <= 0 or self.num_items <= 0 or self.num_patterns <= 0:
            raise ConfigError("dbsize, num_items and num_patterns must be positive")
        if not 0 < self.avg_len <= self.num_items:
            raise ConfigError("avg_len must be in (0, num_items]")
        if not 0 < self.pattern_len <= self.num_items:
            raise ConfigError("pattern_len must be in (0, num_items]")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")


@contextlib.contextmanager
def _open(source, mode: str):
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        kwargs = {"newline": "\n", "encoding": "utf-8"} if "b" not in mode else {}
        with open(source, mode, **kwargs) as fh:
            yield fh
    else:
        yield source


def load_itemlist(
    source: str | IO, num_items: int | None = None, replicate: int = 1
) -> TransactionDatabase:
    """Parse the text format: one transaction per line, space-separated ids.

    Width is taken from `num_items` when given, otherwise inferred as
    max id + 1. `replicate` repeats every row that many times (used to
    scale small real datasets).
    """
    if replicate < 1:
        raise ConfigError("replicate must be >= 1")
    rows: list[list[int]] = []
    max_id = -1
    with _open(source, "r") as fh:
        for lineno, line in enumerate(fh, start=1):
            items: list[int] = []
            for tok in line.split():
                try:
                    it = int(tok)
                except ValueError:
                    raise FormatError(f"line {lineno}: invalid item id {tok!r}") from None
                if it < 0:
                    raise FormatError(f"line {lineno}: negative item id {it}")
                if num_items is not None and it >= num_items:
                    raise FormatError(
                        f"line {lineno}: item id {it} outside declared width {num_items}"
                    )
                items.append(it)
                max_id = max(max_id, it)
            rows.append(items)
    if num_items is None:
        if max_id < 0:
            raise FormatError("cannot infer schema width from a file with no items")
        num_items = max_id + 1
    db = TransactionDatabase.from_rows(rows, num_items)
    if replicate > 1:
        packed = np.repeat(db.packed, replicate, axis=0)
        db = TransactionDatabase(packed, num_items)
    return db


def save_itemlist(db: TransactionDatabase, sink: str | IO) -> None:
    with _open(sink, "w") as fh:
        for r in range(db.dbsize):
            fh.write(" ".join(str(i) for i in db.row_items(r)))
            fh.write("\n")


def load_bitmatrix(source: str | IO, replicate: int = 1) -> TransactionDatabase:
    if replicate < 1:
        raise ConfigError("replicate must be >= 1")
    with _open(source, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise FormatError("truncated bit-matrix header")
        magic, num_items, dbsize = _HEADER.unpack(header)
        if magic != _MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {_MAGIC!r}")
        if num_items == 0:
            raise FormatError("bit-matrix declares zero items")
        nbytes = _row_bytes(num_items) * dbsize
        payload = fh.read(nbytes + 1)
        if len(payload) < nbytes:
            raise FormatError(
                f"truncated bit-matrix payload: expected {nbytes} bytes, got {len(payload)}"
            )
        if len(payload) > nbytes:
            raise FormatError("trailing bytes after bit-matrix payload")
    packed = np.frombuffer(payload, dtype=np.uint8).reshape(dbsize, _row_bytes(num_items))
    try:
        db = TransactionDatabase(packed.copy(), num_items)
    except ConfigError as exc:
        raise FormatError(str(exc)) from None
    if replicate > 1:
        db = TransactionDatabase(np.repeat(db.packed, replicate, axis=0), num_items)
    return db


def save_bitmatrix(db: TransactionDatabase, sink: str | IO) -> None:
    with _open(sink, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, db.num_items, db.dbsize))
        fh.write(db.packed.tobytes())


def sniff_format(source: str) -> str:
    """Return "bitmatrix" or "itemlist" by inspecting the first bytes."""
    with open(source, "rb") as fh:
        head = fh.read(4)
    return "bitmatrix" if head == _MAGIC else "itemlist"


def load_any(source: str, num_items: int | None = None, replicate: int = 1) -> TransactionDatabase:
    if sniff_format(source) == "bitmatrix":
        return load_bitmatrix(source, replicate=replicate)
    return load_itemlist(source, num_items=num_items, replicate=replicate)


def generate_synthetic(params: GenParams) -> TransactionDatabase:
    """Draw a market-basket database from correlated base patterns.

    Pattern lengths are Poisson around pattern_len, transaction lengths
    Poisson around avg_len; consecutive patterns reuse each other's items
    with probability 0.5 and patterns are picked with exponential weights.
    Fully determined by params.seed.
    """
    rng = np.random.default_rng(params.seed)
    n = params.num_items

    patterns: list[list[int]] = []
    prev: list[int] = []
    for _ in range(params.num_patterns):
        length = int(min(max(1, rng.poisson(params.pattern_len)), n))
        items: list[int] = []
        seen: set[int] = set()
        for it in prev:
            if len(items) >= length:
                break
            if rng.random() < 0.5:
                items.append(it)
                seen.add(it)
        while len(items) < length:
            it = int(rng.integers(n))
            if it not in seen:
                items.append(it)
                seen.add(it)
        patterns.append(items)
        prev = items

    weights = rng.exponential(1.0, params.num_patterns)
    cum = np.cumsum(weights)
    cum /= cum[-1]

    lengths = np.minimum(rng.poisson(params.avg_len, params.dbsize), n)
    all_rows: list[list[int]] = []
    for target in lengths:
        target = int(target)
        txn: set[int] = set()
        stalls = 0
        while len(txn) < target and stalls < 8:
            pat = patterns[int(np.searchsorted(cum, rng.random()))]
            before = len(txn)
            for it in pat:
                txn.add(it)
                if len(txn) >= target:
                    break
            if len(txn) == before:
                stalls += 1
        while len(txn) < target:  # rare: patterns alone could not fill the row
            txn.add(int(rng.integers(n)))
        all_rows.append(sorted(txn))

    chunk = 8192
    blocks = []
    for start in range(0, params.dbsize, chunk):
        dense = np.zeros((min(chunk, params.dbsize - start), n), dtype=bool)
        for r, items in enumerate(all_rows[start : start + chunk]):
            dense[r, items] = True
        blocks.append(np.packbits(dense, axis=1, bitorder="little"))
    return TransactionDatabase(np.vstack(blocks), n)


def compute_stats(db: TransactionDatabase) -> DatasetStats:
    if db.dbsize == 0:
        raise EmptyDatabaseError("cannot compute statistics of an empty database")
    counts = np.zeros(db.num_items, dtype=np.int64)
    for _, dense in db.dense_chunks():
        counts += dense.sum(axis=0)
    supports = counts / db.dbsize
    avg_support = float(supports.mean())
    return DatasetStats(
        num_items=db.num_items,
        dbsize=db.dbsize,
        item_supports=supports,
        avg_support=avg_support,
        avg_row_length=avg_support * db.num_items,
    )
