"""Plain adjacency-list relation: the reference implementation and the
serialized interchange format.

A binary relation over [0, n) x [0, n) is stored CSR-style: `indptr`
(n+1 entries) slices `cols` into per-row strictly increasing column-id
lists.  Every compressed structure decodes back to this type, and its
query/set-op results serve as the oracle the compressed structures are
checked against.

File format: magic "BRADJ1", u32 n, then per row a u32 degree followed
by that many u32 column ids; all integers little-endian.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, FormatError

MAGIC = b"BRADJ1"


@dataclass(frozen=True)
class RangeQuery:
    """Closed rectangle [x1, x2] x [y1, y2]."""

    x1: int
    y1: int
    x2: int
    y2: int

    def __post_init__(self):
        if not (0 <= self.x1 <= self.x2 and 0 <= self.y1 <= self.y2):
            raise ValueError("range corners must satisfy 0 <= x1 <= x2 and 0 <= y1 <= y2")


def check_range(q: RangeQuery, n: int) -> None:
    if q.x2 >= n or q.y2 >= n:
        raise ValueError(f"range exceeds universe [0, {n})")


class PlainRelation:
    __slots__ = ("n", "indptr", "cols")

    def __init__(self, n: int, indptr, cols, validate: bool = True):
        self.n = int(n)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.cols = np.ascontiguousarray(cols, dtype=np.uint32)
        if validate:
            self._validate()

    def _validate(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.indptr.shape != (self.n + 1,):
            raise ValueError("indptr must have n+1 entries")
        if self.indptr[0] != 0 or self.indptr[-1] != self.cols.size:
            raise ValueError("indptr must start at 0 and end at len(cols)")
        if np.any(np.diff(self.indptr) < 0):
            raise ValueError("indptr must be non-decreasing")
        if self.cols.size:
            if int(self.cols.max()) >= self.n:
                raise ValueError("column id out of range")
            d = np.diff(self.cols.astype(np.int64))
            mask = np.ones(d.size, bool)
            bounds = self.indptr[1:self.n]
            bounds = bounds[(bounds >= 1) & (bounds <= d.size)]
            mask[bounds - 1] = False
            if np.any(d[mask] <= 0):
                raise ValueError("row columns must be strictly increasing")

    # ------------------------------------------------------------ builders

    @classmethod
    def empty(cls, n: int) -> "PlainRelation":
        return cls(n, np.zeros(n + 1, np.int64), np.zeros(0, np.uint32), validate=False)

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "PlainRelation":
        arr = np.asarray(pairs, np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError("pair ids must lie in [0, n)")
        if arr.shape[0] == 0:
            return cls.empty(n)
        codes = arr[:, 0] * n + arr[:, 1]
        codes = np.sort(codes)
        if np.any(np.diff(codes) == 0):
            raise ValueError("duplicate pair")
        return cls._from_codes(n, codes)

    @classmethod
    def _from_codes(cls, n: int, codes) -> "PlainRelation":
        # codes: sorted, unique x*n+y values
        if n == 0 or codes.size == 0:
            return cls.empty(n)
        xs = codes // n
        ys = (codes - xs * n).astype(np.uint32)
        counts = np.bincount(xs, minlength=n)
        indptr = np.zeros(n + 1, np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(n, indptr, ys, validate=False)

    @classmethod
    def from_sorted_pairs(cls, n: int, xs, ys) -> "PlainRelation":
        """Fast path for already (x, y)-sorted unique pair arrays."""
        xs = np.asarray(xs, np.int64)
        counts = np.bincount(xs, minlength=n)
        indptr = np.zeros(n + 1, np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(n, indptr, np.asarray(ys, np.uint32), validate=False)

    @classmethod
    def from_rows(cls, n: int, rows) -> "PlainRelation":
        parts = [np.asarray(r, np.uint32) for r in rows]
        if len(parts) != n:
            raise ValueError("expected one row per node")
        sizes = np.asarray([p.size for p in parts], np.int64)
        indptr = np.zeros(n + 1, np.int64)
        np.cumsum(sizes, out=indptr[1:])
        cols = np.concatenate(parts) if parts else np.zeros(0, np.uint32)
        return cls(n, indptr, cols)

    # ------------------------------------------------------------ accessors

    @property
    def m(self) -> int:
        return int(self.cols.size)

    def density(self) -> float:
        return self.m / (self.n * self.n) if self.n else 0.0

    def row(self, x: int) -> np.ndarray:
        return self.cols[int(self.indptr[x]):int(self.indptr[x + 1])]

    def pair_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        xs = np.repeat(np.arange(self.n, dtype=np.uint32), np.diff(self.indptr))
        return xs, self.cols.copy()

    def to_pairs(self) -> np.ndarray:
        xs, ys = self.pair_arrays()
        return np.stack([xs, ys], axis=1)

    def _codes(self) -> np.ndarray:
        xs = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        return xs * self.n + self.cols

    # ------------------------------------------------------------ queries

    def _check_node(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise ValueError(f"node {v} outside [0, {self.n})")

    def is_related(self, x: int, y: int) -> bool:
        self._check_node(x)
        self._check_node(y)
        r = self.row(x)
        i = int(np.searchsorted(r, y))
        return bool(i < r.size and int(r[i]) == y)

    def successors(self, x: int) -> np.ndarray:
        self._check_node(x)
        return self.row(x)

    def predecessors(self, y: int) -> np.ndarray:
        self._check_node(y)
        pos = np.flatnonzero(self.cols == y)
        return (np.searchsorted(self.indptr, pos, side="right") - 1).astype(np.uint32)

    def range_neighborhood(self, q: RangeQuery) -> np.ndarray:
        check_range(q, self.n)
        lo = int(self.indptr[q.x1])
        hi = int(self.indptr[q.x2 + 1])
        cs = self.cols[lo:hi]
        rows = np.repeat(np.arange(q.x1, q.x2 + 1, dtype=np.uint32),
                         np.diff(self.indptr[q.x1:q.x2 + 2]))
        mask = (cs >= q.y1) & (cs <= q.y2)
        return np.stack([rows[mask], cs[mask]], axis=1)

    # ------------------------------------------------------------ set ops

    def _combine(self, other: "PlainRelation", fn) -> "PlainRelation":
        if not isinstance(other, PlainRelation):
            raise DimensionMismatch("can only combine with another plain relation")
        if self.n != other.n:
            raise DimensionMismatch(f"universe mismatch: {self.n} != {other.n}")
        return PlainRelation._from_codes(self.n, fn(self._codes(), other._codes()))

    def union(self, other):
        return self._combine(other, np.union1d)

    def intersection(self, other):
        return self._combine(other, np.intersect1d)

    def difference(self, other):
        return self._combine(other, np.setdiff1d)

    def symmetric_difference(self, other):
        return self._combine(other, np.setxor1d)

    # ------------------------------------------------------------ file format

    def to_bytes(self) -> bytes:
        head = MAGIC + struct.pack("<I", self.n)
        degrees = np.diff(self.indptr).astype("<u4")
        if self.m:
            body = np.insert(self.cols.astype("<u4"), self.indptr[:-1], degrees)
        else:
            body = degrees
        return head + body.tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "PlainRelation":
        if data[:len(MAGIC)] != MAGIC:
            raise FormatError("bad magic for adjacency-list file")
        off = len(MAGIC)
        if len(data) < off + 4:
            raise FormatError("truncated header")
        (n,) = struct.unpack_from("<I", data, off)
        off += 4
        if (len(data) - off) % 4:
            raise FormatError("payload is not a whole number of u32 words")
        payload = np.frombuffer(data, "<u4", offset=off)
        rows = []
        pos = 0
        for x in range(n):
            if pos >= payload.size:
                raise FormatError(f"row {x}: truncated degree")
            deg = int(payload[pos])
            pos += 1
            if pos + deg > payload.size:
                raise FormatError(f"row {x}: truncated id list")
            ids = payload[pos:pos + deg]
            pos += deg
            if deg:
                if int(ids.max()) >= n:
                    raise FormatError(f"row {x}: id out of range")
                if deg > 1 and np.any(np.diff(ids.astype(np.int64)) <= 0):
                    raise FormatError(f"row {x}: ids not strictly increasing")
            rows.append(ids.astype(np.uint32))
        if pos != payload.size or len(data) - off != 4 * payload.size:
            raise FormatError("trailing bytes after last row")
        sizes = np.asarray([r.size for r in rows], np.int64)
        indptr = np.zeros(n + 1, np.int64)
        np.cumsum(sizes, out=indptr[1:])
        cols = np.concatenate(rows) if rows else np.zeros(0, np.uint32)
        return cls(n, indptr, cols, validate=False)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "PlainRelation":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())

    def size_in_bytes(self) -> int:
        return len(MAGIC) + 4 + 4 * (self.n + self.m)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PlainRelation):
            return NotImplemented
        return (self.n == other.n
                and bool(np.array_equal(self.indptr, other.indptr))
                and bool(np.array_equal(self.cols, other.cols)))

    def __hash__(self):
        return hash((self.n, self.cols.tobytes(), self.indptr.tobytes()))

    def __repr__(self):
        return f"PlainRelation(n={self.n}, m={self.m})"
