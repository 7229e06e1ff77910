"""Gap-and-run compressed adjacency lists with per-row Rice coding.

Each row is encoded independently.  The first column id is kept
absolute; every later gap g >= 1 is encoded as g - 1, except that a
maximal run of r consecutive gap-1 steps becomes the marker value 0
followed by the run length r.  Symbols are Rice codes (unary quotient,
that many 1 bits then a 0, followed by the k low bits) with a per-row
parameter k in [0, 16] chosen by exhaustive scan for the smallest
encoded size, ties to the smaller k.  A row's payload starts with the
5-bit k and a varint degree (1 continuation bit then 7 value bits per
group, low groups first); empty rows occupy no payload bits at all.

Successors decode one row; predecessors deliberately decode every row
(a full scan), which is the structural weakness this representation
trades for its row-access speed.  Set operations decode both inputs row
by row, merge the sorted lists, and re-encode, so results are always in
canonical encoded form.
"""

from __future__ import annotations

import struct

import numpy as np

from . import _bitpack, kernels
from .errors import DimensionMismatch, FormatError
from .relation import PlainRelation, RangeQuery, check_range

MAGIC = b"RRUN"


class RiceRuns:
    __slots__ = ("n", "offsets", "words", "_pack")

    def __init__(self, n, offsets, words, validate: bool = True):
        self.n = int(n)
        self.offsets = np.ascontiguousarray(offsets, dtype=np.uint64)
        self.words = np.ascontiguousarray(words, dtype=np.uint64)
        self._pack = None
        if validate:
            self._validate()

    def _validate(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.offsets.shape != (self.n + 1,):
            raise ValueError("offsets must have n+1 entries")
        if self.offsets[0] != 0:
            raise ValueError("offsets must start at 0")
        if np.any(np.diff(self.offsets.astype(np.int64)) < 0):
            raise ValueError("offsets must be non-decreasing")
        nbits = int(self.offsets[-1])
        if not _bitpack.tail_is_clean(self.words, nbits):
            raise ValueError("payload words do not match the final offset")

    def _kpack(self):
        if self._pack is None:
            self._pack = (self.words, self.offsets, self.n)
        return self._pack

    # ------------------------------------------------------------ build

    @classmethod
    def encode(cls, rel: PlainRelation) -> "RiceRuns":
        offsets, words = kernels.impl.rice_encode(rel.cols, rel.indptr, rel.n)
        return cls(rel.n, offsets, words, validate=False)

    # ------------------------------------------------------------ queries

    def _check_node(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise ValueError(f"node {v} outside [0, {self.n})")

    def _kernel(self, fn, *args):
        try:
            return fn(self._kpack(), *args)
        except ValueError as exc:
            raise FormatError(str(exc)) from None

    def decode_row(self, x: int) -> np.ndarray:
        self._check_node(x)
        return self._kernel(kernels.impl.rice_successors, int(x))

    def is_related(self, x: int, y: int) -> bool:
        self._check_node(x)
        self._check_node(y)
        return bool(self._kernel(kernels.impl.rice_is_related, int(x), int(y)))

    def successors(self, x: int) -> np.ndarray:
        return self.decode_row(x)

    def predecessors(self, y: int) -> np.ndarray:
        self._check_node(y)
        return self._kernel(kernels.impl.rice_predecessors, int(y))

    def range_neighborhood(self, q: RangeQuery) -> np.ndarray:
        check_range(q, self.n)
        return self._kernel(kernels.impl.rice_range, q.x1, q.y1, q.x2, q.y2)

    def decode(self) -> PlainRelation:
        if self.n == 0:
            return PlainRelation.empty(0)
        pairs = self._kernel(kernels.impl.rice_range, 0, 0, self.n - 1, self.n - 1)
        return PlainRelation.from_sorted_pairs(self.n, pairs[:, 0], pairs[:, 1])

    # ------------------------------------------------------------ set ops

    def _setop(self, other, op: int) -> "RiceRuns":
        if type(other) is not RiceRuns:
            raise DimensionMismatch("cannot combine different structure kinds")
        if self.n != other.n:
            raise DimensionMismatch(f"universe mismatch: {self.n} != {other.n}")
        try:
            offsets, words = kernels.impl.rice_setop(op, self._kpack(), other._kpack())
        except ValueError as exc:
            raise FormatError(str(exc)) from None
        return RiceRuns(self.n, offsets, words, validate=False)

    def union(self, other):
        return self._setop(other, kernels.OP_UNION)

    def intersection(self, other):
        return self._setop(other, kernels.OP_INTER)

    def difference(self, other):
        return self._setop(other, kernels.OP_DIFF)

    def symmetric_difference(self, other):
        return self._setop(other, kernels.OP_SYMDIFF)

    # ------------------------------------------------------------ size + io

    def size_in_bytes(self) -> int:
        return 4 + 4 + 8 * (self.n + 1) + 8 + 8 * len(self.words)

    def serialize(self) -> bytes:
        nbits = int(self.offsets[-1])
        return b"".join([
            MAGIC,
            struct.pack("<I", self.n),
            self.offsets.astype("<u8").tobytes(),
            struct.pack("<Q", nbits),
            self.words.tobytes(),
        ])

    @classmethod
    def deserialize(cls, data: bytes) -> "RiceRuns":
        if data[:4] != MAGIC:
            raise FormatError("bad magic for RiceRuns")
        if len(data) < 8:
            raise FormatError("truncated header")
        (n,) = struct.unpack_from("<I", data, 4)
        off = 8
        if len(data) < off + 8 * (n + 1):
            raise FormatError("truncated offset table")
        offsets = np.frombuffer(data, "<u8", count=n + 1, offset=off).copy()
        off += 8 * (n + 1)
        if len(data) < off + 8:
            raise FormatError("truncated payload header")
        (nbits,) = struct.unpack_from("<Q", data, off)
        off += 8
        nwords = _bitpack.words_for(nbits)
        if len(data) != off + 8 * nwords:
            raise FormatError("payload length does not match its bit count")
        words = np.frombuffer(data, np.uint64, count=nwords, offset=off).copy()
        if nbits != int(offsets[-1]):
            raise FormatError("payload bit count disagrees with the offset table")
        try:
            return cls(n, offsets, words)
        except ValueError as exc:
            raise FormatError(str(exc)) from None

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.serialize())

    @classmethod
    def load(cls, path) -> "RiceRuns":
        with open(path, "rb") as fh:
            return cls.deserialize(fh.read())

    def __eq__(self, other) -> bool:
        if type(other) is not RiceRuns:
            return NotImplemented
        return (self.n == other.n
                and bool(np.array_equal(self.offsets, other.offsets))
                and bool(np.array_equal(self.words, other.words)))

    def __hash__(self):
        return hash((self.n, self.offsets.tobytes(), self.words.tobytes()))

    def __repr__(self):
        return f"RiceRuns(n={self.n}, payload_bits={int(self.offsets[-1])})"


def encode_rice(rel: PlainRelation) -> RiceRuns:
    return RiceRuns.encode(rel)
