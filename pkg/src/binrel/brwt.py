"""Wavelet-tree structure over the rows of a square binary relation.

The row range [0, n_rows) (padded to a power of two, at least 2) is
bisected per level.  A node covers a row range and a set of active
columns (columns with at least one 1 inside the range; the root covers
every column).  Each node stores two bitmaps of equal width: b_l marks
columns with a 1 in the top half of its rows, b_r the bottom half, and a
column propagates to the left/right child iff the matching bit is 1.
Leaves cover exactly two rows, so leaf bits are cell values.

Nodes are addressed heap-style: node t at level lv owns cursor slots
2*(2^lv - 1 + t) and 2*(2^lv - 1 + t) + 1 (b_l, b_r); the child slot
pairs of slot s start at (s + 1) * 2 and (s + 2) * 2.  A CursorTable
holds one running bit offset per slot so set operations can walk child
columns without rank calls; the rank-navigation variants of the same
operations exist for comparison.  Union is a breadth-first merged scan,
the other three operations are per-root-column depth-first merges.
"""

from __future__ import annotations

import struct

import numpy as np

from . import _bitpack, kernels
from .bitvec import RankBitVector
from .errors import DimensionMismatch, FormatError
from .relation import PlainRelation, RangeQuery, check_range

MAGIC = b"BRWT"

NAVIGATIONS = ("cursor", "rank")


def padded_rows(n: int) -> int:
    rows = 2
    while rows < n:
        rows <<= 1
    return rows


def _build_levels(rel: PlainRelation):
    """Per-level (bits, full-heap widths) arrays for a relation."""
    n = rel.n
    h = padded_rows(n).bit_length() - 1
    xs, ys = rel.pair_arrays()
    rows = xs.astype(np.int64)
    cols = ys.astype(np.int64)
    out = []

    half = (rows >> (h - 1)) & 1
    bl = np.zeros(n, np.uint8)
    br = np.zeros(n, np.uint8)
    bl[cols[half == 0]] = 1
    br[cols[half == 1]] = 1
    out.append((np.concatenate([bl, br]), np.asarray([n], np.uint32)))

    for lv in range(1, h):
        tn = rows >> (h - lv)
        side = (rows >> (h - lv - 1)) & 1
        uk, inv = np.unique((tn << 32) | cols, return_inverse=True)
        bl = np.zeros(uk.size, np.uint8)
        br = np.zeros(uk.size, np.uint8)
        bl[inv[side == 0]] = 1
        br[inv[side == 1]] = 1
        tn_u = (uk >> 32).astype(np.int64)
        widths = np.bincount(tn_u, minlength=1 << lv).astype(np.uint32)
        csum = np.zeros((1 << lv) + 1, np.int64)
        np.cumsum(widths, out=csum[1:])
        i_within = np.arange(uk.size, dtype=np.int64) - csum[tn_u]
        start = 2 * csum[tn_u]
        bits = np.zeros(2 * uk.size, np.uint8)
        bits[start + i_within] = bl
        bits[start + widths[tn_u] + i_within] = br
        out.append((bits, widths))
    return out


def _node_offsets(widths: np.ndarray) -> np.ndarray:
    """Start bit of each node in its level: twice the width prefix sum."""
    offs = np.zeros(widths.size, np.int64)
    np.cumsum(2 * widths[:-1].astype(np.int64), out=offs[1:])
    return offs


def _child_widths(vec: RankBitVector, widths: np.ndarray, offs: np.ndarray) -> np.ndarray:
    """Widths of the next level's full heap: popcounts of each half."""
    w = widths.astype(np.int64)
    pos = np.stack([offs, offs + w, offs + 2 * w], axis=1).ravel()
    r = _bitpack.ranks_at(vec.words, pos).reshape(-1, 3)
    out = np.empty(2 * w.size, np.int64)
    out[0::2] = r[:, 1] - r[:, 0]
    out[1::2] = r[:, 2] - r[:, 1]
    return out


class CursorTable:
    """Mutable per-operation offset cursors, two slots per heap node.

    Slot values are bit positions local to the node's level.  A fresh
    table points every slot at the start of its node half; after a full
    operation each cursor must have advanced once per active column,
    which `check_exhausted` verifies.
    """

    __slots__ = ("tree", "slots")

    def __init__(self, tree: "Brwt"):
        self.tree = tree
        self.slots = tree._cursor_positions(at_end=False)

    @property
    def nbytes(self) -> int:
        return int(self.slots.nbytes)

    def check_exhausted(self) -> None:
        if not np.array_equal(self.slots, self.tree._cursor_positions(at_end=True)):
            raise RuntimeError("cursor conservation violated: a set operation "
                              "advanced some node cursor the wrong number of times")


class Brwt:
    __slots__ = ("n", "n_rows", "h", "_levels", "_offs", "_pack")

    def __init__(self, n, levels, validate: bool = True):
        self.n = int(n)
        self.n_rows = padded_rows(self.n)
        self.h = self.n_rows.bit_length() - 1
        self._levels = levels
        self._offs = [_node_offsets(w) for _, w in levels]
        self._pack = None
        if validate:
            self._validate()

    def _validate(self):
        nlev = len(self._levels)
        if nlev not in (1, self.h):
            raise ValueError("level count must be 1 or log2(n_rows)")
        vec0, w0 = self._levels[0]
        if w0.shape != (1,) or int(w0[0]) != self.n:
            raise ValueError("root node must span every column")
        if nlev == 1 and self.h > 1 and vec0.count_ones:
            raise ValueError("missing levels below a non-empty root")
        for lv in range(nlev):
            vec, widths = self._levels[lv]
            if widths.shape != (1 << lv,):
                raise ValueError(f"level {lv}: expected {1 << lv} width entries")
            if vec.nbits != 2 * int(widths.sum(dtype=np.int64)):
                raise ValueError(f"level {lv}: bitmap length does not match node widths")
            if lv:
                pv, pw = self._levels[lv - 1]
                derived = _child_widths(pv, pw, self._offs[lv - 1])
                if not np.array_equal(derived, widths.astype(np.int64)):
                    raise ValueError(f"level {lv}: node widths disagree with parent bitmaps")

    @property
    def nlevels(self) -> int:
        return len(self._levels)

    # ------------------------------------------------------------ build

    @classmethod
    def build(cls, rel: PlainRelation) -> "Brwt":
        return cls._from_parts(rel.n, _build_levels(rel))

    @classmethod
    def _from_parts(cls, n: int, parts) -> "Brwt":
        # drop trailing all-empty levels (only an empty relation has any)
        last = 0
        for i, (_, w) in enumerate(parts):
            if int(np.asarray(w).sum(dtype=np.int64)):
                last = i
        levels = [(RankBitVector.from_bits(b), np.ascontiguousarray(w, np.uint32))
                  for b, w in parts[:last + 1]]
        return cls(n, levels, validate=False)

    def _kpack(self):
        if self._pack is None:
            nlev = len(self._levels)
            vecs = [vec for vec, _ in self._levels]
            lw_off = np.zeros(nlev + 1, np.int64)
            lb_off = np.zeros(nlev + 1, np.int64)
            for i, vec in enumerate(vecs):
                lw_off[i + 1] = lw_off[i] + len(vec.words)
                lb_off[i + 1] = lb_off[i] + len(vec._blocks)
            fw = (np.concatenate([v.words for v in vecs])
                  if int(lw_off[-1]) else np.zeros(0, np.uint64))
            fb = (np.concatenate([v._blocks for v in vecs])
                  if int(lb_off[-1]) else np.zeros(0, np.uint32))
            lbits = np.asarray([v.nbits for v in vecs], np.int64)
            heap_off = np.zeros(nlev + 1, np.int64)
            for i in range(nlev):
                heap_off[i + 1] = heap_off[i] + (1 << i)
            widths = np.concatenate([w for _, w in self._levels])
            offs = np.concatenate(self._offs)
            self._pack = (fw, fb, lw_off, lb_off, lbits, widths, heap_off,
                          offs, heap_off, nlev, self.n, self.n_rows, self.h)
        return self._pack

    # ------------------------------------------------------------ queries

    def _check_node(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise ValueError(f"node {v} outside [0, {self.n})")

    def is_related(self, x: int, y: int) -> bool:
        self._check_node(x)
        self._check_node(y)
        return bool(kernels.impl.brwt_is_related(self._kpack(), int(x), int(y)))

    def successors(self, x: int) -> np.ndarray:
        self._check_node(x)
        return kernels.impl.brwt_successors(self._kpack(), int(x))

    def predecessors(self, y: int) -> np.ndarray:
        self._check_node(y)
        return kernels.impl.brwt_predecessors(self._kpack(), int(y))

    def range_neighborhood(self, q: RangeQuery) -> np.ndarray:
        check_range(q, self.n)
        return kernels.impl.brwt_range(self._kpack(), q.x1, q.y1, q.x2, q.y2)

    def decode(self) -> PlainRelation:
        if self.n == 0:
            return PlainRelation.empty(0)
        pairs = kernels.impl.brwt_range(self._kpack(), 0, 0, self.n - 1, self.n - 1)
        return PlainRelation.from_sorted_pairs(self.n, pairs[:, 0], pairs[:, 1])

    # ------------------------------------------------------------ set ops

    def cursor_table(self) -> CursorTable:
        return CursorTable(self)

    def _cursor_positions(self, at_end: bool) -> np.ndarray:
        slots = np.zeros(2 * ((1 << self.h) - 1), np.uint32)
        for lv in range(len(self._levels)):
            w = self._levels[lv][1].astype(np.int64)
            offs = self._offs[lv]
            idx = 2 * ((1 << lv) - 1) + 2 * np.arange(1 << lv, dtype=np.int64)
            if at_end:
                slots[idx] = offs + w
                slots[idx + 1] = offs + 2 * w
            else:
                slots[idx] = offs
                slots[idx + 1] = offs + w
        return slots

    def _check_compat(self, other) -> None:
        if type(other) is not Brwt:
            raise DimensionMismatch("cannot combine different structure kinds")
        if self.n != other.n:
            raise DimensionMismatch(f"universe mismatch: {self.n} != {other.n}")

    def union(self, other: "Brwt") -> "Brwt":
        self._check_compat(other)
        parts = kernels.impl.brwt_union(self._kpack(), other._kpack())
        return Brwt._from_parts(self.n, parts)

    def _setop(self, other, op: int, navigation: str) -> "Brwt":
        self._check_compat(other)
        if navigation == "cursor":
            pa = self.cursor_table()
            pb = other.cursor_table()
            parts = kernels.impl.brwt_setop_cursor(op, self._kpack(), other._kpack(),
                                                   pa.slots, pb.slots)
            pa.check_exhausted()
            pb.check_exhausted()
        elif navigation == "rank":
            parts = kernels.impl.brwt_setop_rank(op, self._kpack(), other._kpack())
        else:
            raise ValueError(f"unknown navigation {navigation!r}; expected 'cursor' or 'rank'")
        return Brwt._from_parts(self.n, parts)

    def intersection(self, other: "Brwt", navigation: str = "cursor") -> "Brwt":
        return self._setop(other, kernels.OP_INTER, navigation)

    def difference(self, other: "Brwt", navigation: str = "cursor") -> "Brwt":
        return self._setop(other, kernels.OP_DIFF, navigation)

    def symmetric_difference(self, other: "Brwt", navigation: str = "cursor") -> "Brwt":
        return self._setop(other, kernels.OP_SYMDIFF, navigation)

    # ------------------------------------------------------------ size + io

    def _live_widths(self, lv: int) -> np.ndarray:
        widths = self._levels[lv][1]
        if lv == 0:
            return widths
        return widths[widths > 0]

    def size_in_bytes(self) -> int:
        total = 4 + 4 + 4 + 2
        for lv in range(len(self._levels)):
            vec = self._levels[lv][0]
            total += 4 + 4 * int(self._live_widths(lv).size) + vec.payload_nbytes
        return total

    def serialize(self) -> bytes:
        parts = [MAGIC, struct.pack("<IIH", self.n, self.n_rows, len(self._levels))]
        for lv in range(len(self._levels)):
            live = self._live_widths(lv)
            parts.append(struct.pack("<I", live.size))
            parts.append(live.astype("<u4").tobytes())
            parts.append(self._levels[lv][0].serialize())
        return b"".join(parts)

    @classmethod
    def deserialize(cls, data: bytes) -> "Brwt":
        if data[:4] != MAGIC:
            raise FormatError("bad magic for Brwt")
        if len(data) < 14:
            raise FormatError("truncated header")
        n, n_rows, nlev = struct.unpack_from("<IIH", data, 4)
        if n_rows != padded_rows(n):
            raise FormatError("padded row count does not match the universe size")
        h = n_rows.bit_length() - 1
        if nlev not in (1, h):
            raise FormatError("level count must be 1 or log2(n_rows)")
        off = 14
        levels = []
        prev = None
        for lv in range(nlev):
            if len(data) < off + 4:
                raise FormatError(f"level {lv}: truncated node count")
            (count,) = struct.unpack_from("<I", data, off)
            off += 4
            if len(data) < off + 4 * count:
                raise FormatError(f"level {lv}: truncated width list")
            live = np.frombuffer(data, "<u4", count=count, offset=off).astype(np.int64)
            off += 4 * count
            vec, off = RankBitVector.read_from(data, off)
            if lv == 0:
                if count != 1 or int(live[0]) != n:
                    raise FormatError("root node must span every column")
                widths = live.astype(np.uint32)
            else:
                pv, pw = prev
                derived = _child_widths(pv, pw, _node_offsets(pw))
                if int((derived > 0).sum()) != count or \
                        not np.array_equal(derived[derived > 0], live):
                    raise FormatError(f"level {lv}: node widths disagree with parent bitmaps")
                widths = derived.astype(np.uint32)
            if vec.nbits != 2 * int(widths.sum(dtype=np.int64)):
                raise FormatError(f"level {lv}: bitmap length does not match node widths")
            levels.append((vec, widths))
            prev = (vec, widths)
        if off != len(data):
            raise FormatError("trailing bytes after structure payload")
        if nlev == 1 and h > 1 and levels[0][0].count_ones:
            raise FormatError("missing levels below a non-empty root")
        return cls(n, levels, validate=False)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.serialize())

    @classmethod
    def load(cls, path) -> "Brwt":
        with open(path, "rb") as fh:
            return cls.deserialize(fh.read())

    def __eq__(self, other) -> bool:
        if type(other) is not Brwt:
            return NotImplemented
        if self.n != other.n or len(self._levels) != len(other._levels):
            return False
        return all(a[0] == b[0] and bool(np.array_equal(a[1], b[1]))
                   for a, b in zip(self._levels, other._levels))

    def __hash__(self):
        return hash((self.n, tuple(vec for vec, _ in self._levels)))

    def __repr__(self):
        bits = sum(vec.nbits for vec, _ in self._levels)
        return f"Brwt(n={self.n}, rows={self.n_rows}, levels={len(self._levels)}, bits={bits})"


def build_brwt(rel: PlainRelation) -> Brwt:
    return Brwt.build(rel)
