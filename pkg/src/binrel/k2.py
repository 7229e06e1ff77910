"""Quadtree bitmap structures for square binary relations.

The matrix is padded to a power-of-two side (at least 4) and subdivided
into 2x2 quadrants per level, quadrants ordered row-major (top-left,
top-right, bottom-left, bottom-right).  Internal levels live in bitmap T
(bit 1 = subdivided further), the final cell level in bitmap L.  The
children of the 1 bit at position p start at rank1(T, p+1)*4, counting
positions through T and then L.

K2Tree stores a 0 for every empty block.  K2TreeOnes additionally lets a
0 cover an all-ones block: a third bitmap U holds one flag per 0 bit
(1 = all ones, 0 = empty), ordered the same way as the zeros they
annotate, T zeros first, then L zeros (always flagged 0).
"""

from __future__ import annotations

import struct

import numpy as np

from . import kernels
from .bitvec import RankBitVector
from .errors import DimensionMismatch, FormatError
from .relation import PlainRelation, RangeQuery, check_range


def padded_side(n: int) -> int:
    side = 4
    while side < n:
        side <<= 1
    return side


def _level_bits(xs, ys, n_padded: int, height: int, ones_variant: bool):
    """Level-order bitmaps for a pair set: (internal bits, cell bits,
    uniform flags or None)."""
    m = int(xs.size)
    code = np.zeros(m, np.int64)
    xs = xs.astype(np.int64)
    ys = ys.astype(np.int64)
    for s in range(height):
        d = (((xs >> s) & 1) << 1) | ((ys >> s) & 1)
        code |= d << (2 * s)
    code = np.sort(code)
    t_parts = []
    u_parts = []
    l_bits = np.zeros(0, np.uint8)
    parents = None
    alive = code
    for level in range(1, height + 1):
        shift = 2 * (height - level)
        pref = alive >> shift
        uniq, counts = np.unique(pref, return_counts=True)
        if parents is None:
            slots = 4
            pos = uniq
        else:
            slots = 4 * parents.size
            pos = np.searchsorted(parents, uniq >> 2) * 4 + (uniq & 3)
        if level == height:
            bits = np.zeros(slots, np.uint8)
            bits[pos] = 1
            l_bits = bits
            break
        side = n_padded >> level
        if ones_variant:
            full = counts == side * side
        else:
            full = np.zeros(uniq.size, bool)
        bits = np.zeros(slots, np.uint8)
        bits[pos[~full]] = 1
        t_parts.append(bits)
        if ones_variant:
            uf = np.zeros(slots, np.uint8)
            uf[pos[full]] = 1
            u_parts.append(uf[bits == 0])
            if full.any():
                dead = uniq[full]
                di = np.minimum(np.searchsorted(dead, pref), dead.size - 1)
                alive = alive[dead[di] != pref]
        parents = uniq[~full]
    t_bits = np.concatenate(t_parts)
    u_all = None
    if ones_variant:
        u_parts.append(np.zeros(int((l_bits == 0).sum()), np.uint8))
        u_all = np.concatenate(u_parts)
    return t_bits, l_bits, u_all


class _K2Base:
    __slots__ = ("n", "n_padded", "height", "T", "L", "U", "_t_off", "_u_off", "_pack")
    _magic = b""
    _ones_variant = False

    def __init__(self, n, T, L, U=None):
        self.n = int(n)
        self.n_padded = padded_side(self.n)
        self.height = self.n_padded.bit_length() - 1
        self.T = T
        self.L = L
        self.U = U
        self._pack = None
        self._t_off = None
        self._u_off = None
        self._index()

    def _index(self):
        """Derive per-level offsets and validate the level structure."""
        h = self.height
        t_off = np.zeros(h + 1, np.int64)
        cur_len = 4
        for lv in range(1, h):
            end = int(t_off[lv]) + cur_len
            if end > self.T.nbits:
                raise ValueError("internal bitmap shorter than its level structure")
            cur_len = 4 * (self.T.rank1(end) - self.T.rank1(int(t_off[lv])))
            t_off[lv + 1] = end
        if int(t_off[h]) != self.T.nbits:
            raise ValueError("internal bitmap longer than its level structure")
        if cur_len != self.L.nbits:
            raise ValueError("cell bitmap length does not match the last internal level")
        self._t_off = t_off
        if self._ones_variant:
            if self.U is None:
                raise ValueError("uniform-ones variant requires the flag bitmap")
            zeros = (self.T.nbits - self.T.count_ones) + (self.L.nbits - self.L.count_ones)
            if self.U.nbits != zeros:
                raise ValueError("flag bitmap must hold one bit per zero")
            u_off = np.zeros(h + 1, np.int64)
            for lv in range(1, h + 1):
                p = int(t_off[lv]) if lv < h else self.T.nbits
                u_off[lv] = p - self.T.rank1(p)
            self._u_off = u_off
        elif self.U is not None:
            raise ValueError("plain variant must not carry a flag bitmap")

    def _kpack(self):
        if self._pack is None:
            u = self.U
            self._pack = (
                self.T.words, self.T._blocks, self.T.nbits,
                self.L.words, self.L.nbits,
                None if u is None else u.words,
                0 if u is None else u.nbits,
                self.height, self.n_padded,
                self._t_off,
                self._u_off,
            )
        return self._pack

    # ------------------------------------------------------------ build

    @classmethod
    def build(cls, rel: PlainRelation):
        xs, ys = rel.pair_arrays()
        npad = padded_side(rel.n)
        height = npad.bit_length() - 1
        t, l, u = _level_bits(xs, ys, npad, height, cls._ones_variant)
        return cls(
            rel.n,
            RankBitVector.from_bits(t),
            RankBitVector.from_bits(l),
            RankBitVector.from_bits(u) if u is not None else None,
        )

    # ------------------------------------------------------------ queries

    def _check_node(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise ValueError(f"node {v} outside [0, {self.n})")

    def is_related(self, x: int, y: int) -> bool:
        self._check_node(x)
        self._check_node(y)
        return bool(kernels.impl.k2_is_related(self._kpack(), int(x), int(y)))

    def successors(self, x: int) -> np.ndarray:
        self._check_node(x)
        return kernels.impl.k2_successors(self._kpack(), int(x))

    def predecessors(self, y: int) -> np.ndarray:
        self._check_node(y)
        return kernels.impl.k2_predecessors(self._kpack(), int(y))

    def range_neighborhood(self, q: RangeQuery) -> np.ndarray:
        check_range(q, self.n)
        return kernels.impl.k2_range(self._kpack(), q.x1, q.y1, q.x2, q.y2)

    def decode(self) -> PlainRelation:
        if self.n == 0:
            return PlainRelation.empty(0)
        pairs = kernels.impl.k2_range(self._kpack(), 0, 0, self.n - 1, self.n - 1)
        return PlainRelation.from_sorted_pairs(self.n, pairs[:, 0], pairs[:, 1])

    # ------------------------------------------------------------ set ops

    def _setop(self, other, op: int):
        if type(other) is not type(self):
            raise DimensionMismatch("cannot combine different structure kinds")
        if self.n != other.n:
            raise DimensionMismatch(f"universe mismatch: {self.n} != {other.n}")
        cls = type(self)
        if op == kernels.OP_UNION and not self._ones_variant:
            t, l = kernels.impl.k2_union_plain(self._kpack(), other._kpack())
            u = None
        else:
            t, l, u = kernels.impl.k2_setop(op, self._kpack(), other._kpack())
        if u is not None:
            u = np.concatenate([u, np.zeros(int((l == 0).sum()), np.uint8)])
        return cls(
            self.n,
            RankBitVector.from_bits(t),
            RankBitVector.from_bits(l),
            RankBitVector.from_bits(u) if u is not None else None,
        )

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
        total = 4 + 9 + self.T.payload_nbytes + self.L.payload_nbytes
        if self.U is not None:
            total += self.U.payload_nbytes
        return total

    def serialize(self) -> bytes:
        parts = [self._magic, struct.pack("<IIB", self.n, self.n_padded, self.height),
                 self.T.serialize(), self.L.serialize()]
        if self.U is not None:
            parts.append(self.U.serialize())
        return b"".join(parts)

    @classmethod
    def deserialize(cls, data: bytes):
        if data[:4] != cls._magic:
            raise FormatError(f"bad magic for {cls.__name__}")
        if len(data) < 13:
            raise FormatError("truncated header")
        n, npad, height = struct.unpack_from("<IIB", data, 4)
        if npad != padded_side(n) or height != npad.bit_length() - 1:
            raise FormatError("padded size does not match the universe size")
        off = 13
        T, off = RankBitVector.read_from(data, off)
        L, off = RankBitVector.read_from(data, off)
        U = None
        if cls._ones_variant:
            U, off = RankBitVector.read_from(data, off)
        if off != len(data):
            raise FormatError("trailing bytes after structure payload")
        try:
            return cls(n, T, L, U)
        except ValueError as exc:
            raise FormatError(str(exc)) from None

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.serialize())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            return cls.deserialize(fh.read())

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return (self.n == other.n and self.T == other.T and self.L == other.L
                and self.U == other.U)

    def __hash__(self):
        return hash((self.n, self.T, self.L, self.U))

    def __repr__(self):
        return (f"{type(self).__name__}(n={self.n}, side={self.n_padded}, "
                f"internal={self.T.nbits}b, cells={self.L.nbits}b)")


class K2Tree(_K2Base):
    __slots__ = ()
    _magic = b"K2T1"
    _ones_variant = False


class K2TreeOnes(_K2Base):
    __slots__ = ()
    _magic = b"K2O1"
    _ones_variant = True


def build_k2(rel: PlainRelation) -> K2Tree:
    return K2Tree.build(rel)


def build_k2ones(rel: PlainRelation) -> K2TreeOnes:
    return K2TreeOnes.build(rel)
