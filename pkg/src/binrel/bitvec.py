"""Static bit vector with constant-time rank and binary-search select.

Bits are packed into little-endian u64 words; a u32 rank directory with
one cumulative count per 512-bit block accelerates rank1.  Serialization
is the u64 bit length followed by the raw words; the directory is
rebuilt on load and never serialized.
"""

from __future__ import annotations

import struct

import numpy as np

from . import _bitpack, kernels
from .errors import FormatError


class RankBitVector:
    __slots__ = ("nbits", "words", "_blocks", "_ones")

    def __init__(self, words, nbits: int):
        words = np.ascontiguousarray(words, dtype=np.uint64)
        nbits = int(nbits)
        if nbits < 0 or not _bitpack.tail_is_clean(words, nbits):
            raise ValueError("words do not match nbits (wrong length or dirty tail)")
        self.nbits = nbits
        self.words = words
        self._blocks = _bitpack.build_rank_blocks(words)
        self._ones = int(np.bitwise_count(words).sum())

    @classmethod
    def from_bits(cls, bits) -> "RankBitVector":
        words, nbits = _bitpack.pack_bits(bits)
        return cls(words, nbits)

    def __len__(self) -> int:
        return self.nbits

    @property
    def count_ones(self) -> int:
        return self._ones

    def access(self, i: int) -> int:
        if not 0 <= i < self.nbits:
            raise IndexError(f"bit index {i} outside [0, {self.nbits})")
        return (int(self.words[i >> 6]) >> (i & 63)) & 1

    __getitem__ = access

    def rank1(self, i: int) -> int:
        """Number of ones among bits [0, i); i may equal the length."""
        if not 0 <= i <= self.nbits:
            raise IndexError(f"rank position {i} outside [0, {self.nbits}]")
        return kernels.impl.bv_rank1(self.words, self._blocks, int(i))

    def rank0(self, i: int) -> int:
        return i - self.rank1(i)

    def select1(self, j: int) -> int:
        """Position of the j-th one (0-based)."""
        if not 0 <= j < self._ones:
            raise IndexError(f"select index {j} outside [0, {self._ones})")
        return kernels.impl.bv_select1(self.words, self._blocks, int(j))

    def bits(self) -> np.ndarray:
        return _bitpack.unpack_bits(self.words, 0, self.nbits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RankBitVector):
            return NotImplemented
        return self.nbits == other.nbits and bool(np.array_equal(self.words, other.words))

    def __hash__(self):
        return hash((self.nbits, self.words.tobytes()))

    @property
    def payload_nbytes(self) -> int:
        """Serialized size: 8-byte length header plus the words."""
        return 8 + 8 * len(self.words)

    @property
    def directory_nbytes(self) -> int:
        return 4 * len(self._blocks)

    def serialize(self) -> bytes:
        return struct.pack("<Q", self.nbits) + self.words.tobytes()

    @staticmethod
    def read_from(buf, off: int) -> tuple["RankBitVector", int]:
        """Parse a serialized vector starting at `off`; returns (vector, end)."""
        if len(buf) < off + 8:
            raise FormatError("truncated bit vector header")
        (nbits,) = struct.unpack_from("<Q", buf, off)
        nwords = _bitpack.words_for(nbits)
        end = off + 8 + 8 * nwords
        if len(buf) < end:
            raise FormatError("truncated bit vector payload")
        words = np.frombuffer(buf, np.uint64, count=nwords, offset=off + 8).copy()
        try:
            vec = RankBitVector(words, nbits)
        except ValueError as exc:
            raise FormatError(str(exc)) from None
        return vec, end

    @classmethod
    def deserialize(cls, data: bytes) -> "RankBitVector":
        vec, end = cls.read_from(data, 0)
        if end != len(data):
            raise FormatError("trailing bytes after bit vector")
        return vec
