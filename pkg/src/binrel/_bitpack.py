"""Packed little-endian bit arrays plus the rank directory layout.

Bit i of a stream lives in bit ``i % 64`` of word ``i // 64``; words are
little-endian u64, so the serialized byte stream is also the little-endian
byte stream of the bits.  The rank directory stores one u32 cumulative
popcount per 8-word block (512 bits) with a final total entry, costing
6.25% of the payload.
"""

from __future__ import annotations

import sys

import numpy as np

WORD_BITS = 64
BLOCK_WORDS = 8
BLOCK_BITS = WORD_BITS * BLOCK_WORDS

if sys.byteorder != "little":
    raise ImportError("binrel requires a little-endian platform")


def pack_bits(bits) -> tuple[np.ndarray, int]:
    """Pack a 0/1 sequence into u64 words; returns (words, nbits)."""
    arr = np.ascontiguousarray(bits, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("expected a one-dimensional bit sequence")
    if arr.size and arr.max() > 1:
        raise ValueError("bits must be 0 or 1")
    nbits = int(arr.size)
    packed = np.packbits(arr, bitorder="little")
    pad = (-packed.size) % 8
    if pad:
        packed = np.concatenate([packed, np.zeros(pad, np.uint8)])
    return packed.view(np.uint64), nbits


def unpack_bits(words: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Extract bits [lo, hi) of a packed stream as a u8 0/1 array."""
    if hi <= lo:
        return np.zeros(0, np.uint8)
    byte_lo = lo >> 3
    byte_hi = (hi + 7) >> 3
    chunk = words.view(np.uint8)[byte_lo:byte_hi]
    bits = np.unpackbits(chunk, bitorder="little")
    off = lo - (byte_lo << 3)
    return bits[off:off + (hi - lo)]


def words_for(nbits: int) -> int:
    return (nbits + WORD_BITS - 1) // WORD_BITS


def build_rank_blocks(words: np.ndarray) -> np.ndarray:
    """Cumulative popcount before each 8-word block.

    Vectors that fit a single block get an empty directory; rank then
    scans at most 8 words.  This keeps the directory at or under 6.25%
    of the payload for everything larger.
    """
    nwords = len(words)
    if nwords <= BLOCK_WORDS:
        return np.zeros(0, np.uint32)
    nblocks = (nwords + BLOCK_WORDS - 1) // BLOCK_WORDS
    counts = np.bitwise_count(words).astype(np.uint64)
    padded = np.zeros(nblocks * BLOCK_WORDS, np.uint64)
    padded[:nwords] = counts
    per_block = padded.reshape(nblocks, BLOCK_WORDS).sum(axis=1)
    blocks = np.zeros(nblocks, np.uint64)
    np.cumsum(per_block[:-1], out=blocks[1:])
    if int(blocks[-1] + per_block[-1]) >= (1 << 32):
        raise ValueError("bit vector too large for the u32 rank directory")
    return blocks.astype(np.uint32)


def ranks_at(words: np.ndarray, positions) -> np.ndarray:
    """Vectorized rank1: count of 1 bits strictly before each position."""
    pos = np.asarray(positions, np.int64)
    if len(words) == 0 or pos.size == 0:
        return np.zeros(pos.size, np.int64)
    cum = np.zeros(len(words) + 1, np.int64)
    np.cumsum(np.bitwise_count(words).astype(np.int64), out=cum[1:])
    w = pos >> 6
    rem = (pos & 63).astype(np.uint64)
    safe = np.minimum(w, len(words) - 1)
    mask = (np.uint64(1) << rem) - np.uint64(1)
    partial = np.bitwise_count(words[safe] & mask).astype(np.int64)
    partial[w >= len(words)] = 0
    return cum[w] + partial


def tail_is_clean(words: np.ndarray, nbits: int) -> bool:
    """True when bits at positions >= nbits are all zero."""
    nwords = words_for(nbits)
    if len(words) != nwords:
        return False
    rem = nbits & (WORD_BITS - 1)
    if rem and nwords:
        mask = np.uint64((1 << rem) - 1)
        if int(words[-1]) & ~int(mask) & ((1 << 64) - 1):
            return False
    return True
