"""Rank/select bit vector checked against a brute-force oracle."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from binrel.bitvec import RankBitVector
from binrel.errors import FormatError

bit_lists = st.lists(st.integers(0, 1), max_size=2500)


def naive_rank1(bits, i):
    return sum(bits[:i])


def naive_select1(bits, j):
    seen = -1
    for pos, b in enumerate(bits):
        seen += b
        if seen == j:
            return pos
    raise IndexError(j)


@given(bit_lists)
def test_access_matches_input(bits):
    v = RankBitVector.from_bits(bits)
    assert len(v) == len(bits)
    assert v.bits().tolist() == bits
    for i in range(len(bits)):
        assert v.access(i) == bits[i]
        assert v[i] == bits[i]


@given(bit_lists)
def test_rank_matches_oracle(bits):
    v = RankBitVector.from_bits(bits)
    for i in range(len(bits) + 1):
        assert v.rank1(i) == naive_rank1(bits, i)
        assert v.rank0(i) == i - naive_rank1(bits, i)


@given(bit_lists)
def test_select_matches_oracle(bits):
    v = RankBitVector.from_bits(bits)
    ones = sum(bits)
    assert v.count_ones == ones
    for j in range(ones):
        assert v.select1(j) == naive_select1(bits, j)


@given(bit_lists)
def test_select_is_rank_inverse(bits):
    v = RankBitVector.from_bits(bits)
    for j in range(v.count_ones):
        p = v.select1(j)
        assert v.access(p) == 1
        assert v.rank1(p) == j


def test_bounds_are_checked():
    v = RankBitVector.from_bits([1, 0, 1])
    with pytest.raises(IndexError):
        v.access(3)
    with pytest.raises(IndexError):
        v.access(-1)
    with pytest.raises(IndexError):
        v.rank1(4)
    with pytest.raises(IndexError):
        v.select1(2)


def test_empty_vector():
    v = RankBitVector.from_bits([])
    assert len(v) == 0
    assert v.rank1(0) == 0
    assert v.count_ones == 0
    assert RankBitVector.deserialize(v.serialize()) == v


def test_directory_elided_for_short_vectors():
    # up to 8 words (512 bits) the payload alone answers rank quickly
    short = RankBitVector.from_bits([1] * 512)
    assert short.directory_nbytes == 0
    long = RankBitVector.from_bits([1] * 513)
    assert long.directory_nbytes > 0


@given(st.integers(513, 40000))
def test_directory_within_budget(nbits):
    v = RankBitVector.from_bits(np.ones(nbits, np.uint8))
    assert v.directory_nbytes <= 0.25 * v.payload_nbytes


@given(bit_lists)
def test_serialize_round_trip(bits):
    v = RankBitVector.from_bits(bits)
    blob = v.serialize()
    assert len(blob) == v.payload_nbytes
    back = RankBitVector.deserialize(blob)
    assert back == v
    assert back.bits().tolist() == bits


def test_serialized_layout():
    # u64 bit count then the payload words, all little-endian
    v = RankBitVector.from_bits([1, 1, 0, 1])
    blob = v.serialize()
    assert blob[:8] == (4).to_bytes(8, "little")
    assert blob[8:] == (0b1011).to_bytes(8, "little")


def test_deserialize_rejects_truncation():
    v = RankBitVector.from_bits([1] * 100)
    blob = v.serialize()
    with pytest.raises(FormatError):
        RankBitVector.deserialize(blob[:-1])
    with pytest.raises(FormatError):
        RankBitVector.deserialize(blob[:4])


def test_deserialize_rejects_dirty_tail():
    # bits past nbits inside the last word must be zero
    blob = (4).to_bytes(8, "little") + (0b11111).to_bytes(8, "little")
    with pytest.raises(FormatError):
        RankBitVector.deserialize(blob)


def test_read_from_returns_end_offset():
    a = RankBitVector.from_bits([1, 0, 1])
    b = RankBitVector.from_bits([0, 1])
    blob = a.serialize() + b.serialize()
    got_a, off = RankBitVector.read_from(blob, 0)
    got_b, end = RankBitVector.read_from(blob, off)
    assert got_a == a and got_b == b
    assert end == len(blob)
