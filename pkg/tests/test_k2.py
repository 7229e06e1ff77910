"""Quadtree bitmap structures: construction fixtures, queries, set ops."""

import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from binrel import (K2Tree, K2TreeOnes, PlainRelation, RangeQuery,
                    build_k2, build_k2ones)
from binrel.errors import DimensionMismatch, FormatError


def bits(vec):
    return "".join(map(str, vec.bits().tolist()))


@st.composite
def relations(draw, max_n=20):
    n = draw(st.integers(1, max_n))
    pairs = draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))))
    return PlainRelation.from_pairs(n, sorted(pairs))


@st.composite
def relation_pairs(draw, max_n=14):
    n = draw(st.integers(1, max_n))
    coords = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    a = draw(st.sets(coords))
    b = draw(st.sets(coords))
    return (PlainRelation.from_pairs(n, sorted(a)),
            PlainRelation.from_pairs(n, sorted(b)))


def test_build_worked_example(m1):
    # M1 = {(0,0),(0,1),(1,2),(3,3)} on a 4x4 grid. One internal level of
    # 2x2 blocks in row-major order:
    #   top-left  rows 0-1 cols 0-1: holds (0,0),(0,1)      -> 1
    #   top-right rows 0-1 cols 2-3: holds (1,2)            -> 1
    #   bot-left  rows 2-3 cols 0-1: empty                  -> 0
    #   bot-right rows 2-3 cols 2-3: holds (3,3)            -> 1
    # T = 1101.  Each 1 expands to four leaf cells:
    #   TL cells (0,0),(0,1),(1,0),(1,1)       -> 1100
    #   TR cells (0,2),(0,3),(1,2),(1,3)       -> 0010
    #   BR cells (2,2),(2,3),(3,2),(3,3)       -> 0001
    # L = 1100 0010 0001.
    t = build_k2(m1)
    assert bits(t.T) == "1101"
    assert bits(t.L) == "110000100001"
    assert t.n == 4 and t.n_padded == 4 and t.height == 2


def test_build_second_example(m2):
    # M2 = {(0,1),(2,2),(3,0),(3,3)}: blocks TL (0,1) -> 1, TR empty -> 0,
    # BL (3,0) -> 1, BR (2,2),(3,3) -> 1, so T = 1011.  Leaves:
    #   TL 0100, BL (3,0) is local (1,0) -> 0010, BR holds local (0,0),(1,1) -> 1001
    t = build_k2(m2)
    assert bits(t.T) == "1011"
    assert bits(t.L) == "010000101001"


def test_single_cell():
    t = build_k2(PlainRelation.from_pairs(4, [(3, 3)]))
    assert bits(t.T) == "0001"
    assert bits(t.L) == "0001"


def test_empty_relation():
    t = build_k2(PlainRelation.empty(4))
    assert bits(t.T) == "0000"
    assert t.L.nbits == 0
    assert t.decode() == PlainRelation.empty(4)


def test_small_universe_padded_to_four():
    # a 2x2 relation still gets a 4x4 grid (padding floor)
    t = build_k2(PlainRelation.from_pairs(2, [(0, 0), (1, 1)]))
    assert t.n_padded == 4 and t.height == 2
    assert bits(t.T) == "1000"
    assert bits(t.L) == "1001"


def test_padding_rounds_up_to_power_of_two():
    t = build_k2(PlainRelation.from_pairs(5, [(4, 4)]))
    assert t.n_padded == 8 and t.height == 3


def test_ones_variant_flags_full_blocks():
    full = PlainRelation.from_pairs(4, [(i, j) for i in range(4) for j in range(4)])
    t = build_k2ones(full)
    # the whole grid splits into four all-ones blocks: every T bit is 0
    # and every one of the four U flags is set
    assert bits(t.T) == "0000"
    assert bits(t.U) == "1111"
    assert t.L.nbits == 0
    assert t.decode() == full


def test_ones_variant_without_full_blocks(m1):
    # no all-ones block anywhere, so the two trees carry identical T/L
    # and every U flag stays 0
    plain = build_k2(m1)
    ones = build_k2ones(m1)
    assert bits(ones.T) == bits(plain.T)
    assert bits(ones.L) == bits(plain.L)
    assert bits(ones.U) == "0" * 9
    assert int(ones.U.count_ones) == 0


def test_ones_variant_partial_full_block():
    # only the top-left 2x2 block is all ones
    pairs = [(0, 0), (0, 1), (1, 0), (1, 1), (3, 3)]
    t = build_k2ones(PlainRelation.from_pairs(4, pairs))
    assert bits(t.T) == "0001"
    # T has three 0s (flags 1,0,0 for blocks TL,TR,BL) and L contributes
    # its own zeros; the TL flag is the single set U bit
    assert t.U.access(0) == 1
    assert t.decode() == PlainRelation.from_pairs(4, pairs)


@settings(deadline=None)
@given(relations())
def test_decode_inverts_build(rel):
    assert build_k2(rel).decode() == rel
    assert build_k2ones(rel).decode() == rel


@settings(deadline=None)
@given(relations(), st.data())
def test_queries_match_oracle(rel, draw):
    n = rel.n
    for t in (build_k2(rel), build_k2ones(rel)):
        x = draw.draw(st.integers(0, n - 1))
        y = draw.draw(st.integers(0, n - 1))
        assert t.is_related(x, y) == rel.is_related(x, y)
        assert np.array_equal(t.successors(x), rel.successors(x))
        assert np.array_equal(t.predecessors(y), rel.predecessors(y))
        x2 = draw.draw(st.integers(x, n - 1))
        y2 = draw.draw(st.integers(y, n - 1))
        q = RangeQuery(x, y, x2, y2)
        assert np.array_equal(t.range_neighborhood(q), rel.range_neighborhood(q))


def test_query_bounds(m1):
    t = build_k2(m1)
    with pytest.raises(ValueError):
        t.successors(4)
    with pytest.raises(ValueError):
        t.is_related(0, -1)
    with pytest.raises(ValueError):
        t.range_neighborhood(RangeQuery(0, 0, 4, 4))


@settings(deadline=None, max_examples=60)
@given(relation_pairs())
def test_set_ops_match_oracle(pair):
    ra, rb = pair
    for build in (build_k2, build_k2ones):
        a, b = build(ra), build(rb)
        assert a.union(b).decode() == ra.union(rb)
        assert a.intersection(b).decode() == ra.intersection(rb)
        assert a.difference(b).decode() == ra.difference(rb)
        assert a.symmetric_difference(b).decode() == ra.symmetric_difference(rb)


@settings(deadline=None, max_examples=60)
@given(relation_pairs())
def test_set_op_output_is_canonical(pair):
    # results computed on the compressed form must be bit-identical to
    # building fresh from the decoded result
    ra, rb = pair
    for build in (build_k2, build_k2ones):
        a, b = build(ra), build(rb)
        for op in ("union", "intersection", "difference", "symmetric_difference"):
            got = getattr(a, op)(b)
            assert got == build(got.decode())


def test_set_op_fixtures(m1, m2):
    a, b = build_k2(m1), build_k2(m2)
    assert a.union(b).decode() == m1.union(m2)
    assert a.intersection(b).decode() == m1.intersection(m2)
    assert a.difference(b).decode() == m1.difference(m2)
    assert a.symmetric_difference(b).decode() == m1.symmetric_difference(m2)


def test_set_ops_reject_mixed_kinds(m1, m2):
    with pytest.raises(DimensionMismatch):
        build_k2(m1).union(build_k2ones(m2))
    with pytest.raises(DimensionMismatch):
        build_k2(m1).union(build_k2(PlainRelation.empty(8)))


def test_serialized_layout(m1):
    # magic, u32 n, u32 padded side, u8 height, then the T and L vectors
    t = build_k2(m1)
    want = (b"K2T1" + struct.pack("<IIB", 4, 4, 2)
            + struct.pack("<Q", 4) + (0b1011).to_bytes(8, "little")
            + struct.pack("<Q", 12) + (0b100001000011).to_bytes(8, "little"))
    assert t.serialize() == want
    assert t.size_in_bytes() == len(want)


def test_ones_serialized_layout(m1):
    t = build_k2ones(m1)
    blob = t.serialize()
    assert blob[:4] == b"K2O1"
    assert K2TreeOnes.deserialize(blob) == t
    assert t.size_in_bytes() == len(blob)


@settings(deadline=None)
@given(relations())
def test_serialize_round_trip(rel):
    for build, cls in ((build_k2, K2Tree), (build_k2ones, K2TreeOnes)):
        t = build(rel)
        back = cls.deserialize(t.serialize())
        assert back == t
        assert back.decode() == rel


def test_deserialize_error_paths(m1):
    blob = build_k2(m1).serialize()
    with pytest.raises(FormatError):
        K2Tree.deserialize(b"XXXX" + blob[4:])
    with pytest.raises(FormatError):
        K2Tree.deserialize(blob[:-3])
    with pytest.raises(FormatError):
        K2Tree.deserialize(blob + b"\x00")
    # padded side that is not the canonical one for n
    bad = b"K2T1" + struct.pack("<IIB", 4, 8, 3) + blob[13:]
    with pytest.raises(FormatError):
        K2Tree.deserialize(bad)
    # ones-variant magic on the plain class
    with pytest.raises(FormatError):
        K2Tree.deserialize(build_k2ones(m1).serialize())


def test_save_load(tmp_path, m1):
    t = build_k2ones(m1)
    path = tmp_path / "t.bin"
    t.save(path)
    assert K2TreeOnes.load(path) == t
