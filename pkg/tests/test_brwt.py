"""Binary row-bisection tree: construction fixtures, queries, both
set-operation navigation modes, and the serialized format."""

import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from binrel import Brwt, PlainRelation, RangeQuery, build_brwt
from binrel.brwt import padded_rows
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
    # M1 = {(0,0),(0,1),(1,2),(3,3)} on 4 rows.  The root covers all rows
    # and stores, for each of the n columns, whether the top half
    # (rows 0-1) and bottom half (rows 2-3) contain that column:
    #   top half uses columns 0,1,2   -> b_l = 1110
    #   bottom half uses column 3     -> b_r = 0001
    # Left child keeps only the root's b_l columns [0,1,2]:
    #   row 0 uses 0,1 -> b_l = 110;  row 1 uses 2 -> b_r = 001
    # Right child keeps the root's b_r columns [3]:
    #   row 2 uses nothing -> b_l = 0;  row 3 uses 3 -> b_r = 1
    t = build_brwt(m1)
    assert t.n == 4 and t.n_rows == 4 and t.h == 2 and t.nlevels == 2
    root_vec, root_w = t._levels[0]
    assert root_w.tolist() == [4]
    assert bits(root_vec) == "1110" + "0001"
    leaf_vec, leaf_w = t._levels[1]
    assert leaf_w.tolist() == [3, 1]
    assert bits(leaf_vec) == "110" + "001" + "0" + "1"


def test_build_second_example(m2):
    # M2 = {(0,1),(2,2),(3,0),(3,3)}: root b_l = 0100 (only column 1 in
    # rows 0-1), b_r = 1011 (columns 0,2,3 in rows 2-3).  Left child width
    # 1 over column [1]: row 0 hits it, row 1 does not -> 1 / 0.  Right
    # child width 3 over columns [0,2,3]: row 2 uses {2} -> 010, row 3
    # uses {0,3} -> 101.
    t = build_brwt(m2)
    root_vec, root_w = t._levels[0]
    assert bits(root_vec) == "0100" + "1011"
    leaf_vec, leaf_w = t._levels[1]
    assert leaf_w.tolist() == [1, 3]
    assert bits(leaf_vec) == "1" + "0" + "010" + "101"


def test_full_two_by_two_is_single_node():
    rel = PlainRelation.from_pairs(2, [(0, 0), (0, 1), (1, 0), (1, 1)])
    t = build_brwt(rel)
    # two rows bisect straight into leaf halves; no deeper level exists
    assert t.n_rows == 2 and t.h == 1 and t.nlevels == 1
    vec, w = t._levels[0]
    assert w.tolist() == [2]
    assert bits(vec) == "11" + "11"


def test_empty_relation_is_root_only():
    t = build_brwt(PlainRelation.empty(4))
    assert t.nlevels == 1
    vec, w = t._levels[0]
    assert w.tolist() == [4]
    assert bits(vec) == "0000" + "0000"
    assert t.decode() == PlainRelation.empty(4)


def test_root_width_is_always_n():
    for n in (2, 3, 5, 9, 16):
        rel = PlainRelation.from_pairs(n, [(0, n - 1)])
        t = build_brwt(rel)
        assert t._levels[0][1].tolist() == [n]
        assert t.n_rows == padded_rows(n)


def test_child_widths_are_parent_popcounts(m1):
    t = build_brwt(m1)
    root_vec, _ = t._levels[0]
    n = t.n
    wl = sum(root_vec.bits()[:n].tolist())
    wr = sum(root_vec.bits()[n:].tolist())
    assert t._levels[1][1].tolist() == [wl, wr]


@settings(deadline=None)
@given(relations())
def test_decode_inverts_build(rel):
    assert build_brwt(rel).decode() == rel


@settings(deadline=None)
@given(relations(), st.data())
def test_queries_match_oracle(rel, draw):
    n = rel.n
    t = build_brwt(rel)
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
    t = build_brwt(m1)
    with pytest.raises(ValueError):
        t.successors(4)
    with pytest.raises(ValueError):
        t.range_neighborhood(RangeQuery(0, 0, 4, 4))


@settings(deadline=None, max_examples=60)
@given(relation_pairs())
def test_set_ops_match_oracle(pair):
    ra, rb = pair
    a, b = build_brwt(ra), build_brwt(rb)
    assert a.union(b).decode() == ra.union(rb)
    for nav in ("cursor", "rank"):
        assert a.intersection(b, navigation=nav).decode() == ra.intersection(rb)
        assert a.difference(b, navigation=nav).decode() == ra.difference(rb)
        assert (a.symmetric_difference(b, navigation=nav).decode()
                == ra.symmetric_difference(rb))


@settings(deadline=None, max_examples=60)
@given(relation_pairs())
def test_navigation_modes_agree_bit_for_bit(pair):
    ra, rb = pair
    a, b = build_brwt(ra), build_brwt(rb)
    for op in ("intersection", "difference", "symmetric_difference"):
        cur = getattr(a, op)(b, navigation="cursor")
        rnk = getattr(a, op)(b, navigation="rank")
        assert cur == rnk
        assert cur.serialize() == rnk.serialize()


@settings(deadline=None, max_examples=60)
@given(relation_pairs())
def test_set_op_output_is_canonical(pair):
    ra, rb = pair
    a, b = build_brwt(ra), build_brwt(rb)
    for op in ("union", "intersection", "difference", "symmetric_difference"):
        got = getattr(a, op)(b)
        assert got == build_brwt(got.decode())


def test_set_op_fixtures(m1, m2):
    a, b = build_brwt(m1), build_brwt(m2)
    assert a.union(b).decode() == m1.union(m2)
    assert a.intersection(b).decode() == m1.intersection(m2)
    assert a.difference(b).decode() == m1.difference(m2)
    assert a.symmetric_difference(b).decode() == m1.symmetric_difference(m2)


def test_set_ops_reject_mismatches(m1):
    with pytest.raises(DimensionMismatch):
        build_brwt(m1).union(build_brwt(PlainRelation.empty(8)))
    with pytest.raises(ValueError):
        build_brwt(m1).intersection(build_brwt(m1), navigation="bogus")


def test_cursor_table_shape(m1):
    t = build_brwt(m1)
    table = t.cursor_table()
    # two u32 cursors per node slot over a full binary tree of height h
    assert table.slots.dtype == np.uint32
    assert table.slots.size == 2 * ((1 << t.h) - 1)
    assert table.nbytes == 4 * table.slots.size


def test_fresh_cursor_table_is_not_exhausted(m1):
    # a fresh table sits at the start of every node; claiming completion
    # without advancing must be detected
    table = build_brwt(m1).cursor_table()
    with pytest.raises(RuntimeError):
        table.check_exhausted()


def test_serialized_layout(m1):
    # magic, u32 n, u32 padded row count, u16 level count, then per level
    # a u32 node count, the node widths, and the level's bit vector
    t = build_brwt(m1)
    root = (struct.pack("<I", 1) + struct.pack("<I", 4)
            + struct.pack("<Q", 8) + (0b10000111).to_bytes(8, "little"))
    leaves = (struct.pack("<I", 2) + struct.pack("<II", 3, 1)
              + struct.pack("<Q", 8) + (0b10100011).to_bytes(8, "little"))
    want = b"BRWT" + struct.pack("<IIH", 4, 4, 2) + root + leaves
    assert t.serialize() == want
    assert t.size_in_bytes() == len(want)


@settings(deadline=None)
@given(relations())
def test_serialize_round_trip(rel):
    t = build_brwt(rel)
    back = Brwt.deserialize(t.serialize())
    assert back == t
    assert back.decode() == rel


def test_deserialize_error_paths(m1):
    blob = build_brwt(m1).serialize()
    with pytest.raises(FormatError):
        Brwt.deserialize(b"XXXX" + blob[4:])
    with pytest.raises(FormatError):
        Brwt.deserialize(blob[:-1])
    with pytest.raises(FormatError):
        Brwt.deserialize(blob + b"\x00")
    # wrong padded row count for n
    with pytest.raises(FormatError):
        Brwt.deserialize(b"BRWT" + struct.pack("<IIH", 4, 8, 2) + blob[14:])
    # widths that disagree with the root's half popcounts
    tampered = bytearray(blob)
    off = 4 + 10 + 4  # magic, header, root node count
    assert struct.unpack_from("<I", tampered, off)[0] == 4  # root width field
    off2 = off + 4 + 16 + 4  # root width, root vec, leaf node count
    w3 = struct.unpack_from("<I", tampered, off2)[0]
    assert w3 == 3
    struct.pack_into("<I", tampered, off2, 2)
    with pytest.raises(FormatError):
        Brwt.deserialize(bytes(tampered))


def test_save_load(tmp_path, m1):
    t = build_brwt(m1)
    path = tmp_path / "t.bin"
    t.save(path)
    assert Brwt.load(path) == t
