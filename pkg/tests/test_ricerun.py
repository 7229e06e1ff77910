"""Per-row gap/run compression with Rice codes, checked against an
independent bit-level encoder."""

import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from binrel import PlainRelation, RangeQuery, RiceRuns, encode_rice
from binrel.errors import DimensionMismatch, FormatError


@st.composite
def relations(draw, max_n=24):
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


# ------------------------------------------------------- reference encoder

def ref_symbols(row):
    """First id absolute, each later gap as gap-1, and every maximal run
    of consecutive ids collapsed to a 0 marker plus the run length."""
    out = [row[0]]
    gaps = [b - a for a, b in zip(row, row[1:])]
    i = 0
    while i < len(gaps):
        if gaps[i] == 1:
            j = i
            while j < len(gaps) and gaps[j] == 1:
                j += 1
            out += [0, j - i]
            i = j
        else:
            out.append(gaps[i] - 1)
            i += 1
    return out


def ref_row_bits(row):
    """Bit list for one row: 5-bit parameter, varint degree, Rice codes."""
    syms = ref_symbols(row)
    best_k = min(range(17),
                 key=lambda k: sum(s >> k for s in syms) + (k + 1) * len(syms))
    bits = [(best_k >> i) & 1 for i in range(5)]
    deg = len(row)
    while True:
        bits.append(1 if deg >> 7 else 0)
        bits += [(deg >> i) & 1 for i in range(7)]
        deg >>= 7
        if not deg:
            break
    for s in syms:
        q = s >> best_k
        bits += [1] * q + [0]
        bits += [(s >> i) & 1 for i in range(best_k)]
    return bits


def ref_encode(rel):
    """Full payload: concatenated row bit streams and their offsets."""
    stream = []
    offsets = [0]
    for x in range(rel.n):
        row = rel.successors(x).tolist()
        if row:
            stream += ref_row_bits(row)
        offsets.append(len(stream))
    words = np.zeros((len(stream) + 63) // 64, np.uint64)
    for i, b in enumerate(stream):
        if b:
            words[i >> 6] |= np.uint64(1) << np.uint64(i & 63)
    return offsets, words


def test_reference_symbols_fixture():
    # row [3,4,5,6]: absolute 3, then three consecutive steps collapse to
    # the run marker 0 followed by the length 3
    assert ref_symbols([3, 4, 5, 6]) == [3, 0, 3]
    # gaps that are not 1 shrink by one: [0, 7] has gap 7 -> symbol 6
    assert ref_symbols([0, 7]) == [0, 6]
    assert ref_symbols([5]) == [5]
    assert ref_symbols([2, 4, 5, 6, 9]) == [2, 1, 0, 2, 2]


def test_run_fixture_row():
    rel = PlainRelation.from_pairs(8, [(0, 3), (0, 4), (0, 5), (0, 6)])
    r = encode_rice(rel)
    assert r.successors(0).tolist() == [3, 4, 5, 6]
    # symbols [3,0,3] pick parameter 1 (8 payload bits beats 9 at k=0 or 2),
    # plus 5 parameter bits and an 8-bit degree group: 21 bits for the row
    assert int(r.offsets[1]) == 21
    want_off, want_words = ref_encode(rel)
    assert r.offsets.tolist() == want_off
    assert r.words.tolist() == want_words.tolist()


@settings(deadline=None)
@given(relations())
def test_encoder_matches_reference(rel):
    r = encode_rice(rel)
    want_off, want_words = ref_encode(rel)
    assert r.offsets.tolist() == want_off
    assert r.words.tolist() == want_words.tolist()


def test_empty_rows_use_zero_bits(m1):
    r = encode_rice(m1)
    # row 2 of the worked example is empty: its offset span is empty
    assert int(r.offsets[2]) == int(r.offsets[3])
    e = encode_rice(PlainRelation.empty(6))
    assert e.offsets.tolist() == [0] * 7
    assert e.words.size == 0


@settings(deadline=None)
@given(relations())
def test_decode_inverts_encode(rel):
    assert encode_rice(rel).decode() == rel


@settings(deadline=None)
@given(relations(), st.data())
def test_queries_match_oracle(rel, draw):
    n = rel.n
    r = encode_rice(rel)
    x = draw.draw(st.integers(0, n - 1))
    y = draw.draw(st.integers(0, n - 1))
    assert r.is_related(x, y) == rel.is_related(x, y)
    assert np.array_equal(r.successors(x), rel.successors(x))
    assert np.array_equal(r.predecessors(y), rel.predecessors(y))
    x2 = draw.draw(st.integers(x, n - 1))
    y2 = draw.draw(st.integers(y, n - 1))
    q = RangeQuery(x, y, x2, y2)
    assert np.array_equal(r.range_neighborhood(q), rel.range_neighborhood(q))


def test_predecessor_fixture(m2):
    # pred(0) of {(0,1),(2,2),(3,0),(3,3)} is [3]
    assert encode_rice(m2).predecessors(0).tolist() == [3]


def test_query_bounds(m1):
    r = encode_rice(m1)
    with pytest.raises(ValueError):
        r.successors(4)
    with pytest.raises(ValueError):
        r.range_neighborhood(RangeQuery(0, 0, 4, 4))


@settings(deadline=None, max_examples=60)
@given(relation_pairs())
def test_set_ops_match_oracle(pair):
    ra, rb = pair
    a, b = encode_rice(ra), encode_rice(rb)
    assert a.union(b).decode() == ra.union(rb)
    assert a.intersection(b).decode() == ra.intersection(rb)
    assert a.difference(b).decode() == ra.difference(rb)
    assert a.symmetric_difference(b).decode() == ra.symmetric_difference(rb)


@settings(deadline=None, max_examples=60)
@given(relation_pairs())
def test_set_op_output_is_canonical(pair):
    ra, rb = pair
    a, b = encode_rice(ra), encode_rice(rb)
    for op in ("union", "intersection", "difference", "symmetric_difference"):
        got = getattr(a, op)(b)
        assert got == encode_rice(got.decode())


def test_set_ops_reject_mismatches(m1):
    with pytest.raises(DimensionMismatch):
        encode_rice(m1).union(encode_rice(PlainRelation.empty(8)))


def test_serialized_layout(m1):
    r = encode_rice(m1)
    want = (b"RRUN" + struct.pack("<I", 4)
            + r.offsets.astype("<u8").tobytes()
            + struct.pack("<Q", int(r.offsets[-1]))
            + r.words.astype("<u8").tobytes())
    assert r.serialize() == want
    assert r.size_in_bytes() == len(want)


@settings(deadline=None)
@given(relations())
def test_serialize_round_trip(rel):
    r = encode_rice(rel)
    back = RiceRuns.deserialize(r.serialize())
    assert back == r
    assert back.decode() == rel


def test_deserialize_error_paths(m1):
    blob = encode_rice(m1).serialize()
    with pytest.raises(FormatError):
        RiceRuns.deserialize(b"XXXX" + blob[4:])
    with pytest.raises(FormatError):
        RiceRuns.deserialize(blob[:-1])
    with pytest.raises(FormatError):
        RiceRuns.deserialize(blob + b"\x00")


def test_corrupt_payload_is_detected(m1):
    r = encode_rice(m1)
    # force the first row's degree to zero: 5 parameter bits, then the
    # varint value bits start at bit 6
    words = r.words.copy()
    words[0] &= ~np.uint64(0b1111111 << 6)
    broken = RiceRuns(r.n, r.offsets, words, validate=False)
    with pytest.raises(FormatError):
        broken.successors(0)


def test_save_load(tmp_path, m1):
    r = encode_rice(m1)
    path = tmp_path / "r.bin"
    r.save(path)
    assert RiceRuns.load(path) == r
