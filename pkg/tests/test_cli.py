"""Benchmark CLI: subcommands, CSV schema, exit codes, seeding."""

import csv
import json
import os

import pytest

from binrel import PlainRelation
from binrel.cli import CSV_FIELDS, main

pytestmark = pytest.mark.usefixtures("clean_seed_env")


@pytest.fixture
def clean_seed_env(monkeypatch):
    monkeypatch.delenv("BREL_SEED", raising=False)


@pytest.fixture
def dataset(tmp_path):
    path = tmp_path / "rel.adj"
    rc = main(["gen", "--model", "clustered", "--nodes", "256", "--edges", "300",
               "--seed", "5", "-o", str(path)])
    assert rc == 0
    return path


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_gen_writes_loadable_file(dataset):
    rel = PlainRelation.load(dataset)
    assert rel.n == 256 and rel.m == 300


def test_gen_same_seed_same_bytes(tmp_path):
    a, b = tmp_path / "a.adj", tmp_path / "b.adj"
    for out in (a, b):
        assert main(["gen", "--model", "random", "--nodes", "64", "--edges", "99",
                     "--seed", "7", "-o", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_seed_env_fallback(tmp_path, monkeypatch):
    a, b = tmp_path / "a.adj", tmp_path / "b.adj"
    monkeypatch.setenv("BREL_SEED", "31")
    assert main(["gen", "--model", "random", "--nodes", "64", "--edges", "50",
                 "-o", str(a)]) == 0
    monkeypatch.delenv("BREL_SEED")
    assert main(["gen", "--model", "random", "--nodes", "64", "--edges", "50",
                 "--seed", "31", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_rejects_infeasible_spec(tmp_path):
    rc = main(["gen", "--model", "random", "--nodes", "4", "--edges", "99",
               "-o", str(tmp_path / "x.adj")])
    assert rc == 2


@pytest.mark.parametrize("kind", ["kt", "ktone", "brwt", "rice"])
def test_build_and_query_all_structures(tmp_path, dataset, kind):
    built = tmp_path / f"rel.{kind}"
    assert main(["build", "--structure", kind, str(dataset), "-o", str(built)]) == 0
    out = tmp_path / "q.csv"
    assert main(["query", str(built), "--op", "succ", "--runs", "50",
                 "--seed", "3", "--verify", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert len(rows) == 1
    row = rows[0]
    assert tuple(row) == CSV_FIELDS
    assert row["structure"] == kind
    assert row["operation"] == "succ"
    assert row["runs"] == "50"
    assert row["status"] == "ok"
    assert float(row["total_ms"]) >= 0
    assert abs(float(row["avg_us"]) - 1000.0 * float(row["total_ms"]) / 50) < 0.01
    assert int(row["size_bytes"]) > 0


@pytest.mark.parametrize("op", ["isrelated", "isrelated-true", "pred", "range"])
def test_query_ops_verify_clean(tmp_path, dataset, op):
    built = tmp_path / "rel.kt"
    assert main(["build", "--structure", "kt", str(dataset), "-o", str(built)]) == 0
    assert main(["query", str(built), "--op", op, "--runs", "20", "--seed", "4",
                 "--range-size", "32", "--verify", "--out",
                 str(tmp_path / "q.csv")]) == 0


def test_query_rejects_unknown_file(tmp_path):
    junk = tmp_path / "junk.bin"
    junk.write_bytes(b"NOPE" + b"\x00" * 16)
    assert main(["query", str(junk), "--op", "succ"]) == 3
    assert main(["query", str(tmp_path / "missing.bin"), "--op", "succ"]) == 3


def test_query_rejects_bad_runs(tmp_path, dataset):
    built = tmp_path / "rel.kt"
    main(["build", "--structure", "kt", str(dataset), "-o", str(built)])
    assert main(["query", str(built), "--op", "succ", "--runs", "0"]) == 2


def test_isrelated_true_on_empty_relation(tmp_path):
    adj = tmp_path / "e.adj"
    main(["gen", "--model", "random", "--nodes", "8", "--edges", "0", "-o", str(adj)])
    built = tmp_path / "e.rice"
    main(["build", "--structure", "rice", str(adj), "-o", str(built)])
    assert main(["query", str(built), "--op", "isrelated-true", "--runs", "5"]) == 2


def test_setop_round_trip(tmp_path, dataset):
    other = tmp_path / "rel2.adj"
    main(["gen", "--model", "clustered", "--nodes", "256", "--edges", "300",
          "--seed", "6", "-o", str(other)])
    a, b = tmp_path / "a.brwt", tmp_path / "b.brwt"
    main(["build", "--structure", "brwt", str(dataset), "-o", str(a)])
    main(["build", "--structure", "brwt", str(other), "-o", str(b)])
    out_csv = tmp_path / "s.csv"
    res = tmp_path / "inter.brwt"
    assert main(["setop", str(a), str(b), "--op", "inter", "-o", str(res),
                 "--verify", "--out", str(out_csv)]) == 0
    rows = read_rows(out_csv)
    assert rows[0]["operation"] == "inter"
    # the written result decodes to the oracle intersection
    from binrel import Brwt
    want = PlainRelation.load(dataset).intersection(PlainRelation.load(other))
    assert Brwt.load(res).decode() == want
    # rank navigation produces the identical canonical file
    res2 = tmp_path / "inter2.brwt"
    assert main(["setop", str(a), str(b), "--op", "inter", "-o", str(res2),
                 "--navigation", "rank"]) == 0
    assert res.read_bytes() == res2.read_bytes()


def test_setop_rejects_kind_mismatch(tmp_path, dataset):
    kt, rice = tmp_path / "x.kt", tmp_path / "x.rice"
    main(["build", "--structure", "kt", str(dataset), "-o", str(kt)])
    main(["build", "--structure", "rice", str(dataset), "-o", str(rice)])
    assert main(["setop", str(kt), str(rice), "--op", "union",
                 "-o", str(tmp_path / "o.bin")]) == 4


def test_suite_grid(tmp_path):
    cfg = {
        "datasets": [
            {"name": "tiny", "model": "clustered", "nodes": 96, "edges": 120, "seed": 8}],
        "structures": ["kt", "rice"],
        "queries": ["succ", "range"],
        "setops": ["union", "inter"],
        "runs": 10, "setop_runs": 1, "range_size": 16, "repetitions": 2,
    }
    cfg_path = tmp_path / "suite.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "suite.csv"
    assert main(["suite", "--config", str(cfg_path), "--out", str(out),
                 "--verify"]) == 0
    rows = read_rows(out)
    # 2 structures x (2 queries + 2 set ops)
    assert len(rows) == 8
    assert {r["structure"] for r in rows} == {"kt", "rice"}
    assert all(r["status"] == "ok" for r in rows)
    assert all(r["dataset"] == "tiny" for r in rows)


def test_suite_empty_config_yields_header_only(tmp_path):
    cfg_path = tmp_path / "empty.json"
    cfg_path.write_text(json.dumps({"datasets": []}))
    out = tmp_path / "empty.csv"
    assert main(["suite", "--config", str(cfg_path), "--out", str(out)]) == 0
    text = out.read_text().strip().splitlines()
    assert text == [",".join(CSV_FIELDS)]


def test_suite_compare_navigation_rows(tmp_path):
    cfg = {
        "datasets": [
            {"name": "nav", "model": "random", "nodes": 64, "edges": 160, "seed": 2}],
        "structures": ["brwt"],
        "queries": [],
        "setops": ["inter"],
        "runs": 5, "repetitions": 1,
    }
    cfg_path = tmp_path / "nav.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "nav.csv"
    assert main(["suite", "--config", str(cfg_path), "--out", str(out),
                 "--compare-navigation"]) == 0
    ops = [r["operation"] for r in read_rows(out)]
    assert ops == ["inter", "inter-cursor", "inter-rank"]


def test_suite_bad_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["suite", "--config", str(bad)]) == 2
