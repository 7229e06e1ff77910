"""Command-line benchmark harness.

Subcommands:
  gen    write a synthetic relation as an adjacency-list file
  build  compress an adjacency-list file into one of the four structures
  query  time one neighborhood operation with seeded random arguments
  setop  time one pairwise operation and write the result structure
  suite  run a dataset x structure x operation grid from a JSON config

Timing rows use the fixed CSV schema
dataset,structure,operation,runs,total_ms,avg_us,size_bytes,status.
The measured region covers only the query loop or the in-memory set
operation; generation, file I/O, argument sampling, building, and
verification all happen outside it.

Exit codes: 0 success, 2 bad arguments or an infeasible generator spec,
3 malformed input file, 4 structure kind/dimension mismatch or a failed
--verify cross-check.  The env var BREL_SEED replaces the default seed
whenever --seed is not given.

Suite config (JSON): {"datasets": [...], "structures": [...],
"queries": [...], "setops": [...], "runs": N, "setop_runs": N,
"range_size": N, "repetitions": N, "query_seed": N}.  Each dataset entry
either inlines a generator spec ({"name", "model", "nodes", "edges",
"k", "seed", ...}) or points at files ({"name", "path", "partner_path"}).
Set operations pair a generated dataset with a sibling generated from
seed+1; a file dataset uses partner_path, or itself if that is absent.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import statistics
import sys
import time
from dataclasses import dataclass

import numpy as np

from .brwt import Brwt, build_brwt
from .datagen import MODELS, GenSpec, generate
from .errors import DimensionMismatch, FormatError
from .k2 import K2Tree, K2TreeOnes, build_k2, build_k2ones
from .relation import PlainRelation, RangeQuery
from .ricerun import RiceRuns, encode_rice

DEFAULT_SEED = 1
SEED_ENV = "BREL_SEED"

CSV_FIELDS = ("dataset", "structure", "operation", "runs",
              "total_ms", "avg_us", "size_bytes", "status")

QUERY_OPS = ("isrelated", "isrelated-true", "succ", "pred", "range")
SETOP_NAMES = ("union", "inter", "diff", "symdiff")

BUILDERS = {
    "kt": build_k2,
    "ktone": build_k2ones,
    "brwt": build_brwt,
    "rice": encode_rice,
}

_KIND_BY_MAGIC = {
    b"K2T1": ("kt", K2Tree),
    b"K2O1": ("ktone", K2TreeOnes),
    b"BRWT": ("brwt", Brwt),
    b"RRUN": ("rice", RiceRuns),
}


class VerifyMismatch(Exception):
    """A --verify cross-check against the plain-relation oracle failed."""


@dataclass
class BenchResult:
    dataset: str
    structure: str
    operation: str
    runs: int
    total_ms: float
    size_bytes: int
    status: str = "ok"

    def row(self) -> dict:
        avg = 1000.0 * self.total_ms / self.runs if self.runs else 0.0
        return {
            "dataset": self.dataset,
            "structure": self.structure,
            "operation": self.operation,
            "runs": self.runs,
            "total_ms": f"{self.total_ms:.3f}",
            "avg_us": f"{avg:.3f}",
            "size_bytes": self.size_bytes,
            "status": self.status,
        }


def _emit_rows(rows, out_path) -> None:
    if out_path:
        fh = open(out_path, "w", newline="")
    else:
        fh = sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for r in rows:
            writer.writerow(r.row())
    finally:
        if out_path:
            fh.close()


def _resolve_seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get(SEED_ENV, "").strip()
    if env:
        return int(env)
    return DEFAULT_SEED


def _dataset_name(path: str) -> str:
    base = os.path.basename(path)
    stem, _, _ = base.partition(".")
    return stem or base


def load_structure(path: str):
    """Read a serialized structure, dispatching on its magic bytes."""
    with open(path, "rb") as fh:
        data = fh.read()
    entry = _KIND_BY_MAGIC.get(data[:4])
    if entry is None:
        raise FormatError(f"{path}: not a recognized structure file")
    kind, cls = entry
    return kind, cls.deserialize(data)


# ---------------------------------------------------------------- queries

def _sample_queries(op: str, rng, n: int, runs: int, range_size: int, oracle=None):
    """Build the per-run argument list for a query operation."""
    if n == 0:
        raise ValueError("cannot sample queries against an empty universe")
    if op == "isrelated":
        xs = rng.integers(0, n, runs)
        ys = rng.integers(0, n, runs)
        return list(zip(xs.tolist(), ys.tolist()))
    if op == "isrelated-true":
        if oracle is None or oracle.m == 0:
            raise ValueError("no pairs to sample: the relation is empty")
        pairs = oracle.to_pairs()
        idx = rng.integers(0, len(pairs), runs)
        return [(int(pairs[i, 0]), int(pairs[i, 1])) for i in idx]
    if op in ("succ", "pred"):
        return rng.integers(0, n, runs).tolist()
    if op == "range":
        size = min(range_size, n)
        xs = rng.integers(0, n - size + 1, runs)
        ys = rng.integers(0, n - size + 1, runs)
        return [RangeQuery(int(x), int(y), int(x) + size - 1, int(y) + size - 1)
                for x, y in zip(xs, ys)]
    raise ValueError(f"unknown query operation {op!r}")


def _time_queries(structure, op: str, args) -> float:
    """Run the prepared queries back to back; returns elapsed seconds."""
    if op in ("isrelated", "isrelated-true"):
        fn = structure.is_related
        t0 = time.perf_counter()
        for x, y in args:
            fn(x, y)
        return time.perf_counter() - t0
    if op == "succ":
        fn = structure.successors
    elif op == "pred":
        fn = structure.predecessors
    else:
        fn = structure.range_neighborhood
    t0 = time.perf_counter()
    for a in args:
        fn(a)
    return time.perf_counter() - t0


def _verify_queries(structure, oracle: PlainRelation, op: str, args) -> None:
    for a in args:
        if op in ("isrelated", "isrelated-true"):
            got = structure.is_related(*a)
            want = oracle.is_related(*a)
        elif op == "succ":
            got = structure.successors(a)
            want = oracle.successors(a)
        elif op == "pred":
            got = structure.predecessors(a)
            want = oracle.predecessors(a)
        else:
            got = structure.range_neighborhood(a)
            want = oracle.range_neighborhood(a)
        same = got == want if op.startswith("isrelated") else np.array_equal(got, want)
        if not same:
            raise VerifyMismatch(f"{op} disagrees with the oracle at argument {a!r}")


# ---------------------------------------------------------------- set ops

def _setop_fn(structure, op: str, navigation: str):
    method = {"union": "union", "inter": "intersection",
              "diff": "difference", "symdiff": "symmetric_difference"}[op]
    fn = getattr(structure, method)
    if navigation != "cursor" and isinstance(structure, Brwt) and op != "union":
        return lambda other: fn(other, navigation=navigation)
    return fn


def _time_setop(a, b, op: str, runs: int, navigation: str = "cursor"):
    fn = _setop_fn(a, op, navigation)
    result = None
    t0 = time.perf_counter()
    for _ in range(runs):
        result = fn(b)
    return time.perf_counter() - t0, result


_ORACLE_SETOP = {"union": "union", "inter": "intersection",
                 "diff": "difference", "symdiff": "symmetric_difference"}


def _verify_setop(a, b, result, op: str) -> None:
    want = getattr(a.decode(), _ORACLE_SETOP[op])(b.decode())
    if result.decode() != want:
        raise VerifyMismatch(f"{op} result disagrees with the oracle")


# ---------------------------------------------------------------- commands

def cmd_gen(args) -> int:
    spec = GenSpec(model=args.model, n=args.nodes, m=args.edges, k=args.k,
                   seed=_resolve_seed(args.seed), clusters=args.clusters,
                   cluster_side=args.cluster_side, cluster_fill=args.cluster_fill)
    rel = generate(spec)
    rel.save(args.out)
    print(f"wrote {args.out}: n={rel.n} m={rel.m} density={rel.density():.8g}")
    return 0


def cmd_build(args) -> int:
    rel = PlainRelation.load(args.input)
    structure = BUILDERS[args.structure](rel)
    structure.save(args.out)
    print(f"wrote {args.out}: structure={args.structure} "
          f"size_bytes={structure.size_in_bytes()} input_bytes={rel.size_in_bytes()}")
    return 0


def cmd_query(args) -> int:
    kind, structure = load_structure(args.structure_file)
    if args.runs < 1:
        raise ValueError("--runs must be at least 1")
    rng = np.random.Generator(np.random.PCG64(_resolve_seed(args.seed)))
    oracle = None
    if args.op == "isrelated-true" or args.verify:
        oracle = structure.decode()
    queries = _sample_queries(args.op, rng, structure.n, args.runs,
                              args.range_size, oracle)
    elapsed = _time_queries(structure, args.op, queries)
    status = "ok"
    if args.verify:
        _verify_queries(structure, oracle, args.op, queries)
    name = args.dataset or _dataset_name(args.structure_file)
    res = BenchResult(name, kind, args.op, args.runs, 1000.0 * elapsed,
                      structure.size_in_bytes(), status)
    _emit_rows([res], args.out)
    return 0


def cmd_setop(args) -> int:
    kind_a, a = load_structure(args.a)
    kind_b, b = load_structure(args.b)
    if kind_a != kind_b:
        raise DimensionMismatch(f"structure kinds differ: {kind_a} vs {kind_b}")
    if args.runs < 1:
        raise ValueError("--runs must be at least 1")
    elapsed, result = _time_setop(a, b, args.op, args.runs, args.navigation)
    if args.verify:
        _verify_setop(a, b, result, args.op)
    result.save(args.result)
    name = args.dataset or _dataset_name(args.a)
    res = BenchResult(name, kind_a, args.op, args.runs, 1000.0 * elapsed,
                      result.size_in_bytes())
    _emit_rows([res], args.out)
    return 0


def _suite_datasets(cfg):
    for entry in cfg.get("datasets", []):
        name = entry.get("name")
        if "path" in entry:
            rel = PlainRelation.load(entry["path"])
            partner = (PlainRelation.load(entry["partner_path"])
                       if "partner_path" in entry else rel)
            yield name or _dataset_name(entry["path"]), rel, partner
        else:
            spec = GenSpec(model=entry["model"], n=int(entry["nodes"]),
                           m=int(entry["edges"]), k=int(entry.get("k", 0)),
                           seed=int(entry.get("seed", DEFAULT_SEED)),
                           clusters=int(entry.get("clusters", 16)),
                           cluster_side=int(entry.get("cluster_side", 0)),
                           cluster_fill=float(entry.get("cluster_fill", 0.0)))
            sibling = GenSpec(model=spec.model, n=spec.n, m=spec.m, k=spec.k,
                              seed=spec.seed + 1, clusters=spec.clusters,
                              cluster_side=spec.cluster_side,
                              cluster_fill=spec.cluster_fill)
            yield (name or f"{spec.model}-{spec.n}"), generate(spec), generate(sibling)


def _median_time(fn, reps: int):
    times = []
    keep = None
    for _ in range(reps):
        elapsed, keep = fn()
        times.append(elapsed)
    return statistics.median(times), keep


def cmd_suite(args) -> int:
    with open(args.config) as fh:
        cfg = json.load(fh)
    structures = cfg.get("structures", list(BUILDERS))
    queries = cfg.get("queries", ["isrelated", "succ", "pred", "range"])
    setops = cfg.get("setops", list(SETOP_NAMES))
    runs = int(cfg.get("runs", 1000))
    setop_runs = int(cfg.get("setop_runs", 1))
    range_size = int(cfg.get("range_size", 500))
    reps = int(cfg.get("repetitions", 3))
    qseed = int(cfg.get("query_seed", _resolve_seed(args.seed)))

    rows = []
    for name, rel, partner in _suite_datasets(cfg):
        built = {}
        partner_built = {}
        for kind in structures:
            built[kind] = BUILDERS[kind](rel)
            if setops:
                partner_built[kind] = BUILDERS[kind](partner)
        for kind in structures:
            structure = built[kind]
            size = structure.size_in_bytes()
            for op in queries:
                try:
                    rng = np.random.Generator(np.random.PCG64(qseed))
                    qargs = _sample_queries(op, rng, structure.n, runs, range_size, rel)
                    elapsed, _ = _median_time(
                        lambda: (_time_queries(structure, op, qargs), None), reps)
                    if args.verify:
                        _verify_queries(structure, rel, op, qargs)
                    rows.append(BenchResult(name, kind, op, runs, 1000.0 * elapsed, size))
                except Exception as exc:
                    rows.append(BenchResult(name, kind, op, runs, 0.0, size,
                                            status=f"fail: {exc}"))
            for op in setops:
                try:
                    other = partner_built[kind]
                    elapsed, result = _median_time(
                        lambda: _time_setop(structure, other, op, setop_runs), reps)
                    if args.verify:
                        _verify_setop(structure, other, result, op)
                    rows.append(BenchResult(name, kind, op, setop_runs,
                                            1000.0 * elapsed, result.size_in_bytes()))
                except Exception as exc:
                    rows.append(BenchResult(name, kind, op, setop_runs, 0.0, size,
                                            status=f"fail: {exc}"))
            if args.compare_navigation and kind == "brwt" and "inter" in setops:
                for nav in ("cursor", "rank"):
                    try:
                        other = partner_built[kind]
                        elapsed, result = _median_time(
                            lambda: _time_setop(structure, other, "inter",
                                                setop_runs, nav), reps)
                        rows.append(BenchResult(name, kind, f"inter-{nav}", setop_runs,
                                                1000.0 * elapsed, result.size_in_bytes()))
                    except Exception as exc:
                        rows.append(BenchResult(name, kind, f"inter-{nav}", setop_runs,
                                                0.0, size, status=f"fail: {exc}"))
    _emit_rows(rows, args.out)
    if rows and all(r.status != "ok" for r in rows):
        return 1
    return 0


# ---------------------------------------------------------------- parser

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="binrel",
                                     description="benchmark harness for compressed binary relations")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic relation file")
    p.add_argument("--model", required=True, choices=MODELS)
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--k", type=int, default=0, help="nearest-neighbor parameter")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--clusters", type=int, default=16)
    p.add_argument("--cluster-side", type=int, default=0)
    p.add_argument("--cluster-fill", type=float, default=0.0)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("build", help="build a compressed structure from a relation file")
    p.add_argument("--structure", required=True, choices=sorted(BUILDERS))
    p.add_argument("input")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="time a neighborhood operation")
    p.add_argument("structure_file")
    p.add_argument("--op", required=True, choices=QUERY_OPS)
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--range-size", type=int, default=500)
    p.add_argument("--verify", action="store_true",
                   help="cross-check every timed result against the decoded relation")
    p.add_argument("--dataset", default=None, help="dataset name for the CSV row")
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("setop", help="time a pairwise set operation")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--op", required=True, choices=SETOP_NAMES)
    p.add_argument("-o", "--result", required=True, help="output structure file")
    p.add_argument("--navigation", choices=("cursor", "rank"), default="cursor")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--dataset", default=None)
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_setop)

    p = sub.add_parser("suite", help="run a benchmark grid from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--compare-navigation", action="store_true",
                   help="also time the intersection under both navigation modes")
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DimensionMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except VerifyMismatch as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 4
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
