"""Compare the pure-Python and compiled kernel lanes on one dataset.

Builds every structure and times construction, point queries, batch
neighborhoods, a range window, and an intersection under each lane,
then prints the per-operation speedup of the compiled lane.

Usage: python3 benchmarks/compare_lanes.py [--nodes N] [--edges M] ...
"""

import argparse
import statistics
import time

import numpy as np

import binrel.kernels as kernels
from binrel.brwt import build_brwt
from binrel.datagen import GenSpec, generate
from binrel.k2 import build_k2, build_k2ones
from binrel.relation import RangeQuery
from binrel.ricerun import encode_rice

BUILDERS = [("k2", build_k2), ("k2ones", build_k2ones),
            ("brwt", build_brwt), ("rice", encode_rice)]


def median_time(fn, reps):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def lane_measurements(rel, partner, args):
    """Return [(structure, operation, seconds)] under the active lane."""
    rng = np.random.Generator(np.random.PCG64(args.seed))
    probes = rng.integers(0, rel.n, size=args.probes)
    side = min(args.range_side, rel.n)
    lo = int(rng.integers(0, rel.n - side + 1))
    window = RangeQuery(lo, lo, lo + side - 1, lo + side - 1)
    rows = []
    for name, build in BUILDERS:
        a = build(rel)
        b = build(partner)
        rows.append((name, "build", median_time(lambda: build(rel), args.reps)))
        rows.append((name, "successors", median_time(
            lambda: [a.successors(int(x)) for x in probes], args.reps)))
        npred = args.probes if name != "rice" else max(1, args.probes // 20)
        rows.append((name, "predecessors", median_time(
            lambda: [a.predecessors(int(x)) for x in probes[:npred]],
            args.reps) * (args.probes / npred)))
        rows.append((name, "range", median_time(
            lambda: a.range_neighborhood(window), args.reps)))
        rows.append((name, "intersection",
                     median_time(lambda: a.intersection(b), args.reps)))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", default="smallworld")
    ap.add_argument("--nodes", type=int, default=20_000)
    ap.add_argument("--edges", type=int, default=160_000)
    ap.add_argument("--k", type=int, default=16)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--probes", type=int, default=100,
                    help="queries per successors/predecessors batch")
    ap.add_argument("--range-side", type=int, default=256)
    ap.add_argument("--reps", type=int, default=3,
                    help="repetitions per measurement (median kept)")
    args = ap.parse_args(argv)

    spec = GenSpec(model=args.model, n=args.nodes, m=args.edges,
                   k=args.k, seed=args.seed)
    sibling = GenSpec(model=spec.model, n=spec.n, m=spec.m, k=spec.k,
                      seed=spec.seed + 1)
    rel, partner = generate(spec), generate(sibling)
    print(f"dataset: {args.model} n={rel.n} m={rel.m} seed={args.seed}")

    before = kernels.impl
    try:
        results = {}
        for lane in ("py", "c"):
            kernels.use_lane(lane)
            results[lane] = lane_measurements(rel, partner, args)
    finally:
        kernels.impl = before

    print(f"{'structure':<9} {'operation':<13} {'py_ms':>10} {'c_ms':>10} "
          f"{'speedup':>8}")
    for (name, op, t_py), (_, _, t_c) in zip(results["py"], results["c"]):
        print(f"{name:<9} {op:<13} {1000 * t_py:>10.2f} {1000 * t_c:>10.2f} "
              f"{t_py / t_c:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
