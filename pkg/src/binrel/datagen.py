"""Deterministic synthetic relation generators.

Four models, all driven by numpy's PCG64 generator so a GenSpec is a
pure function of its fields:

- random: m distinct cells drawn uniformly from the n x n grid.
- smallworld: ring lattice (each node linked to its k nearest
  neighbors, k // 2 per side) plus uniformly drawn shortcut pairs.
- barabasi: preferential attachment; each arriving node links to k
  distinct earlier nodes chosen proportionally to current degree (via
  the repeated-endpoints list), after k seed nodes.
- clustered: c square clusters filled with uniformly chosen distinct
  cells to a local density, plus a thin uniform background; stands in
  for heavily clustered real-world matrices.

Undirected model edges (smallworld, barabasi) are emitted once as the
ordered pair (min, max).  Every model ends the same way: duplicates are
merged, surplus edges beyond m are removed uniformly at random, and a
shortfall in the random/smallworld/clustered models is topped up with
uniform draws, so the result has exactly m pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .relation import PlainRelation

MODELS = ("random", "smallworld", "barabasi", "clustered")


@dataclass(frozen=True)
class GenSpec:
    model: str
    n: int
    m: int
    k: int = 0
    seed: int = 0
    clusters: int = 16
    cluster_side: int = 0
    cluster_fill: float = 0.0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.m < 0:
            raise ValueError("m must be non-negative")
        if self.m > self.n * self.n:
            raise ValueError(f"m={self.m} exceeds the {self.n}x{self.n} grid")
        if self.model in ("smallworld", "barabasi"):
            if self.k < 1:
                raise ValueError("k must be at least 1 for this model")
            if self.k >= self.n:
                raise ValueError("k must be smaller than n")
            if self.m > self.n * (self.n - 1) // 2:
                raise ValueError("m exceeds the undirected pair capacity n*(n-1)/2")
        if self.model == "barabasi":
            cap = (self.n - self.k) * self.k
            if self.m > cap:
                raise ValueError(f"m={self.m} exceeds the attachment capacity {cap}")
        if self.model == "clustered":
            if self.clusters < 1:
                raise ValueError("clusters must be at least 1")
            if self.cluster_side < 0 or self.cluster_side > self.n:
                raise ValueError("cluster side must lie in [0, n]")


def density(rel: PlainRelation) -> float:
    return rel.density()


def _uniform_codes(rng, n: int, count: int, exclude: np.ndarray) -> np.ndarray:
    """Draw `count` distinct uniform cells not present in `exclude` (sorted)."""
    total = n * n
    have = np.zeros(0, np.int64)
    while have.size < count:
        want = count - have.size
        batch = rng.integers(0, total, size=max(64, int(want * 1.5)), dtype=np.int64)
        batch = np.unique(batch)
        if exclude.size:
            batch = batch[np.isin(batch, exclude, assume_unique=True, invert=True)]
        if have.size:
            batch = batch[np.isin(batch, have, assume_unique=True, invert=True)]
        if batch.size > want:
            batch = rng.permutation(batch)[:want]
        have = np.union1d(have, batch)
    return have


def _trim(rng, codes: np.ndarray, m: int) -> np.ndarray:
    if codes.size > m:
        codes = np.sort(rng.permutation(codes)[:m])
    return codes


def _upper_codes(rng, n: int, count: int, exclude: np.ndarray) -> np.ndarray:
    """Distinct uniform cells above the diagonal, as (min, max) pairs."""
    have = np.zeros(0, np.int64)
    while have.size < count:
        want = count - have.size
        us = rng.integers(0, n, size=max(64, int(want * 2)), dtype=np.int64)
        vs = rng.integers(0, n, size=us.size, dtype=np.int64)
        keep = us != vs
        us, vs = us[keep], vs[keep]
        lo = np.minimum(us, vs)
        hi = np.maximum(us, vs)
        batch = np.unique(lo * n + hi)
        if exclude.size:
            batch = batch[np.isin(batch, exclude, assume_unique=True, invert=True)]
        if have.size:
            batch = batch[np.isin(batch, have, assume_unique=True, invert=True)]
        if batch.size > want:
            batch = rng.permutation(batch)[:want]
        have = np.union1d(have, batch)
    return have


def _gen_random(rng, spec: GenSpec) -> np.ndarray:
    n, m = spec.n, spec.m
    if n * n <= 1 << 24:
        return np.sort(rng.permutation(n * n)[:m].astype(np.int64))
    return np.sort(_uniform_codes(rng, n, m, np.zeros(0, np.int64)))


def _gen_smallworld(rng, spec: GenSpec) -> np.ndarray:
    n, m, k = spec.n, spec.m, spec.k
    us = np.repeat(np.arange(n, dtype=np.int64), k // 2)
    ds = np.tile(np.arange(1, k // 2 + 1, dtype=np.int64), n)
    vs = (us + ds) % n
    lo = np.minimum(us, vs)
    hi = np.maximum(us, vs)
    ring = np.unique(lo * n + hi)
    if ring.size >= m:
        return _trim(rng, ring, m)
    extra = _upper_codes(rng, n, m - ring.size, ring)
    return np.sort(np.union1d(ring, extra))


def _gen_barabasi(rng, spec: GenSpec) -> np.ndarray:
    n, m, k = spec.n, spec.m, spec.k
    endpoints = list(range(k))
    edges = []
    for t in range(k, n):
        picks = set()
        while len(picks) < k:
            picks.add(endpoints[int(rng.integers(0, len(endpoints)))])
        for v in sorted(picks):
            edges.append(v * n + t)
            endpoints.append(v)
        endpoints.extend([t] * k)
    codes = np.unique(np.asarray(edges, np.int64))
    return _trim(rng, codes, m)


def _cluster_corners(rng, spec: GenSpec, side: int) -> np.ndarray:
    return rng.integers(0, spec.n - side + 1, size=(spec.clusters, 2), dtype=np.int64)


def _cluster_geometry(spec: GenSpec) -> tuple[int, float, int]:
    """Resolve (side, fill, in-cluster pair target) for a clustered spec."""
    target = int(round(0.95 * spec.m))
    side = spec.cluster_side
    if side == 0:
        # power-of-two side no larger than n, sized for a local density
        # in the 5-10% range
        want = max(16.0, 10.0 * target / spec.clusters)
        side = 1
        while side * 2 <= spec.n and (side < 4 or side * side < want):
            side *= 2
    fill = spec.cluster_fill
    if fill <= 0.0:
        cap = spec.clusters * side * side
        fill = min(1.0, target / cap) if cap else 0.0
    return side, fill, target


def cluster_rects(spec: GenSpec) -> np.ndarray:
    """The (row, col, side) triples of the clusters a spec will draw."""
    if spec.model != "clustered":
        raise ValueError("cluster rectangles exist only for the clustered model")
    side, _, _ = _cluster_geometry(spec)
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    corners = _cluster_corners(rng, spec, side)
    out = np.empty((spec.clusters, 3), np.int64)
    out[:, :2] = corners
    out[:, 2] = side
    return out


def _gen_clustered(rng, spec: GenSpec) -> np.ndarray:
    n, m = spec.n, spec.m
    side, fill, target = _cluster_geometry(spec)
    corners = _cluster_corners(rng, spec, side)
    cells = side * side
    per = np.full(spec.clusters, min(cells, int(round(fill * cells))), np.int64)
    parts = []
    for c in range(spec.clusters):
        local = rng.permutation(cells)[:per[c]].astype(np.int64)
        r = corners[c, 0] + local // side
        col = corners[c, 1] + local % side
        parts.append(r * n + col)
    codes = np.unique(np.concatenate(parts)) if parts else np.zeros(0, np.int64)
    codes = _trim(rng, codes, min(m, target))
    if codes.size < m:
        extra = _uniform_codes(rng, n, m - codes.size, codes)
        codes = np.union1d(codes, extra)
    return np.sort(codes)


_GENERATORS = {
    "random": _gen_random,
    "smallworld": _gen_smallworld,
    "barabasi": _gen_barabasi,
    "clustered": _gen_clustered,
}


def generate(spec: GenSpec) -> PlainRelation:
    if spec.m == 0 or spec.n == 0:
        return PlainRelation.empty(spec.n)
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    codes = _GENERATORS[spec.model](rng, spec)
    if codes.size != spec.m:
        raise RuntimeError(f"generator produced {codes.size} pairs, wanted {spec.m}")
    return PlainRelation._from_codes(spec.n, codes)
