"""Experiment engines: heatmaps, component-size histograms, walk bounds, scaling.

All Monte Carlo loops key their RNG substreams by (seed, class, trial), so
trial-parallel runs aggregate to identical counts regardless of scheduling.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from multiprocessing import Pool

from .planar import build_grid, compute_dual, grid_vertex, grid_vertical_edge
from .rng import RngStream
from .stats import wilson_score_interval
from .walks import WilsonSampler


def default_workers() -> int:
    env = os.environ.get("TREESPLIT_WORKERS")
    if env:
        return max(1, int(env))
    return 1


# -- vertical-edge symmetry classes -------------------------------------------


@dataclass(frozen=True)
class EdgeClass:
    """Orbit of vertical edges under the rectangle symmetries, 1-based coords.

    A vertical edge (i, j) joins grid points (i, j) and (i, j+1); the orbit
    is generated by the horizontal flip i -> m+1-i and the vertical flip
    j -> n-j (which maps vertical edges to vertical edges).
    """

    col: int
    row: int
    members: tuple[tuple[int, int], ...]


def vertical_edge_classes(m: int, n: int) -> list[EdgeClass]:
    seen: set[tuple[int, int]] = set()
    classes = []
    for j in range(1, n):
        for i in range(1, m + 1):
            if (i, j) in seen:
                continue
            orbit = {
                (i, j),
                (m + 1 - i, j),
                (i, n - j),
                (m + 1 - i, n - j),
            }
            seen |= orbit
            rep = min(orbit)
            classes.append(EdgeClass(rep[0], rep[1], tuple(sorted(orbit))))
    return classes


def central_vertical_class(m: int, n: int) -> EdgeClass:
    """The class of vertical edges crossing the grid center."""
    best = None
    cx = (m + 1) / 2
    cy = (n + 1) / 2  # vertical edge (i, j) spans rows j..j+1, midpoint j + 1/2
    for c in vertical_edge_classes(m, n):
        i, j = c.members[0]
        d = (i - cx) ** 2 + (j + 0.5 - cy) ** 2
        if best is None or d < best[0]:
            best = (d, c)
    return best[1]


def corner_vertical_class(m: int, n: int) -> EdgeClass:
    """The class containing the vertical edge at (1, 1)."""
    for c in vertical_edge_classes(m, n):
        if (1, 1) in c.members:
            return c
    raise AssertionError("grid with n >= 2 always has a corner vertical edge")


# -- per-trial grid machinery --------------------------------------------------


class GridSplitCounter:
    """Samples trees of an m-by-n grid via the dual and scores vertical edges.

    Per trial it computes rooted subtree sizes once, from which both the
    per-edge balanced-split indicator and tree 2-splittability follow.
    """

    def __init__(self, m: int, n: int):
        self.m = m
        self.n = n
        self.g = build_grid(m, n)
        self.dual = compute_dual(self.g)
        self.sampler = WilsonSampler(self.dual, self.dual.root)
        self.num_edges = self.g.num_edges
        self.N = m * n
        self.edge_pairs = self.g.edges

    def edge_id(self, i: int, j: int) -> int:
        """Vertical edge (i, j) in 1-based grid coordinates."""
        return grid_vertical_edge(self.m, self.n, i - 1, j - 1)

    def lower_vertex(self, i: int, j: int) -> int:
        return grid_vertex(self.m, i - 1, j - 1)

    def sample_tree(self, rng: RngStream) -> tuple[bytearray, int]:
        dual_edges, steps = self.sampler.sample_edges(rng)
        in_tree = bytearray(self.num_edges)
        for e in range(self.num_edges):
            in_tree[e] = 1
        for e in dual_edges:
            in_tree[e] = 0
        return in_tree, steps

    def subtree_sizes(self, in_tree: bytearray):
        """Parent arrays and subtree sizes for the sampled tree rooted at 0."""
        n = self.N
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        pairs = self.edge_pairs
        for e in range(self.num_edges):
            if in_tree[e]:
                u, v = pairs[e]
                adj[u].append((e, v))
                adj[v].append((e, u))
        parent = [-1] * n
        parent_edge = [-1] * n
        order = [0]
        parent[0] = 0
        for x in order:
            for e, w in adj[x]:
                if parent[w] < 0:
                    parent[w] = x
                    parent_edge[w] = e
                    order.append(w)
        size = [1] * n
        for x in reversed(order[1:]):
            size[parent[x]] += size[x]
        parent[0] = -1
        return parent, parent_edge, size

    def below_size(self, in_tree, parent, parent_edge, size, i: int, j: int) -> int | None:
        """Size of the component below vertical edge (i, j), or None if absent."""
        e = self.edge_id(i, j)
        if not in_tree[e]:
            return None
        lower = self.lower_vertex(i, j)
        upper = lower + self.m
        if parent_edge[lower] == e:
            return size[lower]
        assert parent_edge[upper] == e
        return self.N - size[upper]

    def is_two_splittable(self, parent_edge, size) -> bool:
        if self.N % 2:
            return False
        half = self.N // 2
        return any(
            size[x] == half for x in range(self.N) if parent_edge[x] >= 0
        )


# -- heatmap -------------------------------------------------------------------


@dataclass
class HeatmapClassResult:
    col: int
    row: int
    successes: int
    trials: int
    splittable: int

    @property
    def frequency(self) -> float:
        return self.successes / self.trials


@dataclass
class HeatmapResult:
    m: int
    n: int
    trials: int
    classes: list[EdgeClass]
    rows: list[HeatmapClassResult]

    def splittable_frequency(self) -> float:
        total = sum(r.splittable for r in self.rows)
        return total / sum(r.trials for r in self.rows)


def _heatmap_chunk(args) -> tuple[int, int, int]:
    m, n, seed, class_index, edge, lo, hi = args
    counter = GridSplitCounter(m, n)
    i, j = edge
    half = counter.N // 2
    successes = 0
    splittable = 0
    for t in range(lo, hi):
        rng = RngStream(seed, (class_index, t))
        in_tree, _ = counter.sample_tree(rng)
        parent, parent_edge, size = counter.subtree_sizes(in_tree)
        below = counter.below_size(in_tree, parent, parent_edge, size, i, j)
        if below == half:
            successes += 1
        if counter.is_two_splittable(parent_edge, size):
            splittable += 1
    return class_index, successes, splittable


def _run_chunks(chunks, workers: int, fn):
    if workers <= 1:
        return [fn(c) for c in chunks]
    with Pool(processes=workers) as pool:
        return pool.map(fn, chunks)


def heatmap_run(
    m: int,
    n: int,
    trials: int,
    seed: int,
    workers: int = 1,
    classes: list[EdgeClass] | None = None,
) -> HeatmapResult:
    """Per-symmetry-class balanced-split counts for vertical edges.

    Each class runs ``trials`` independent tree samples and counts those in
    which the representative edge is a tree edge splitting it evenly; trees
    are also scored for 2-splittability overall.
    """
    if m * n % 2:
        raise ValueError("the heatmap needs an even number of vertices")
    if classes is None:
        classes = vertical_edge_classes(m, n)
    chunk = max(1, trials // max(1, 2 * workers))
    chunks = []
    for ci, c in enumerate(classes):
        lo = 0
        while lo < trials:
            hi = min(trials, lo + chunk)
            chunks.append((m, n, seed, ci, (c.col, c.row), lo, hi))
            lo = hi
    results = _run_chunks(chunks, workers, _heatmap_chunk)
    per_class = [HeatmapClassResult(c.col, c.row, 0, trials, 0) for c in classes]
    for ci, successes, splittable in results:
        per_class[ci].successes += successes
        per_class[ci].splittable += splittable
    return HeatmapResult(m, n, trials, classes, per_class)


# -- histogram -------------------------------------------------------------------


@dataclass
class HistogramResult:
    m: int
    n: int
    edge: tuple[int, int]
    trials: int
    counts: list[int]  # index s = below-component size, 1..N-1
    in_tree: int

    def total_mass(self) -> float:
        return sum(self.counts) / self.trials

    def bins(self, bin_size: int) -> list[tuple[int, int, int]]:
        """(size_lo, size_hi, count) rows over 1..N-1 inclusive."""
        out = []
        lo = 1
        nmax = len(self.counts) - 2  # below-component size is at most N-1
        while lo <= nmax:
            hi = min(nmax, lo + bin_size - 1)
            out.append((lo, hi, sum(self.counts[lo : hi + 1])))
            lo = hi + 1
        return out


def _histogram_chunk(args):
    m, n, seed, edge, lo, hi = args
    counter = GridSplitCounter(m, n)
    i, j = edge
    counts = [0] * (counter.N + 1)
    in_tree_count = 0
    for t in range(lo, hi):
        rng = RngStream(seed, (0, t))
        in_tree, _ = counter.sample_tree(rng)
        parent, parent_edge, size = counter.subtree_sizes(in_tree)
        below = counter.below_size(in_tree, parent, parent_edge, size, i, j)
        if below is not None:
            counts[below] += 1
            in_tree_count += 1
    return counts, in_tree_count


def histogram_run(
    m: int,
    n: int,
    edge: tuple[int, int],
    trials: int,
    seed: int,
    workers: int = 1,
) -> HistogramResult:
    """Distribution of the below-component size for one vertical edge.

    Trials where the edge is not in the tree contribute no mass, so the
    histogram sums to strictly less than one.
    """
    i, j = edge
    if not (1 <= i <= m and 1 <= j <= n - 1):
        raise ValueError(f"no vertical edge at ({i}, {j}) in a {m}x{n} grid")
    chunk = max(1, trials // max(1, 2 * workers))
    chunks = []
    lo = 0
    while lo < trials:
        hi = min(trials, lo + chunk)
        chunks.append((m, n, seed, edge, lo, hi))
        lo = hi
    results = _run_chunks(chunks, workers, _histogram_chunk)
    counts = [0] * (m * n + 1)
    in_tree = 0
    for c, it in results:
        in_tree += it
        for s, v in enumerate(c):
            counts[s] += v
    return HistogramResult(m, n, edge, trials, counts, in_tree)


# -- random-walk exit bounds -----------------------------------------------------


@dataclass
class WalkBoundResult:
    geometry: str
    params: dict
    successes: int
    trials: int
    bound: float | None  # closed-form floor when one is known

    @property
    def frequency(self) -> float:
        return self.successes / self.trials

    def confidence(self) -> tuple[float, float]:
        return wilson_score_interval(self.successes, self.trials)


_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))


def _walk_chunk(args):
    geometry, params, seed, lo, hi = args
    successes = 0
    for t in range(lo, hi):
        rng = RngStream(seed, (t,))
        buf = rng.block()
        bi = 0
        blen = len(buf)
        if geometry == "exit-not-below":
            m, n, i0, j0 = params["m"], params["n"], params["i0"], params["j0"]
            x, y = i0, j0
            while 1 <= x <= m and 1 <= y <= n:
                if bi == blen:
                    buf = rng.block()
                    bi = 0
                dx, dy = _STEPS[int(buf[bi] * 4)]
                bi += 1
                x += dx
                y += dy
            successes += y > 0
        elif geometry == "square-top":
            ell = params["ell"]
            x, y = 0, 0
            while -ell <= x <= ell and 0 <= y <= 2 * ell:
                if bi == blen:
                    buf = rng.block()
                    bi = 0
                dx, dy = _STEPS[int(buf[bi] * 4)]
                bi += 1
                x += dx
                y += dy
            successes += y == 2 * ell + 1
        elif geometry == "tall-top":
            m, n = params["m"], params["n"]
            x, y = m // 2, 0
            while 0 <= x <= m and 0 <= y <= n:
                if bi == blen:
                    buf = rng.block()
                    bi = 0
                dx, dy = _STEPS[int(buf[bi] * 4)]
                bi += 1
                x += dx
                y += dy
            successes += y == n + 1
        else:
            raise ValueError(f"unknown geometry {geometry!r}")
    return successes


def walk_bound_run(
    geometry: str,
    params: dict,
    trials: int,
    seed: int,
    workers: int = 1,
) -> WalkBoundResult:
    """Monte Carlo first-exit frequencies for the three box geometries.

    ``exit-not-below`` carries its closed-form floor j0/(n+1); the square and
    tall-rectangle top-exit probabilities have unknown constants, so only the
    estimate and confidence interval are reported.
    """
    bound = None
    if geometry == "exit-not-below":
        bound = params["j0"] / (params["n"] + 1)
    chunk = max(1, trials // max(1, 2 * workers))
    chunks = []
    lo = 0
    while lo < trials:
        hi = min(trials, lo + chunk)
        chunks.append((geometry, params, seed, lo, hi))
        lo = hi
    results = _run_chunks(chunks, workers, _walk_chunk)
    return WalkBoundResult(geometry, params, sum(results), trials, bound)


# -- Wilson step-count scaling -----------------------------------------------------


@dataclass
class ScalingPoint:
    n: int
    N: int
    samples: int
    mean_steps: float
    normalized: float  # mean_steps / (N ln N)


def wilson_scaling(sizes, samples: int, seed: int) -> list[ScalingPoint]:
    """Mean dual-rooted Wilson step counts over n-by-n grids."""
    out = []
    for idx, n in enumerate(sizes):
        counter = GridSplitCounter(n, n)
        total = 0
        for t in range(samples):
            rng = RngStream(seed, (idx, t))
            _, steps = counter.sample_tree(rng)
            total += steps
        mean = total / samples
        big_n = n * n
        out.append(
            ScalingPoint(n, big_n, samples, mean, mean / (big_n * math.log(big_n)))
        )
    return out
