"""Shared test helpers: small graph builders and oracles."""

from __future__ import annotations

import heapq
from collections import Counter
from itertools import combinations

from treesplit.planar import Multigraph, SpanningTree
from treesplit.rng import RngStream
from treesplit.splitting import component_sizes


def path_graph(n: int) -> Multigraph:
    return Multigraph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Multigraph:
    return Multigraph(n, [(i, (i + 1) % n) for i in range(n)])


def whole_tree(g: Multigraph) -> SpanningTree:
    return SpanningTree(g, range(g.num_edges))


def random_tree(n: int, rng: RngStream) -> SpanningTree:
    """Uniform labeled tree from a random Pruefer sequence."""
    if n == 1:
        return SpanningTree(Multigraph(1, []), [])
    if n == 2:
        return whole_tree(Multigraph(2, [(0, 1)]))
    seq = [rng.integers(n) for _ in range(n - 2)]
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    edges = []
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    u = heapq.heappop(leaves)
    w = heapq.heappop(leaves)
    edges.append((u, w))
    return whole_tree(Multigraph(n, edges))


def brute_balanced_cuts(t: SpanningTree, k: int) -> list[frozenset[int]]:
    n = t.host.num_vertices
    q = n // k
    hits = []
    for cut in combinations(sorted(t.edges), k - 1):
        if all(s == q for s in component_sizes(t, cut)):
            hits.append(frozenset(cut))
    return hits


def brute_approx_exists(t: SpanningTree, k: int, eps: float) -> bool:
    n = t.host.num_vertices
    lo = (1 - eps) * n / k - 1e-9
    hi = (1 + eps) * n / k + 1e-9
    return any(
        all(lo <= s <= hi for s in component_sizes(t, cut))
        for cut in combinations(sorted(t.edges), k - 1)
    )


def brute_min_imbalance(t: SpanningTree, k: int) -> int:
    best = None
    for cut in combinations(sorted(t.edges), k - 1):
        sizes = component_sizes(t, cut)
        imb = max(sizes) - min(sizes)
        if best is None or imb < best:
            best = imb
    return best


def tv_counts_vs_weights(counts: Counter, weights: dict) -> float:
    total = sum(counts.values())
    z = sum(weights.values())
    keys = set(counts) | set(weights)
    return 0.5 * sum(
        abs(counts.get(k, 0) / total - weights.get(k, 0) / z) for k in keys
    )
