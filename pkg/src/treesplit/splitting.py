"""Exact, approximate, and minimum-imbalance k-splits of a tree.

The exact splitter is a single greedy depth-first peel. The approximate and
minimum-imbalance searches run a pseudopolynomial dynamic program over
(components-completed, residual-subtree-size) states, with residual sets
packed into integer bitmasks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .planar import SpanningTree


@dataclass(frozen=True)
class SplitResult:
    cut_edges: frozenset[int]
    component_sizes: tuple[int, ...]

    @property
    def imbalance(self) -> int:
        return max(self.component_sizes) - min(self.component_sizes)


def _tree_adjacency(t: SpanningTree) -> list[list[tuple[int, int]]]:
    adj = t.adjacency()
    for lst in adj:
        lst.sort()  # edge-id order fixes child traversal, hence determinism
    return adj


def component_sizes(t: SpanningTree, cut_edges) -> tuple[int, ...]:
    """Component orders of the forest t minus the cut, length |cut|+1."""
    cut = frozenset(int(e) for e in cut_edges)
    extra = cut - t.edges
    if extra:
        raise ValueError(f"edges {sorted(extra)} are not in the tree")
    n = t.host.num_vertices
    adj = t.adjacency()
    seen = bytearray(n)
    sizes = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = 1
        size = 1
        stack = [s]
        while stack:
            x = stack.pop()
            for e, w in adj[x]:
                if e not in cut and not seen[w]:
                    seen[w] = 1
                    size += 1
                    stack.append(w)
        sizes.append(size)
    assert len(sizes) == len(cut) + 1
    return tuple(sizes)


def find_balanced_split(t: SpanningTree, k: int) -> SplitResult | None:
    """The unique balanced k-split of the tree, or None.

    Peels subtrees in one depth-first pass: every edge whose peeled subtree
    size reaches exactly N/k is cut. The tree is balanced-splittable iff this
    produces exactly k-1 cuts with quota left at the root.
    """
    n = t.host.num_vertices
    if k < 1:
        raise ValueError("k must be at least 1")
    if n % k != 0:
        raise ValueError(f"k={k} does not divide the vertex count {n}")
    quota = n // k
    if k == 1:
        return SplitResult(frozenset(), (n,))
    adj = _tree_adjacency(t)
    root = 0
    parent_e = [-1] * n
    order = [root]
    parent = [-1] * n
    for x in order:
        for e, w in adj[x]:
            if w != parent[x]:
                parent[w] = x
                parent_e[w] = e
                order.append(w)
    residual = [1] * n
    cuts = []
    for x in reversed(order):
        if x != root and residual[x] == quota:
            cuts.append(parent_e[x])
        elif x != root:
            residual[parent[x]] += residual[x]
    if len(cuts) == k - 1 and residual[root] == quota:
        return SplitResult(frozenset(cuts), (quota,) * k)
    return None


# -- windowed tree DP ---------------------------------------------------------


class _WindowDP:
    """Feasibility of cutting a rooted tree into components sized in [lo, hi].

    States per vertex: cuts-used -> bitmask of achievable residual sizes.
    Intermediate per-child tables are kept for witness reconstruction.
    """

    def __init__(self, t: SpanningTree, lo: int, hi: int, max_cuts: int,
                 forced: frozenset[int] = frozenset()):
        self.t = t
        self.lo = lo
        self.hi = hi
        self.max_cuts = max_cuts
        self.forced = forced
        n = t.host.num_vertices
        self.window_mask = ((1 << (hi + 1)) - 1) ^ ((1 << lo) - 1) if hi >= lo else 0
        adj = _tree_adjacency(t)
        # forced cuts split the tree into sub-root components
        self.roots: list[int] = []
        self.parent = [-1] * n
        self.parent_e = [-1] * n
        self.children: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self.order: list[int] = []
        seen = bytearray(n)
        for s in range(n):
            if seen[s]:
                continue
            self.roots.append(s)
            seen[s] = 1
            stack = [s]
            while stack:
                x = stack.pop()
                self.order.append(x)
                for e, w in adj[x]:
                    if e in forced or seen[w]:
                        continue
                    seen[w] = 1
                    self.parent[w] = x
                    self.parent_e[w] = e
                    self.children[x].append((e, w))
                    stack.append(w)
        self.dp: list[dict[int, int]] = [dict() for _ in range(n)]
        self.trail: list[list[dict[int, int]]] = [[] for _ in range(n)]
        self._run()

    def _run(self) -> None:
        hi = self.hi
        cap = (1 << (hi + 1)) - 1
        for x in reversed(self.order):
            state = {0: 2}  # residual 1, no cuts
            trail = [dict(state)]
            for e, c in self.children[x]:
                child = self.dp[c]
                new: dict[int, int] = {}
                for cu, mask in state.items():
                    for cc, cmask in child.items():
                        keep = cu + cc
                        if keep <= self.max_cuts:
                            acc = 0
                            m = cmask
                            while m:
                                low = m & -m
                                r = low.bit_length() - 1
                                m ^= low
                                acc |= mask << r
                            acc &= cap
                            if acc:
                                new[keep] = new.get(keep, 0) | acc
                        if cc + 1 + cu <= self.max_cuts and cmask & self.window_mask:
                            cut = cu + cc + 1
                            new[cut] = new.get(cut, 0) | mask
                state = new
                trail.append(dict(state))
            self.dp[x] = state
            self.trail[x] = trail

    def feasible_counts(self, root: int) -> dict[int, bool]:
        """cuts-used -> whether the root component can land in the window."""
        return {
            cu: bool(mask & self.window_mask)
            for cu, mask in self.dp[root].items()
        }

    def extract(self, root: int, cuts: int) -> frozenset[int] | None:
        """Deterministic witness with ``cuts`` cuts under this root."""
        mask = self.dp[root].get(cuts, 0) & self.window_mask
        if not mask:
            return None
        r = (mask & -mask).bit_length() - 1
        out: set[int] = set()
        self._walk(root, cuts, r, out)
        return frozenset(out)

    def _walk(self, x: int, cuts: int, residual: int, out: set[int]) -> None:
        # undo the child merges right-to-left, preferring low edge ids cut
        kids = self.children[x]
        trail = self.trail[x]
        cu, r = cuts, residual
        for idx in range(len(kids) - 1, -1, -1):
            e, c = kids[idx]
            prev = trail[idx]
            child = self.dp[c]
            found = None
            # try the cut option first so smaller edge ids tend to be chosen
            for cc in sorted(child):
                if cc + 1 <= cu and child[cc] & self.window_mask:
                    if prev.get(cu - cc - 1, 0) >> r & 1:
                        found = ("cut", cc, None)
                        break
            if found is None:
                for cc in sorted(child):
                    if cc > cu:
                        continue
                    pmask = prev.get(cu - cc, 0)
                    m = child[cc]
                    while m:
                        low = m & -m
                        rc = low.bit_length() - 1
                        m ^= low
                        if rc <= r and pmask >> (r - rc) & 1:
                            found = ("keep", cc, rc)
                            break
                    if found:
                        break
            assert found is not None, "witness reconstruction lost the trail"
            kind, cc, rc = found
            if kind == "cut":
                out.add(e)
                cmask = child[cc] & self.window_mask
                r_child = (cmask & -cmask).bit_length() - 1
                self._walk(c, cc, r_child, out)
                cu -= cc + 1
            else:
                self._walk(c, cc, rc, out)
                cu -= cc
                r -= rc
        assert cu == 0 and r == 1


def _window_bounds(n: int, k: int, epsilon: float) -> tuple[int, int]:
    target = n / k
    lo = math.ceil((1 - epsilon) * target - 1e-9)
    hi = math.floor((1 + epsilon) * target + 1e-9)
    return max(lo, 1), min(hi, n)


def find_approx_split(t: SpanningTree, k: int, epsilon: float) -> SplitResult | None:
    """Any k-split with all component sizes within (1 +- epsilon) * N/k."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if not (0 < epsilon < 1):
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    n = t.host.num_vertices
    if k > n:
        return None
    lo, hi = _window_bounds(n, k, epsilon)
    if lo > hi:
        return None
    dp = _WindowDP(t, lo, hi, k - 1)
    root = dp.roots[0]
    if not dp.feasible_counts(root).get(k - 1, False):
        return None
    cut = dp.extract(root, k - 1)
    assert cut is not None
    return SplitResult(cut, component_sizes(t, cut))


def _window_feasible(t: SpanningTree, k: int, lo: int, hi: int,
                     forced: frozenset[int]) -> bool:
    dp = _WindowDP(t, lo, hi, k - 1, forced)
    budget = k - 1 - len(forced)
    # subset-sum of per-subtree feasible cut counts
    reachable = 1  # bitmask over total extra cuts
    for root in dp.roots:
        counts = dp.feasible_counts(root)
        acc = 0
        for cu, ok in counts.items():
            if ok and cu <= budget:
                acc |= reachable << cu
        reachable = acc & ((1 << (budget + 1)) - 1)
        if not reachable:
            return False
    return bool(reachable >> budget & 1)


def _delta_windows(n: int, k: int, delta: int):
    lo_min = max(1, -(-(n - k * delta) // k))
    for lo in range(lo_min, n // k + 1):
        yield lo, lo + delta


def find_min_imbalance_split(t: SpanningTree, k: int) -> SplitResult:
    """A (k-1)-edge cut minimizing max minus min component size.

    Ties are broken toward the lexicographically smallest sorted edge-id
    set, found by greedy feasibility checks edge by edge.
    """
    n = t.host.num_vertices
    if not (1 <= k <= n):
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    if k == 1:
        return SplitResult(frozenset(), (n,))
    best_delta = None
    for delta in range(n):
        if any(
            _window_feasible(t, k, lo, hi, frozenset())
            for lo, hi in _delta_windows(n, k, delta)
        ):
            best_delta = delta
            break
    assert best_delta is not None, "a tree always splits into k <= N parts"

    def feasible_with(forced: frozenset[int]) -> bool:
        return any(
            _window_feasible(t, k, lo, hi, forced)
            for lo, hi in _delta_windows(n, k, best_delta)
        )

    forced: set[int] = set()
    tree_edges = sorted(t.edges)
    for _ in range(k - 1):
        for e in tree_edges:
            if e in forced:
                continue
            if feasible_with(frozenset(forced | {e})):
                forced.add(e)
                break
        else:
            raise AssertionError("greedy lexicographic completion failed")
    sizes = component_sizes(t, forced)
    result = SplitResult(frozenset(forced), sizes)
    assert result.imbalance == best_delta, "witness must realize the minimum"
    return result


# -- exhaustive oracles (shared with the test suite) ---------------------------


def brute_force_splits(t: SpanningTree, k: int):
    """All (cut, sizes) pairs over (k-1)-subsets of tree edges."""
    edges = sorted(t.edges)
    for cut in combinations(edges, k - 1):
        yield frozenset(cut), component_sizes(t, cut)
