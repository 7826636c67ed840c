"""Closed-form lower bounds on balanced-split probabilities, as a table.

All bounds are exact rationals at beta = 1; the k-dependent bounds carry an
unknown constant beta that is reported symbolically alongside the beta = 1
numeric column.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class BoundRow:
    name: str
    description: str
    symbolic: str
    beta1_value: Fraction

    def as_float(self) -> float:
        return float(self.beta1_value)


@dataclass(frozen=True)
class BoundsTable:
    m: int
    n: int
    k: int
    N: int
    M: int
    rows: tuple[BoundRow, ...]
    warnings: tuple[str, ...]

    def row(self, name: str) -> BoundRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def format(self) -> str:
        lines = [
            f"bounds for the {self.m}x{self.n} grid, k={self.k} "
            f"(N={self.N} vertices, M={self.M} edges)"
        ]
        for w in self.warnings:
            lines.append(f"  warning: {w}")
        width = max(len(r.name) for r in self.rows)
        for r in self.rows:
            lines.append(
                f"  {r.name:<{width}}  {r.as_float():.6e}  {r.symbolic}"
            )
            lines.append(f"  {'':<{width}}  {r.description}")
        return "\n".join(lines)


def grid_edge_count(m: int, n: int) -> int:
    return m * (n - 1) + n * (m - 1)


def two_split_floor(m: int, n: int) -> Fraction:
    """Probability floor that a uniform tree of the grid is 2-splittable."""
    big = max(m, n)
    small = min(m, n)
    if (big * small) % 2:
        raise ValueError("2-splittability needs an even vertex count")
    return Fraction(1, (big * small) ** 2)


def central_edge_floor(m: int, n: int) -> Fraction:
    """Floor on P(central edge is in the tree and splits it evenly).

    Cases: 1/(m n^3) when the long side is even, else 1/(4 m n^3); stated
    with the long side as m and the short side as n.
    """
    big = max(m, n)
    small = min(m, n)
    if (big * small) % 2:
        raise ValueError("the central-edge bound needs an even vertex count")
    base = Fraction(1, big * small**3)
    return base if big % 2 == 0 else base / 4


def k_split_floor(m: int, n: int, k: int, beta: float = 1.0) -> Fraction | float:
    """Floor on P(uniform tree is k-splittable): 1/(beta^{k^2} n^{3k-3} m^{k-1})."""
    big = max(m, n)
    small = min(m, n)
    value = Fraction(1, small ** (3 * k - 3) * big ** (k - 1))
    if beta == 1.0:
        return value
    return float(value) / beta ** (k * k)


def k_partition_floor(m: int, n: int, k: int, beta: float = 1.0) -> Fraction | float:
    """Floor on P(tree-weighted k-partition is balanced):
    1/(beta^{k^2} n^{5k-5} m^{3k-3})."""
    big = max(m, n)
    small = min(m, n)
    value = Fraction(1, small ** (5 * k - 5) * big ** (3 * k - 3))
    if beta == 1.0:
        return value
    return float(value) / beta ** (k * k)


def forest_transfer(alpha: Fraction, N: int, M: int, k: int) -> Fraction:
    """Splittable-tree floor alpha transferred to balanced k-forests:
    alpha / (N^{k-1} (M - N + 1)^{k-1})."""
    return Fraction(alpha) / (N ** (k - 1) * (M - N + 1) ** (k - 1))


def exit_above_floor(j0: int, n: int) -> Fraction:
    """Floor on P(a walk exits the [1,m]x[1,n] box to a vertex with j > 0)."""
    if not (1 <= j0 <= n):
        raise ValueError(f"start row {j0} outside [1, {n}]")
    return Fraction(j0, n + 1)


def compute_bounds(m: int, n: int, k: int) -> BoundsTable:
    """The full bounds table for an m-by-n grid and k parts."""
    if m < 1 or n < 1 or k < 1:
        raise ValueError("m, n, k must be positive")
    N = m * n
    M = grid_edge_count(m, n)
    big = max(m, n)
    small = min(m, n)
    warnings = []
    if big % k:
        warnings.append(
            f"k={k} does not divide the longer grid side {big}; the "
            "k-splittability floor assumes k | m"
        )
    rows = []
    if k == 1:
        one = Fraction(1)
        rows.append(BoundRow("two_split", "trivial at k=1", "1", one))
        rows.append(BoundRow("central_edge", "trivial at k=1", "1", one))
        rows.append(BoundRow("k_split", "trivial at k=1", "1/beta", one))
        rows.append(BoundRow("k_partition", "trivial at k=1", "1/beta", one))
        rows.append(BoundRow("forest_transfer", "trivial at k=1", "1", one))
        return BoundsTable(m, n, k, N, M, tuple(rows), tuple(warnings))
    if k == 2 and N % 2 == 0:
        rows.append(
            BoundRow(
                "two_split",
                "P(uniform tree is 2-splittable)",
                "1/N^2",
                two_split_floor(m, n),
            )
        )
        case = "1/(m n^3)" if big % 2 == 0 else "1/(4 m n^3)"
        rows.append(
            BoundRow(
                "central_edge",
                "P(central edge in tree and splits it evenly)",
                case,
                central_edge_floor(m, n),
            )
        )
    ks = k_split_floor(m, n, k)
    rows.append(
        BoundRow(
            "k_split",
            "P(uniform tree is k-splittable), beta symbolic",
            f"1/(beta^{k * k} n^{3 * k - 3} m^{k - 1})",
            ks,
        )
    )
    rows.append(
        BoundRow(
            "k_partition",
            "P(tree-weighted k-partition is balanced), beta symbolic",
            f"1/(beta^{k * k} n^{5 * k - 5} m^{3 * k - 3})",
            k_partition_floor(m, n, k),
        )
    )
    rows.append(
        BoundRow(
            "forest_transfer",
            "k_split floor transferred to balanced k-forests",
            f"alpha/(N^{k - 1} (M-N+1)^{k - 1})",
            forest_transfer(ks, N, M, k),
        )
    )
    # consistency: transferring the splittable floor with the M-N+1 <= nm
    # estimate reproduces the k-partition exponents (5k-5 and 3k-3)
    assert Fraction(1, small ** (3 * k - 3) * big ** (k - 1)) / Fraction(
        (N * N) ** (k - 1)
    ) == k_partition_floor(m, n, k)
    return BoundsTable(m, n, k, N, M, tuple(rows), tuple(warnings))
