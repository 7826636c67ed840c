"""Closed-form bound values and identities."""

from __future__ import annotations

from fractions import Fraction

import pytest

from treesplit.bounds import (
    central_edge_floor,
    compute_bounds,
    exit_above_floor,
    forest_transfer,
    grid_edge_count,
    k_partition_floor,
    k_split_floor,
    two_split_floor,
)


def test_two_split_10x10():
    assert two_split_floor(10, 10) == Fraction(1, 10_000)


def test_central_edge_even_long_side():
    assert central_edge_floor(10, 10) == Fraction(1, 10 * 1000)


def test_central_edge_odd_long_side():
    # long side odd forces the quartered bound
    assert central_edge_floor(9, 8) == Fraction(1, 4 * 9 * 8**3)


def test_central_edge_orientation_normalized():
    assert central_edge_floor(4, 10) == central_edge_floor(10, 4)


def test_k1_bounds_all_one():
    table = compute_bounds(7, 5, 1)
    assert all(r.beta1_value == 1 for r in table.rows)


def test_k_floors_at_k2():
    assert k_split_floor(10, 10, 2) == Fraction(1, 10**3 * 10)
    assert k_partition_floor(10, 10, 2) == Fraction(1, 10**5 * 10**3)


def test_transfer_reproduces_partition_exponents():
    # alpha / (N (M-N+1))^{k-1} with M-N+1 replaced by nm = the partition floor
    for m, n, k in [(10, 10, 2), (12, 8, 3), (9, 6, 3)]:
        alpha = k_split_floor(m, n, k)
        N = m * n
        loose = Fraction(alpha) / Fraction((N * N) ** (k - 1))
        assert loose == k_partition_floor(m, n, k)


def test_forest_transfer_value():
    N, M = 100, grid_edge_count(10, 10)
    assert M == 180
    got = forest_transfer(Fraction(1, 10**4), N, M, 2)
    assert got == Fraction(1, 10**4 * 100 * 81)


def test_exit_above_floor():
    assert exit_above_floor(4, 7) == Fraction(4, 8)
    with pytest.raises(ValueError):
        exit_above_floor(0, 7)


def test_table_rows_positive_and_warning():
    table = compute_bounds(12, 8, 3)
    assert all(r.beta1_value > 0 for r in table.rows)
    assert not any("does not divide" in w for w in table.warnings)
    table2 = compute_bounds(10, 10, 4)
    assert any("does not divide" in w for w in table2.warnings)


def test_table_format_mentions_beta():
    text = compute_bounds(10, 10, 2).format()
    assert "beta" in text
    assert "1/N^2" in text
