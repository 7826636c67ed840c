"""Small statistical helpers shared by experiments and the CLI."""

from __future__ import annotations

import math

Z99 = 2.5758293035489004  # two-sided 99% normal quantile


def wilson_score_interval(successes: int, trials: int, z: float = Z99) -> tuple[float, float]:
    """Binomial confidence interval; well-behaved at 0 and n successes."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = (
        z
        * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
        / denom
    )
    return (max(0.0, center - half), min(1.0, center + half))
