"""Reference placement strategies and the exhaustive-search oracle."""

from __future__ import annotations

import numpy as np

from .delay import DelayModel, delay_table
from .scenario import Scenario

__all__ = [
    "mpc_placement",
    "mpc_formula_placement",
    "lcd_placement",
    "exhaustive_search",
    "EnumerationCapError",
    "DEFAULT_ENUMERATION_CAP",
]

DEFAULT_ENUMERATION_CAP = 10_000_000


def _popularity_order(scenario: Scenario) -> np.ndarray:
    """Segment indices by decreasing request weight, ties by index."""
    return np.argsort(-scenario.segment_weights(), kind="stable")


def mpc_placement(scenario: Scenario) -> np.ndarray:
    """Most-popular-content baseline: every BS caches the same top-C
    segments, so each gets full K-way replication."""
    x = np.zeros(scenario.num_segments, dtype=np.int64)
    top = _popularity_order(scenario)[: scenario.cache_capacity]
    x[top] = scenario.num_bs
    return x


def mpc_formula_placement(scenario: Scenario) -> np.ndarray:
    """MPC variant that replicates the first K segments C times each
    (clamped to the per-segment cap of K copies)."""
    x = np.zeros(scenario.num_segments, dtype=np.int64)
    count = min(scenario.num_bs, scenario.num_segments)
    x[_popularity_order(scenario)[:count]] = min(
        scenario.cache_capacity, scenario.num_bs
    )
    return x


def lcd_placement(scenario: Scenario) -> np.ndarray:
    """Largest-content-diversity baseline: one copy each of the
    min(K*C, F*L) most popular segments."""
    x = np.zeros(scenario.num_segments, dtype=np.int64)
    count = min(scenario.cache_budget, scenario.num_segments)
    x[_popularity_order(scenario)[:count]] = 1
    return x


class EnumerationCapError(ValueError):
    """Raised when exhaustive search would exceed the enumeration cap."""


def exhaustive_search(
    scenario: Scenario,
    model: DelayModel,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> tuple[np.ndarray, float]:
    """Enumerate every budget-feasible replica vector and return the
    minimizer of the exact objective (lexicographically first on ties).

    Enumeration walks lexicographic order; the leading coordinates are
    generated recursively with budget pruning and the trailing block is
    evaluated vectorized.
    """
    n = scenario.num_segments
    radix = scenario.num_bs + 1
    total = radix**n
    if total > cap:
        raise EnumerationCapError(
            f"exhaustive search needs {total} points, cap is {cap}"
        )
    budget = scenario.cache_budget
    costs = np.outer(model.segment_weight, delay_table(scenario, model))

    # Trailing block: full grid over the last `tail` coordinates.
    tail = 1
    while tail < n and radix ** (tail + 1) <= 2**20:
        tail += 1
    shape = (radix,) * tail
    grid = np.indices(shape).reshape(tail, -1)  # lexicographic columns
    block_sums = grid.sum(axis=0)
    block_costs = np.zeros(grid.shape[1])
    for p in range(tail):
        block_costs += costs[n - tail + p][grid[p]]

    best_val = np.inf
    best_vec = None

    def scan(prefix: list[int], prefix_sum: int, prefix_cost: float):
        nonlocal best_val, best_vec
        if len(prefix) == n - tail:
            feasible = block_sums <= budget - prefix_sum
            if not feasible.any():
                return
            vals = np.where(feasible, block_costs, np.inf)
            j = int(np.argmin(vals))
            val = prefix_cost + vals[j]
            if val < best_val:
                best_val = val
                best_vec = np.concatenate(
                    [np.asarray(prefix, dtype=np.int64), grid[:, j]]
                )
            return
        i = len(prefix)
        for v in range(radix):
            if prefix_sum + v > budget:
                break
            scan(prefix + [v], prefix_sum + v, prefix_cost + costs[i, v])

    scan([], 0, 0.0)
    assert best_vec is not None  # the all-zero vector is always feasible
    return best_vec, float(best_val)
