"""Monte Carlo simulation of the IR hybrid-ARQ download process.

This is the independent validation path for the analytical delay model:
it draws per-slot SNRs (max over candidate BSs of exponential fades),
accumulates mutual information over a sliding window of m slots, and
counts slots until the rate target is met.  None of the closed-form
delay expressions are used here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import Scenario

__all__ = [
    "SimConfig",
    "SimEstimate",
    "draw_effective_snr",
    "simulate_segment",
    "simulate_strategy",
]


@dataclass(frozen=True)
class SimConfig:
    trials: int = 100_000
    rng_seed: int = 0
    max_slots_per_segment: int = 1_000_000

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.max_slots_per_segment < 1:
            raise ValueError("max_slots_per_segment must be >= 1")


@dataclass(frozen=True)
class SimEstimate:
    mean_delay: float
    std_error: float
    trials_used: int


def _make_rng(seed: int) -> np.random.Generator:
    # Counter-based generator: reproducible and cheap to fork by key.
    return np.random.Generator(np.random.Philox(key=seed))


def draw_effective_snr(
    num_candidates: int,
    avg_snr: float,
    rng: np.random.Generator,
    size: int | None = None,
):
    """Best-candidate SNR: max of |Phi| exponential draws with mean avg_snr.

    Returns a scalar when ``size`` is None, else a length-``size`` array.
    """
    if num_candidates < 1:
        raise ValueError("num_candidates must be >= 1")
    n = 1 if size is None else size
    draws = avg_snr * rng.standard_exponential((n, num_candidates))
    best = draws.max(axis=1)
    return float(best[0]) if size is None else best


def _segment_slot_counts(
    num_trials: int,
    num_candidates: int,
    scenario: Scenario,
    rng: np.random.Generator,
    max_slots: int,
) -> np.ndarray:
    """Slots until the windowed mutual information reaches the rate target,
    one entry per trial."""
    m = scenario.buffer
    rate = scenario.rate
    slots = np.zeros(num_trials, dtype=np.int64)
    active = np.arange(num_trials)
    window = np.zeros((m, num_trials))  # circular buffer of log2(1 + snr)
    window_sum = np.zeros(num_trials)
    s = 0
    while active.size:
        if s >= max_slots:
            raise RuntimeError(
                f"segment not decodable within {max_slots} slots for "
                f"{active.size} trials; parameters imply a near-one "
                "error probability"
            )
        snr = draw_effective_snr(
            num_candidates, scenario.avg_snr, rng, size=active.size
        )
        info = np.log2(1.0 + snr)
        row = s % m
        window_sum[active] += info - window[row, active]
        window[row, active] = info
        s += 1
        done = window_sum[active] >= rate
        slots[active[done]] = s
        active = active[~done]
    return slots


def _estimate(values: np.ndarray) -> SimEstimate:
    n = values.size
    std = float(values.std(ddof=1)) if n > 1 else 0.0
    return SimEstimate(
        mean_delay=float(values.mean()),
        std_error=std / np.sqrt(n),
        trials_used=n,
    )


def simulate_segment(
    num_candidates: int,
    scenario: Scenario,
    sim_config: SimConfig,
    rng: np.random.Generator | None = None,
) -> SimEstimate:
    """Monte Carlo mean download delay (slots) of one cached segment."""
    if num_candidates < 1:
        raise ValueError("num_candidates must be >= 1")
    rng = rng or _make_rng(sim_config.rng_seed)
    slots = _segment_slot_counts(
        sim_config.trials,
        num_candidates,
        scenario,
        rng,
        sim_config.max_slots_per_segment,
    )
    return _estimate(slots.astype(float))


def simulate_strategy(
    x,
    scenario: Scenario,
    sim_config: SimConfig,
) -> SimEstimate:
    """Monte Carlo mean file download delay under a replica vector.

    Each trial samples a file by popularity and sums per-segment delays;
    uncached segments pay the backhaul delay and are then served with
    all-K diversity.
    """
    from .delay import validate_replica_vector

    arr = validate_replica_vector(x, scenario)
    rng = _make_rng(sim_config.rng_seed)
    trials = sim_config.trials
    files = rng.choice(scenario.num_files, size=trials, p=scenario.popularity)
    total = np.zeros(trials)
    per_file = scenario.segments_per_file
    for l in range(per_file):
        replicas = arr[files * per_file + l]
        candidates = np.where(replicas > 0, replicas, scenario.num_bs)
        total[replicas == 0] += scenario.backhaul_delay
        # Group trials by candidate count; unique() order keeps the RNG
        # consumption deterministic.
        for count in np.unique(candidates):
            mask = candidates == count
            total[mask] += _segment_slot_counts(
                int(mask.sum()),
                int(count),
                scenario,
                rng,
                sim_config.max_slots_per_segment,
            )
    return _estimate(total)
