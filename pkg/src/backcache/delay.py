"""Analytical download-delay model.

The per-segment delay under IR hybrid-ARQ with selection over x candidate
base stations is D(x) = 1 / (1 - beta^x), with
beta = (1 - exp(-(2^(R/m) - 1) / rho))^m.  A segment cached nowhere is
pushed to all K BSs over the backhaul, costing D(K) + delta.

The exact average-delay objective f0 sums weighted per-segment delays.
For optimization the 0/1 indicator is smoothed with a^x (0 < a < 1),
which splits the objective into a convex part f1 and a concave part f2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import Scenario

__all__ = [
    "compute_beta",
    "DelayModel",
    "SmoothedObjectiveValue",
    "segment_delay",
    "segment_delay_with_backhaul",
    "exact_objective",
    "smooth_objective",
    "grad_concave_part",
    "surrogate",
    "validate_replica_vector",
]

DEFAULT_SMOOTHING_A = 0.1
DEFAULT_DOMAIN_FLOOR = 1e-2


def compute_beta(rate: float, buffer: int, avg_snr: float) -> float:
    """Per-slot decoding-failure constant beta in (0, 1)."""
    if rate <= 0:
        raise ValueError("rate must be > 0")
    if buffer < 1:
        raise ValueError("buffer must be >= 1")
    if avg_snr <= 0:
        raise ValueError("avg_snr must be > 0")
    # -expm1 keeps precision for small rate, where beta -> 0.
    return float((-np.expm1(-(2.0 ** (rate / buffer) - 1.0) / avg_snr)) ** buffer)


@dataclass(frozen=True, eq=False)
class DelayModel:
    """Derived constants for objective evaluation on one scenario."""

    beta: float
    base_delay_full: float  # D(K), delay of a fully replicated segment
    segment_weight: np.ndarray
    smoothing_a: float = DEFAULT_SMOOTHING_A
    domain_floor: float = DEFAULT_DOMAIN_FLOOR

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if not 0.0 < self.smoothing_a < 1.0:
            raise ValueError("smoothing_a must lie in (0, 1)")
        if self.domain_floor <= 0:
            raise ValueError("domain_floor must be > 0")
        weights = np.asarray(self.segment_weight, dtype=float)
        weights.setflags(write=False)
        object.__setattr__(self, "segment_weight", weights)

    @classmethod
    def for_scenario(
        cls,
        scenario: Scenario,
        smoothing_a: float = DEFAULT_SMOOTHING_A,
        domain_floor: float = DEFAULT_DOMAIN_FLOOR,
    ) -> "DelayModel":
        beta = compute_beta(scenario.rate, scenario.buffer, scenario.avg_snr)
        return cls(
            beta=beta,
            base_delay_full=float(1.0 / (1.0 - beta**scenario.num_bs)),
            segment_weight=scenario.segment_weights(),
            smoothing_a=smoothing_a,
            domain_floor=domain_floor,
        )


def _delay(x, beta: float):
    """D(x) = 1/(1 - beta^x) for x > 0 (real-valued extension)."""
    return 1.0 / (1.0 - beta**np.asarray(x, dtype=float))


def _delay_prime(x, beta: float):
    """dD/dx = beta^x ln(beta) / (1 - beta^x)^2."""
    bx = beta ** np.asarray(x, dtype=float)
    return bx * np.log(beta) / (1.0 - bx) ** 2


def segment_delay(x_i, model: DelayModel) -> float:
    """Average delay (slots) of a segment replicated at x_i >= 1 BSs."""
    if np.any(np.asarray(x_i) < 1):
        raise ValueError("segment_delay requires x_i >= 1; use "
                         "segment_delay_with_backhaul for uncached segments")
    return float(_delay(x_i, model.beta))


def segment_delay_with_backhaul(x_i, scenario: Scenario, model: DelayModel) -> float:
    """Per-segment delay including the backhaul branch for x_i = 0."""
    if not 0 <= x_i <= scenario.num_bs:
        raise ValueError("x_i must lie in [0, K]")
    if x_i == 0:
        return model.base_delay_full + scenario.backhaul_delay
    return float(_delay(x_i, model.beta))


def validate_replica_vector(x, scenario: Scenario) -> np.ndarray:
    """Check box, integrality and budget constraints; return x as int array."""
    arr = np.asarray(x)
    if arr.shape != (scenario.num_segments,):
        raise ValueError(
            f"replica vector must have length {scenario.num_segments}"
        )
    if not np.all(arr == np.floor(arr)):
        raise ValueError("replica vector must be integer-valued")
    arr = arr.astype(np.int64)
    if arr.min() < 0 or arr.max() > scenario.num_bs:
        raise ValueError("replica counts must lie in [0, K]")
    if arr.sum() > scenario.cache_budget:
        raise ValueError("replica vector exceeds the aggregate cache budget")
    return arr


def delay_table(scenario: Scenario, model: DelayModel) -> np.ndarray:
    """Lookup table t[c] = per-segment delay at replica count c = 0..K."""
    table = np.empty(scenario.num_bs + 1)
    table[0] = model.base_delay_full + scenario.backhaul_delay
    table[1:] = _delay(np.arange(1, scenario.num_bs + 1), model.beta)
    return table


def exact_objective(x, scenario: Scenario, model: DelayModel) -> float:
    """Average download delay f0 of a feasible integer replica vector."""
    arr = validate_replica_vector(x, scenario)
    table = delay_table(scenario, model)
    return float(model.segment_weight @ table[arr])


@dataclass(frozen=True)
class SmoothedObjectiveValue:
    """Value of the smoothed objective f = f1 + f2 (convex + concave)."""

    total: float
    convex_part: float
    concave_part: float


def _check_relaxed_domain(x, scenario: Scenario, model: DelayModel) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.shape != (scenario.num_segments,):
        raise ValueError(
            f"relaxed point must have length {scenario.num_segments}"
        )
    if arr.min() < model.domain_floor - 1e-12:
        raise ValueError("relaxed point below the domain floor")
    if arr.max() > scenario.num_bs + 1e-9:
        raise ValueError("relaxed point above K")
    return arr


def smooth_objective(x, scenario: Scenario, model: DelayModel) -> SmoothedObjectiveValue:
    """Smoothed objective with the 0/1 indicator replaced by a^x."""
    arr = _check_relaxed_domain(x, scenario, model)
    w = model.segment_weight
    a_pow = model.smoothing_a**arr
    d = _delay(arr, model.beta)
    miss_cost = model.base_delay_full + scenario.backhaul_delay
    f1 = float(w @ (d + miss_cost * a_pow))
    f2 = -float(w @ (d * a_pow))
    return SmoothedObjectiveValue(total=f1 + f2, convex_part=f1, concave_part=f2)


def grad_concave_part(x, scenario: Scenario, model: DelayModel) -> np.ndarray:
    """Gradient of the concave part f2."""
    arr = _check_relaxed_domain(x, scenario, model)
    a = model.smoothing_a
    a_pow = a**arr
    d = _delay(arr, model.beta)
    dp = _delay_prime(arr, model.beta)
    return -model.segment_weight * a_pow * (dp + d * np.log(a))


def surrogate(
    x,
    anchor,
    prox_weight: float,
    scenario: Scenario,
    model: DelayModel,
) -> float:
    """Convex majorizer g(x, anchor) = f1(x) + grad f2(anchor)^T (x - anchor)
    + prox_weight * ||x - anchor||^2.

    g(x, anchor) + f2(anchor) upper-bounds f(x), with equality at x = anchor.
    """
    if prox_weight < 0:
        raise ValueError("prox_weight must be >= 0")
    arr = _check_relaxed_domain(x, scenario, model)
    anchor_arr = _check_relaxed_domain(anchor, scenario, model)
    f1 = smooth_objective(arr, scenario, model).convex_part
    g2 = grad_concave_part(anchor_arr, scenario, model)
    step = arr - anchor_arr
    return float(f1 + g2 @ step + prox_weight * (step @ step))
