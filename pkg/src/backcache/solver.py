"""Successive convex approximation over the relaxed placement problem.

Each iteration minimizes the convex majorizer of the smoothed DC
objective subject to the aggregate cache budget and the per-coordinate
box [eps, K].  The majorizer is separable plus one linear constraint, so
the subproblem is solved by dual bisection on the budget multiplier with
a vectorized per-coordinate derivative bisection.  The converged relaxed
point is rounded to an integer replica vector by a greedy local search
on the exact objective.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .delay import (
    DelayModel,
    _delay,
    _delay_prime,
    delay_table,
    exact_objective,
    grad_concave_part,
    smooth_objective,
)
from .scenario import Scenario

__all__ = [
    "SolverConfig",
    "SolverReport",
    "SubproblemSolution",
    "solve_subproblem",
    "sca_solve",
    "round_solution",
]

INIT_CHOICES = ("uniform", "popularity", "mpc", "lcd")

_COORD_BISECT_ITERS = 60  # drives the interval below float64 spacing
_ABS_STEP_TOL = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    step_size: float = 1.0
    prox_weight: float = 1e-2
    smoothing_a: float = 0.1
    domain_floor: float = 1e-2
    tol: float = 1e-4
    max_iters: int = 500
    init: str = "popularity"
    multiplier_tol: float = 1e-8
    max_dual_iters: int = 200
    diminishing_steps: bool = False  # eta_t = 1/(1 + t/50) instead of fixed

    def __post_init__(self):
        if not 0 < self.step_size <= 1:
            raise ValueError("step_size must lie in (0, 1]")
        for name in ("prox_weight", "tol", "multiplier_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.max_iters < 1 or self.max_dual_iters < 1:
            raise ValueError("iteration limits must be >= 1")
        if self.init not in INIT_CHOICES:
            raise ValueError(f"init must be one of {INIT_CHOICES}")


@dataclass(frozen=True)
class SubproblemSolution:
    """Minimizer of the majorizer plus its KKT diagnostics."""

    x: np.ndarray
    multiplier: float
    stationarity_residual: float
    budget_slack: float


@dataclass
class SolverReport:
    relaxed: np.ndarray
    rounded: np.ndarray
    objective_slots: float  # exact objective of the rounded vector
    iterations: int
    converged: bool
    trace: list[tuple[float, float]] = field(default_factory=list)  # (f, step)


def _coordinate_minimizers(
    derivative, lam: float, lo: float, hi: float
) -> np.ndarray:
    """Vectorized minimizers of strictly convex 1-D pieces over [lo, hi].

    ``derivative(x) + lam`` is increasing in each coordinate; bisection
    runs a fixed number of rounds, driving the bracket width below
    float64 spacing.
    """
    d_lo = derivative(lo) + lam
    d_hi = derivative(hi) + lam
    n = np.broadcast(d_lo, d_hi).shape[0] if np.ndim(d_lo) else 1
    x_lo = np.full(n, lo)
    x_hi = np.full(n, hi)
    at_lo = d_lo >= 0
    at_hi = d_hi <= 0
    x_hi[at_lo] = lo
    x_lo[at_hi] = hi
    x_hi[at_hi] = hi
    for _ in range(_COORD_BISECT_ITERS):
        mid = 0.5 * (x_lo + x_hi)
        pos = derivative(mid) + lam >= 0
        x_hi = np.where(pos, mid, x_hi)
        x_lo = np.where(pos, x_lo, mid)
    return 0.5 * (x_lo + x_hi)


def solve_subproblem(
    anchor,
    config: SolverConfig,
    scenario: Scenario,
    model: DelayModel,
) -> SubproblemSolution:
    """Minimize the majorizer at ``anchor`` over the budget-capped box."""
    anchor_arr = np.asarray(anchor, dtype=float)
    n = anchor_arr.size
    eps = model.domain_floor
    num_bs = scenario.num_bs
    budget = float(scenario.cache_budget)
    w = model.segment_weight
    beta = model.beta
    a = model.smoothing_a
    log_a = np.log(a)
    miss_cost = model.base_delay_full + scenario.backhaul_delay
    g2 = grad_concave_part(anchor_arr, scenario, model)
    rho = config.prox_weight

    # Coordinates sharing (weight, anchor, gradient) have identical
    # subproblems; collapse them so large instances stay cheap.
    keyed = np.column_stack([w, anchor_arr, g2])
    uniq, inverse = np.unique(keyed, axis=0, return_inverse=True)
    counts = np.bincount(inverse, minlength=uniq.shape[0]).astype(float)
    w_u, anchor_u, g2_u = uniq[:, 0], uniq[:, 1], uniq[:, 2]

    def derivative(x):
        return (
            w_u * (_delay_prime(x, beta) + miss_cost * a**x * log_a)
            + g2_u
            + 2.0 * rho * (x - anchor_u)
        )

    def solve_for(lam: float) -> np.ndarray:
        return _coordinate_minimizers(derivative, lam, eps, float(num_bs))

    x_u = solve_for(0.0)
    lam = 0.0
    if counts @ x_u > budget + 1e-12:
        hi = 1.0
        for _ in range(config.max_dual_iters):
            if counts @ solve_for(hi) <= budget:
                break
            hi *= 2.0
        else:
            raise RuntimeError("failed to bracket the budget multiplier")
        lo = 0.0
        for _ in range(config.max_dual_iters):
            x_hi = solve_for(hi)
            slack = budget - float(counts @ x_hi)
            if hi - lo <= config.multiplier_tol and hi * slack <= 1e-9:
                break
            mid = 0.5 * (lo + hi)
            if counts @ solve_for(mid) > budget:
                lo = mid
            else:
                hi = mid
        else:
            raise RuntimeError(
                "budget-multiplier bisection did not converge; check the "
                "solver configuration"
            )
        lam = hi  # budget-feasible side of the bracket
        x_u = solve_for(lam)

    d = derivative(x_u) + lam
    interior_res = np.abs(d)
    res = np.where(
        x_u <= eps + 1e-9,
        np.maximum(0.0, -d),
        np.where(x_u >= num_bs - 1e-9, np.maximum(0.0, d), interior_res),
    )
    x = x_u[inverse]
    slack = budget - float(counts @ x_u)
    return SubproblemSolution(
        x=x,
        multiplier=lam,
        stationarity_residual=float(res.max(initial=0.0)),
        budget_slack=slack,
    )


def _initial_point(
    scenario: Scenario, model: DelayModel, config: SolverConfig
) -> np.ndarray:
    n = scenario.num_segments
    eps = model.domain_floor
    num_bs = float(scenario.num_bs)
    budget = float(scenario.cache_budget)
    w = model.segment_weight
    if config.init == "uniform":
        x = np.full(n, budget / n)
    elif config.init == "popularity":
        x = budget * w / w.sum()
    elif config.init == "mpc":
        from .baselines import mpc_placement

        x = mpc_placement(scenario).astype(float)
    else:  # lcd
        from .baselines import lcd_placement

        x = lcd_placement(scenario).astype(float)
    x = np.clip(x, eps, num_bs)
    total = x.sum()
    if total > budget:
        # Raising small entries to the floor can overshoot the budget;
        # shrink toward the floor to restore exact feasibility.
        scale = (budget - n * eps) / (total - n * eps)
        x = eps + scale * (x - eps)
    return x


def sca_solve(scenario: Scenario, config: SolverConfig | None = None) -> SolverReport:
    """Run the SCA loop and round the converged point."""
    config = config or SolverConfig()
    model = DelayModel.for_scenario(
        scenario,
        smoothing_a=config.smoothing_a,
        domain_floor=config.domain_floor,
    )
    n = scenario.num_segments
    if scenario.cache_budget < n * model.domain_floor:
        # The relaxed box is infeasible (tiny or zero budget); fall back
        # to greedy rounding from the empty placement.
        rounded = round_solution(np.zeros(n), scenario, model)
        return SolverReport(
            relaxed=np.zeros(n),
            rounded=rounded,
            objective_slots=exact_objective(rounded, scenario, model),
            iterations=0,
            converged=True,
        )

    x = _initial_point(scenario, model, config)
    trace = [(smooth_objective(x, scenario, model).total, float("nan"))]
    converged = False
    iterations = 0
    for t in range(config.max_iters):
        sub = solve_subproblem(x, config, scenario, model)
        eta = config.step_size
        if config.diminishing_steps:
            eta = config.step_size / (1.0 + t / 50.0)
        x_new = x + eta * (sub.x - x)
        step = float(np.linalg.norm(x_new - x))
        trace.append((smooth_objective(x_new, scenario, model).total, step))
        denom = float(np.linalg.norm(x))
        x = x_new
        iterations = t + 1
        if step < _ABS_STEP_TOL or (denom > 0 and step / denom < config.tol):
            converged = True
            break

    rounded = round_solution(x, scenario, model)
    return SolverReport(
        relaxed=x,
        rounded=rounded,
        objective_slots=exact_objective(rounded, scenario, model),
        iterations=iterations,
        converged=converged,
        trace=trace,
    )


def round_solution(x_relaxed, scenario: Scenario, model: DelayModel) -> np.ndarray:
    """Round a relaxed point to a feasible integer replica vector.

    Floors every coordinate, then greedily applies the best
    exact-objective-improving move until none remains.  Moves are unit
    increments (spend one budget unit) and resets to zero (reclaim the
    coordinate's budget); both gains follow from the separable objective,
    so the result never exceeds the floored vector's objective.  Already
    integral inputs are returned unchanged.
    """
    arr = np.asarray(x_relaxed, dtype=float)
    floored = np.floor(arr + 1e-12).astype(np.int64)
    floored = np.clip(floored, 0, scenario.num_bs)
    if np.array_equal(arr, floored):
        return floored
    return _greedy_improve(floored, scenario, model)


def _greedy_improve(x0: np.ndarray, scenario: Scenario, model: DelayModel) -> np.ndarray:
    num_bs = scenario.num_bs
    budget = scenario.cache_budget
    table = delay_table(scenario, model)
    w = model.segment_weight

    # Coordinates with equal (weight, level) are interchangeable; work on
    # groups and batch-apply moves so million-segment vectors stay tractable.
    keyed = np.column_stack([w, x0.astype(float)])
    uniq, inverse = np.unique(keyed, axis=0, return_inverse=True)
    n_groups = uniq.shape[0]
    group_w = uniq[:, 0]
    # occupancy[g][level] = number of members of group g currently at level
    occupancy = [dict() for _ in range(n_groups)]
    for g in range(n_groups):
        occupancy[g][int(uniq[g, 1])] = 0
    members_of = [[] for _ in range(n_groups)]
    for i, g in enumerate(inverse):
        occupancy[g][int(x0[i])] += 1
        members_of[g].append(i)
    used = int(x0.sum())

    def inc_gain(g: int, level: int) -> float:
        return group_w[g] * (table[level] - table[level + 1])

    def drop_gain(g: int, level: int) -> float:
        return group_w[g] * (table[level] - table[0])

    inc_heap: list[tuple[float, int, int]] = []
    drop_heap: list[tuple[float, int, int]] = []

    def push_level(g: int, level: int) -> None:
        if level < num_bs:
            gain = inc_gain(g, level)
            if gain > 0:
                heapq.heappush(inc_heap, (-gain, g, level))
        if level >= 1:
            gain = drop_gain(g, level)
            if gain > 0:
                heapq.heappush(drop_heap, (-gain, g, level))

    for g in range(n_groups):
        for level in occupancy[g]:
            push_level(g, level)

    def peek_valid(heap, need_budget: bool):
        while heap:
            neg_gain, g, level = heap[0]
            if occupancy[g].get(level, 0) == 0:
                heapq.heappop(heap)
                continue
            if need_budget and used >= budget:
                return None  # blocked until a drop frees budget
            return -neg_gain, g, level
        return None

    while True:
        inc = peek_valid(inc_heap, need_budget=True)
        drop = peek_valid(drop_heap, need_budget=False)
        if inc is None and drop is None:
            break
        if drop is None or (inc is not None and inc[0] >= drop[0]):
            gain, g, level = inc
            count = occupancy[g][level]
            n_apply = min(count, budget - used)
            occupancy[g][level] -= n_apply
            new_level = level + 1
            if occupancy[g].get(new_level, 0) == 0:
                occupancy[g][new_level] = 0
                push_level(g, new_level)
            occupancy[g][new_level] += n_apply
            used += n_apply
        else:
            gain, g, level = drop
            count = occupancy[g][level]
            occupancy[g][level] = 0
            if occupancy[g].get(0, 0) == 0 and level != 0:
                occupancy[g][0] = 0
                push_level(g, 0)
            occupancy[g][0] += count
            used -= level * count

    out = np.empty_like(x0)
    for g in range(n_groups):
        # Highest final levels go to the lowest member indices.
        levels = sorted(occupancy[g].items(), key=lambda kv: -kv[0])
        members = sorted(members_of[g])
        pos = 0
        for level, count in levels:
            for i in members[pos : pos + count]:
                out[i] = level
            pos += count
    return out
