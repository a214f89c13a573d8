"""Sweep orchestration: evaluate strategies over backhaul-delay values
and emit machine-readable results."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .baselines import EnumerationCapError
from .config import ExperimentConfig
from .estimators import ScaPlacement, make_strategy
from .placement import dump_placement, realize_placement
from .simulate import simulate_strategy

__all__ = ["SweepRow", "run_sweep", "emit_csv", "dump_row_placements"]

CSV_HEADER = (
    "delta,strategy,objective_slots,simulated_mean_slots,"
    "simulated_stderr,budget_used,iterations"
)


@dataclass
class SweepRow:
    delta: float
    strategy: str
    objective_slots: float | None
    simulated_mean: float | None
    simulated_stderr: float | None
    budget_used: int | None
    iterations: int
    replica_vector: np.ndarray | None
    refused: str | None = None


def _run_cell(config: ExperimentConfig, delta: float, name: str,
              seed_override: int | None) -> SweepRow:
    scenario = config.to_scenario(backhaul_delay=delta)
    params = {}
    if name == "sca":
        solver = config.solver_config()
        params = dict(
            step_size=solver.step_size,
            prox_weight=solver.prox_weight,
            smoothing_a=solver.smoothing_a,
            domain_floor=solver.domain_floor,
            tol=solver.tol,
            max_iters=solver.max_iters,
            init=solver.init,
        )
    estimator = make_strategy(name, **params)
    try:
        estimator.fit(scenario)
    except EnumerationCapError as exc:
        return SweepRow(
            delta=delta,
            strategy=name,
            objective_slots=None,
            simulated_mean=None,
            simulated_stderr=None,
            budget_used=None,
            iterations=0,
            replica_vector=None,
            refused=str(exc),
        )
    sim_mean = sim_err = None
    if config.sim_trials > 0:
        estimate = simulate_strategy(
            estimator.replica_vector_,
            scenario,
            config.sim_config(seed_override),
        )
        sim_mean, sim_err = estimate.mean_delay, estimate.std_error
    iterations = (
        estimator.iterations_ if isinstance(estimator, ScaPlacement) else 0
    )
    return SweepRow(
        delta=delta,
        strategy=name,
        objective_slots=estimator.objective_slots_,
        simulated_mean=sim_mean,
        simulated_stderr=sim_err,
        budget_used=int(estimator.replica_vector_.sum()),
        iterations=iterations,
        replica_vector=estimator.replica_vector_,
    )


def run_sweep(
    config: ExperimentConfig,
    strategies: list[str] | None = None,
    delta_values: list[float] | None = None,
    seed_override: int | None = None,
    threads: int = 1,
) -> list[SweepRow]:
    """Evaluate every (delta, strategy) cell; rows come back sorted by
    (delta, strategy) regardless of execution order."""
    deltas = delta_values if delta_values is not None else config.delta_values()
    names = strategies if strategies is not None else config.strategies()
    if not names:
        raise ValueError("no strategies requested")
    cells = [(delta, name) for delta in deltas for name in sorted(names)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(
                pool.map(
                    lambda c: _run_cell(config, c[0], c[1], seed_override),
                    cells,
                )
            )
    else:
        rows = [_run_cell(config, d, n, seed_override) for d, n in cells]
    rows.sort(key=lambda r: (r.delta, r.strategy))
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    return format(value, ".9g")


def emit_csv(rows: list[SweepRow], path) -> None:
    """Write the sweep table; refused cells carry the word `refused` in
    the objective column."""
    lines = [CSV_HEADER]
    for row in rows:
        objective = "refused" if row.refused else _fmt(row.objective_slots)
        lines.append(
            ",".join(
                [
                    _fmt(row.delta),
                    row.strategy,
                    objective,
                    _fmt(row.simulated_mean),
                    _fmt(row.simulated_stderr),
                    "" if row.budget_used is None else str(row.budget_used),
                    str(row.iterations),
                ]
            )
        )
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def dump_row_placements(rows: list[SweepRow], directory, config: ExperimentConfig) -> None:
    """Dump each row's realized placement in the sparse text format, so
    every emitted objective is recomputable from disk."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for row in rows:
        if row.replica_vector is None:
            continue
        scenario = config.to_scenario(backhaul_delay=row.delta)
        placement = realize_placement(row.replica_vector, scenario)
        name = f"delta_{_fmt(row.delta)}_{row.strategy}.txt"
        dump_placement(placement, directory / name)
