"""Experiment configuration: a strict YAML schema with scenario, solver,
simulation, and sweep blocks.  Unknown keys are a hard error."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .estimators import STRATEGIES
from .scenario import Scenario, db_to_linear, zipf_popularity
from .solver import SolverConfig
from .simulate import SimConfig

__all__ = ["ExperimentConfig", "ConfigError", "load_config", "dump_config"]

_SCENARIO_KEYS = {
    "num_bs",
    "num_files",
    "segments_per_file",
    "cache_capacity",
    "backhaul_delay_slots",
    "rate_bits",
    "buffer_m",
    "avg_snr_db",
    "zipf_gamma",
    "popularity",
}
_SOLVER_KEYS = {
    "step_size",
    "prox_weight",
    "smoothing_a",
    "domain_floor",
    "tol",
    "max_iters",
    "init",
    "multiplier_tol",
}
_SIM_KEYS = {"trials", "seed"}
_SWEEP_KEYS = {"delta_values", "strategies"}
_TOP_KEYS = {"scenario", "solver", "sim", "sweep"}


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


def _check_keys(block: dict, allowed: set, where: str):
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} keys: {sorted(unknown)}")


@dataclass
class ExperimentConfig:
    scenario: dict
    solver: dict = field(default_factory=dict)
    sim: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)

    def __post_init__(self):
        _check_keys(self.scenario, _SCENARIO_KEYS, "scenario")
        _check_keys(self.solver, _SOLVER_KEYS, "solver")
        _check_keys(self.sim, _SIM_KEYS, "sim")
        _check_keys(self.sweep, _SWEEP_KEYS, "sweep")
        has_zipf = "zipf_gamma" in self.scenario
        has_pop = "popularity" in self.scenario
        if has_zipf == has_pop:
            raise ConfigError(
                "scenario must define exactly one of zipf_gamma / popularity"
            )
        for name in self.strategies():
            if name not in STRATEGIES:
                raise ConfigError(
                    f"unknown strategy {name!r}; choose from {sorted(STRATEGIES)}"
                )

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("top level must be a mapping")
        _check_keys(raw, _TOP_KEYS, "top-level")
        if "scenario" not in raw:
            raise ConfigError("a scenario block is required")
        return cls(
            scenario=dict(raw["scenario"]),
            solver=dict(raw.get("solver", {})),
            sim=dict(raw.get("sim", {})),
            sweep=dict(raw.get("sweep", {})),
        )

    def to_dict(self) -> dict:
        out = {"scenario": dict(self.scenario)}
        for name in ("solver", "sim", "sweep"):
            block = getattr(self, name)
            if block:
                out[name] = dict(block)
        return out

    def to_scenario(self, backhaul_delay: float | None = None) -> Scenario:
        sc = self.scenario
        num_files = int(sc["num_files"])
        if "zipf_gamma" in sc:
            popularity = zipf_popularity(num_files, float(sc["zipf_gamma"]))
        else:
            popularity = np.asarray(sc["popularity"], dtype=float)
        delta = sc.get("backhaul_delay_slots", 0.0)
        if backhaul_delay is not None:
            delta = backhaul_delay
        return Scenario(
            num_bs=int(sc["num_bs"]),
            num_files=num_files,
            segments_per_file=int(sc["segments_per_file"]),
            cache_capacity=int(sc["cache_capacity"]),
            backhaul_delay=float(delta),
            rate=float(sc["rate_bits"]),
            buffer=int(sc.get("buffer_m", 1)),
            avg_snr=db_to_linear(float(sc["avg_snr_db"])),
            popularity=popularity,
        )

    def solver_config(self) -> SolverConfig:
        return SolverConfig(**self.solver)

    def sim_config(self, seed_override: int | None = None) -> SimConfig:
        seed = self.sim.get("seed", 0)
        if seed_override is not None:
            seed = seed_override
        return SimConfig(
            trials=int(self.sim.get("trials", 0) or 1),
            rng_seed=int(seed),
        )

    @property
    def sim_trials(self) -> int:
        return int(self.sim.get("trials", 0))

    def delta_values(self) -> list[float]:
        values = self.sweep.get("delta_values")
        if values is None:
            return [float(self.scenario.get("backhaul_delay_slots", 0.0))]
        return [float(v) for v in values]

    def strategies(self) -> list[str]:
        return list(self.sweep.get("strategies", []))


def load_config(path) -> ExperimentConfig:
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return ExperimentConfig.from_dict(raw)


def dump_config(config: ExperimentConfig, path) -> None:
    Path(path).write_text(
        yaml.safe_dump(config.to_dict(), sort_keys=True), encoding="utf-8"
    )
