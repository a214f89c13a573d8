"""Scikit-learn-style wrappers around the placement strategies.

Every strategy is an estimator whose ``fit`` consumes a
:class:`~backcache.scenario.Scenario` and exposes the fitted replica
vector, its exact objective, and a concrete placement tensor.  The
estimators carry ``get_params``/``set_params`` so they compose with
model-selection tooling.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from . import baselines
from .delay import DelayModel, exact_objective
from .placement import PlacementMatrix, realize_placement
from .scenario import Scenario
from .solver import SolverConfig, sca_solve

__all__ = [
    "BasePlacement",
    "ScaPlacement",
    "MpcPlacement",
    "MpcFormulaPlacement",
    "LcdPlacement",
    "ExhaustivePlacement",
    "STRATEGIES",
    "make_strategy",
]


class BasePlacement(BaseEstimator):
    """Common fit surface: compute a replica vector for a scenario."""

    def _replica_vector(self, scenario: Scenario) -> np.ndarray:
        raise NotImplementedError

    def fit(self, scenario: Scenario, y=None):
        if not isinstance(scenario, Scenario):
            raise TypeError("fit expects a Scenario instance")
        self.scenario_ = scenario
        self.replica_vector_ = self._replica_vector(scenario)
        model = DelayModel.for_scenario(scenario)
        self.objective_slots_ = exact_objective(
            self.replica_vector_, scenario, model
        )
        return self

    def predict(self, scenario: Scenario | None = None) -> np.ndarray:
        """Return the fitted replica vector (the scenario must match fit)."""
        self._check_fitted()
        if scenario is not None and scenario is not self.scenario_:
            raise ValueError("predict scenario differs from the fitted one")
        return self.replica_vector_

    def to_placement(self) -> PlacementMatrix:
        """Realize the fitted replica vector as a per-BS cache tensor."""
        self._check_fitted()
        return realize_placement(self.replica_vector_, self.scenario_)

    def _check_fitted(self):
        if not hasattr(self, "replica_vector_"):
            raise RuntimeError("estimator is not fitted")


class ScaPlacement(BasePlacement):
    """Optimized placement via successive convex approximation."""

    def __init__(
        self,
        step_size: float = 1.0,
        prox_weight: float = 1e-2,
        smoothing_a: float = 0.1,
        domain_floor: float = 1e-2,
        tol: float = 1e-4,
        max_iters: int = 500,
        init: str = "popularity",
    ):
        self.step_size = step_size
        self.prox_weight = prox_weight
        self.smoothing_a = smoothing_a
        self.domain_floor = domain_floor
        self.tol = tol
        self.max_iters = max_iters
        self.init = init

    def _replica_vector(self, scenario: Scenario) -> np.ndarray:
        config = SolverConfig(
            step_size=self.step_size,
            prox_weight=self.prox_weight,
            smoothing_a=self.smoothing_a,
            domain_floor=self.domain_floor,
            tol=self.tol,
            max_iters=self.max_iters,
            init=self.init,
        )
        self.report_ = sca_solve(scenario, config)
        return self.report_.rounded

    @property
    def iterations_(self) -> int:
        self._check_fitted()
        return self.report_.iterations


class MpcPlacement(BasePlacement):
    """Cache the top-C segments at every BS."""

    def _replica_vector(self, scenario: Scenario) -> np.ndarray:
        return baselines.mpc_placement(scenario)


class MpcFormulaPlacement(BasePlacement):
    """MPC variant replicating the first K segments C times each."""

    def _replica_vector(self, scenario: Scenario) -> np.ndarray:
        return baselines.mpc_formula_placement(scenario)


class LcdPlacement(BasePlacement):
    """Cache one copy each of the K*C most popular segments."""

    def _replica_vector(self, scenario: Scenario) -> np.ndarray:
        return baselines.lcd_placement(scenario)


class ExhaustivePlacement(BasePlacement):
    """Enumerate every feasible replica vector (small instances only)."""

    def __init__(self, enumeration_cap: int = baselines.DEFAULT_ENUMERATION_CAP):
        self.enumeration_cap = enumeration_cap

    def _replica_vector(self, scenario: Scenario) -> np.ndarray:
        model = DelayModel.for_scenario(scenario)
        vector, self.optimum_slots_ = baselines.exhaustive_search(
            scenario, model, cap=self.enumeration_cap
        )
        return vector


STRATEGIES = {
    "sca": ScaPlacement,
    "mpc": MpcPlacement,
    "mpc-paper-formula": MpcFormulaPlacement,
    "lcd": LcdPlacement,
    "exhaustive": ExhaustivePlacement,
}


def make_strategy(name: str, **params) -> BasePlacement:
    """Instantiate a strategy estimator by its registry name."""
    try:
        cls = STRATEGIES[name]
    except KeyError:
        raise ValueError(
            f"unknown strategy {name!r}; choose from {sorted(STRATEGIES)}"
        ) from None
    return cls(**params)
