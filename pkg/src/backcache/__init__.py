"""Backhaul-aware content caching placement for wireless networks."""

from .baselines import (
    EnumerationCapError,
    exhaustive_search,
    lcd_placement,
    mpc_formula_placement,
    mpc_placement,
)
from .delay import (
    DelayModel,
    SmoothedObjectiveValue,
    compute_beta,
    exact_objective,
    grad_concave_part,
    segment_delay,
    segment_delay_with_backhaul,
    smooth_objective,
    surrogate,
)
from .estimators import (
    ExhaustivePlacement,
    LcdPlacement,
    MpcFormulaPlacement,
    MpcPlacement,
    ScaPlacement,
    STRATEGIES,
    make_strategy,
)
from .placement import (
    PlacementMatrix,
    dump_placement,
    parse_placement,
    realize_placement,
    replica_counts,
    validate,
)
from .scenario import Scenario, db_to_linear, zipf_popularity
from .simulate import SimConfig, SimEstimate, draw_effective_snr, simulate_segment, simulate_strategy
from .solver import SolverConfig, SolverReport, round_solution, sca_solve, solve_subproblem

__version__ = "0.1.0"
