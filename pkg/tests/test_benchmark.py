"""Full-scale benchmark: excluded from the default run via the `slow`
marker. Run with `pytest -m slow tests/test_benchmark.py -s`."""

import time

import numpy as np
import pytest

from backcache import (
    DelayModel,
    exact_objective,
    lcd_placement,
    mpc_placement,
    sca_solve,
)
from conftest import make_scenario


@pytest.mark.slow
def test_full_scale_single_delta():
    scenario = make_scenario(
        num_bs=50,
        num_files=1000,
        segments_per_file=1000,
        cache_capacity=10_000,
        backhaul_delay=2.0,
        zipf_gamma=0.6,
    )
    model = DelayModel.for_scenario(scenario)

    start = time.monotonic()
    report = sca_solve(scenario)
    elapsed = time.monotonic() - start

    mpc = exact_objective(mpc_placement(scenario), scenario, model)
    lcd = exact_objective(lcd_placement(scenario), scenario, model)

    print(
        f"full-scale: sca={report.objective_slots:.4f} lcd={lcd:.4f} "
        f"mpc={mpc:.4f} iters={report.iterations} time={elapsed:.1f}s"
    )
    assert elapsed < 600.0
    assert report.objective_slots < lcd
    assert report.objective_slots < mpc
    rounded = np.asarray(report.rounded)
    assert rounded.sum() <= scenario.cache_budget
    assert rounded.min() >= 0 and rounded.max() <= scenario.num_bs
