import numpy as np
import pytest

from backcache import DelayModel, exact_objective, sca_solve, smooth_objective
from backcache.solver import SolverConfig, round_solution, solve_subproblem
from backcache import surrogate
from conftest import make_scenario, random_scenario


class TestSubproblem:
    def test_inactive_budget_matches_unconstrained_minimizers(self):
        # C = F*L, so the box alone binds; compare against scipy's
        # independent bounded scalar minimizer coordinate by coordinate.
        from scipy.optimize import minimize_scalar

        scenario = make_scenario(cache_capacity=9, backhaul_delay=1.0)
        model = DelayModel.for_scenario(scenario)
        config = SolverConfig()
        rng = np.random.default_rng(20)
        anchor = rng.uniform(model.domain_floor, scenario.num_bs, 9)
        sub = solve_subproblem(anchor, config, scenario, model)
        assert sub.multiplier == 0.0

        for i in range(9):
            def objective(v):
                x = anchor.copy()
                x[i] = v
                return surrogate(x, anchor, config.prox_weight, scenario, model)

            best = minimize_scalar(
                objective,
                bounds=(model.domain_floor, scenario.num_bs),
                method="bounded",
                options={"xatol": 1e-10},
            )
            assert sub.x[i] == pytest.approx(best.x, abs=1e-6)

    def test_two_coordinate_instance_matches_grid_search(self):
        scenario = make_scenario(
            num_bs=3,
            num_files=1,
            segments_per_file=2,
            cache_capacity=1,
            backhaul_delay=2.0,
            popularity=[1.0],
        )
        model = DelayModel.for_scenario(scenario)
        config = SolverConfig()
        anchor = np.array([1.3, 0.4])
        sub = solve_subproblem(anchor, config, scenario, model)

        grid = np.arange(model.domain_floor, scenario.num_bs + 5e-4, 1e-3)
        best_val, best_point = np.inf, None
        for u in grid:
            vs = grid[u + grid <= scenario.cache_budget]
            if vs.size == 0:
                continue
            points = np.column_stack([np.full(vs.size, u), vs])
            vals = [
                surrogate(p, anchor, config.prox_weight, scenario, model)
                for p in points
            ]
            j = int(np.argmin(vals))
            if vals[j] < best_val:
                best_val, best_point = vals[j], points[j]
        assert sub.x == pytest.approx(best_point, abs=1.5e-3)

    def test_kkt_residuals_on_random_anchors(self):
        scenario = make_scenario(
            num_bs=4,
            num_files=5,
            segments_per_file=4,
            cache_capacity=2,
            backhaul_delay=1.5,
            zipf_gamma=0.6,
        )
        model = DelayModel.for_scenario(scenario)
        config = SolverConfig()
        rng = np.random.default_rng(21)
        for _ in range(50):
            anchor = rng.uniform(
                model.domain_floor, scenario.num_bs, scenario.num_segments
            )
            sub = solve_subproblem(anchor, config, scenario, model)
            assert sub.stationarity_residual < 1e-6
            assert sub.x.sum() <= scenario.cache_budget + 1e-12
            assert sub.multiplier * sub.budget_slack < 1e-6
            assert np.all(sub.x >= model.domain_floor - 1e-12)
            assert np.all(sub.x <= scenario.num_bs + 1e-12)


class TestRounding:
    def test_integral_input_unchanged(self, small_scenario):
        model = DelayModel.for_scenario(small_scenario)
        x = np.array([4.0, 4.0, 0, 0, 0, 0, 0, 0, 0])
        assert round_solution(x, small_scenario, model).tolist() == x.tolist()

    def test_tiny_instance_high_delta(self, tiny_scenario):
        model = DelayModel.for_scenario(tiny_scenario)
        rounded = round_solution(np.array([1.4, 0.6]), tiny_scenario, model)
        assert rounded.tolist() == [1, 1]
        assert exact_objective(rounded, tiny_scenario, model) == pytest.approx(
            3.186211538374310, abs=1e-4
        )

    def test_tiny_instance_zero_delta(self):
        scenario = make_scenario(
            num_bs=2,
            num_files=1,
            segments_per_file=2,
            cache_capacity=1,
            backhaul_delay=0.0,
            popularity=[1.0],
        )
        model = DelayModel.for_scenario(scenario)
        rounded = round_solution(np.array([1.4, 0.6]), scenario, model)
        assert exact_objective(rounded, scenario, model) == pytest.approx(
            2.321811908196835, abs=1e-4
        )

    def test_never_worse_than_floor_and_always_feasible(self):
        rng = np.random.default_rng(22)
        for _ in range(200):
            scenario = random_scenario(rng)
            model = DelayModel.for_scenario(scenario)
            budget = scenario.cache_budget
            x = rng.uniform(0, scenario.num_bs, scenario.num_segments)
            if x.sum() > budget:
                x *= budget / x.sum() if x.sum() > 0 else 1.0
            rounded = round_solution(x, scenario, model)
            floored = np.floor(x + 1e-12).astype(int)
            assert rounded.sum() <= budget
            assert rounded.min() >= 0 and rounded.max() <= scenario.num_bs
            assert exact_objective(rounded, scenario, model) <= exact_objective(
                floored, scenario, model
            ) + 1e-12


class TestScaSolve:
    def test_monotone_descent_at_unit_step(self):
        rng = np.random.default_rng(23)
        count = 0
        while count < 20:
            scenario = random_scenario(rng)
            if scenario.cache_budget == 0:
                continue
            report = sca_solve(scenario, SolverConfig(step_size=1.0))
            values = [f for f, _ in report.trace]
            assert all(a >= b - 1e-9 for a, b in zip(values, values[1:]))
            count += 1

    def test_iterates_feasible(self, small_scenario):
        report = sca_solve(small_scenario)
        model = DelayModel.for_scenario(small_scenario)
        assert report.relaxed.sum() <= small_scenario.cache_budget + 1e-9
        assert np.all(report.relaxed >= model.domain_floor - 1e-12)
        assert np.all(report.relaxed <= small_scenario.num_bs + 1e-12)
        assert report.rounded.sum() <= small_scenario.cache_budget

    def test_deterministic(self, small_scenario):
        a = sca_solve(small_scenario)
        b = sca_solve(small_scenario)
        assert np.array_equal(a.rounded, b.rounded)
        assert a.objective_slots == b.objective_slots
        np.testing.assert_array_equal(np.array(a.trace), np.array(b.trace))

    def test_zero_delta_reaches_full_diversity_delay(self, small_scenario):
        scenario = make_scenario(backhaul_delay=0.0)
        model = DelayModel.for_scenario(scenario)
        report = sca_solve(scenario)
        expected = 3.0 / (1.0 - model.beta**4)  # L * D(K)
        assert report.objective_slots == pytest.approx(expected, abs=1e-6)

    def test_unconstrained_full_replication(self):
        scenario = make_scenario(
            num_bs=3,
            num_files=2,
            segments_per_file=2,
            cache_capacity=4,
            backhaul_delay=50.0,
            popularity=[0.7, 0.3],
        )
        report = sca_solve(scenario)
        assert report.rounded.tolist() == [3, 3, 3, 3]

    def test_zero_capacity_shortcut(self):
        scenario = make_scenario(cache_capacity=0)
        model = DelayModel.for_scenario(scenario)
        report = sca_solve(scenario)
        assert report.rounded.tolist() == [0] * 9
        assert report.objective_slots == pytest.approx(
            exact_objective(np.zeros(9, int), scenario, model)
        )

    def test_diminishing_steps_supported(self, small_scenario):
        report = sca_solve(
            small_scenario, SolverConfig(diminishing_steps=True, max_iters=100)
        )
        assert report.rounded.sum() <= small_scenario.cache_budget

    def test_smooth_value_close_to_exact_on_rounded(self, small_scenario):
        report = sca_solve(small_scenario)
        model = DelayModel.for_scenario(small_scenario)
        assert report.objective_slots == pytest.approx(
            exact_objective(report.rounded, small_scenario, model)
        )


class TestSolverConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"step_size": 0.0},
            {"step_size": 1.5},
            {"tol": 0.0},
            {"prox_weight": 0.0},
            {"init": "bogus"},
            {"max_iters": 0},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            SolverConfig(**kwargs)

    @pytest.mark.parametrize("init", ["uniform", "popularity", "mpc", "lcd"])
    def test_all_initializations_run(self, init, small_scenario):
        report = sca_solve(small_scenario, SolverConfig(init=init, max_iters=60))
        assert report.rounded.sum() <= small_scenario.cache_budget
