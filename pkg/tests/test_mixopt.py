"""Objective composition, the bounded simplex, and allocation reporting."""

import numpy as np
import pytest
from scipy.optimize import linprog

from mediamix import (
    InfeasibleBounds,
    LinearConstraint,
    LPProblem,
    ObjectiveSpec,
    allocation_report,
    compose_objective,
    example_metadata,
    solve_lp,
)


def box(coefs, lower, upper, constraints=(), intercept=0.0):
    names = tuple(f"v{i}" for i in range(len(coefs)))
    obj = ObjectiveSpec(names, np.asarray(coefs, float), intercept)
    n = len(coefs)
    lo = np.full(n, lower, float) if np.isscalar(lower) else np.asarray(lower, float)
    up = np.full(n, upper, float) if np.isscalar(upper) else np.asarray(upper, float)
    return LPProblem(obj, lo, up, tuple(constraints))


class TestCompose:
    def test_identity_weights_pass_betas_through(self):
        spec = compose_objective(
            np.array([2.0, 3.0]), np.eye(2), 10.0, ("a", "b")
        )
        assert np.allclose(spec.coefficients, [2.0, 3.0])
        assert spec.intercept == 10.0

    def test_single_factor_scales_weights(self):
        w = np.array([[0.5], [0.25], [-0.1]])
        spec = compose_objective(np.array([100.0]), w, 0.0, ("a", "b", "c"))
        assert np.allclose(spec.coefficients, [50.0, 25.0, -10.0])

    def test_matches_matrix_product(self):
        rng = np.random.default_rng(40)
        w = rng.standard_normal((11, 2))
        betas = rng.standard_normal(2)
        spec = compose_objective(betas, w, 5.0, tuple(f"x{i}" for i in range(11)))
        assert np.abs(spec.coefficients - w @ betas).max() <= 1e-14

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            compose_objective(np.array([1.0]), np.eye(2), 0.0, ("a", "b"))


class TestSolveLp:
    def test_single_variable_constraint_binds_before_bound(self):
        prob = box([1.0], 0.0, 5.0, [LinearConstraint(np.array([1.0]), 3.0)])
        sol = solve_lp(prob)
        assert sol.status == "optimal"
        assert sol.z_star[0] == pytest.approx(3.0, abs=1e-9)
        assert sol.objective_value == pytest.approx(3.0, abs=1e-9)

    def test_all_negative_coefficients_sit_at_lower_bounds(self):
        prob = box([-1.0, -2.0, -0.5], -2.0, 4.0)
        sol = solve_lp(prob)
        assert np.allclose(sol.z_star, [-2.0, -2.0, -2.0])

    def test_all_positive_unconstrained_hits_upper_bounds(self):
        prob = box([3.0, 1.0], -2.0, 4.0)
        sol = solve_lp(prob)
        assert np.allclose(sol.z_star, [4.0, 4.0])
        assert sol.objective_value == pytest.approx(16.0)

    def test_budget_goes_to_best_rate(self):
        # one unit of budget, v1 pays double: all of it goes to v1
        prob = box(
            [1.0, 2.0],
            0.0,
            4.0,
            [LinearConstraint(np.array([1.0, 1.0]), 1.0, "<=", "budget")],
        )
        sol = solve_lp(prob)
        assert np.allclose(sol.z_star, [0.0, 1.0])
        assert "budget" in sol.binding["constraints"]

    def test_equality_constraint_is_respected(self):
        prob = box(
            [5.0, 1.0],
            0.0,
            10.0,
            [LinearConstraint(np.array([1.0, 1.0]), 4.0, "=")],
        )
        sol = solve_lp(prob)
        assert sol.z_star.sum() == pytest.approx(4.0, abs=1e-9)
        assert np.allclose(sol.z_star, [4.0, 0.0])

    def test_geq_constraint_forces_spend(self):
        prob = box(
            [-1.0, -3.0],
            0.0,
            10.0,
            [LinearConstraint(np.array([1.0, 1.0]), 2.0, ">=")],
        )
        sol = solve_lp(prob)
        # cheapest way to satisfy the floor
        assert np.allclose(sol.z_star, [2.0, 0.0])
        assert sol.objective_value == pytest.approx(-2.0, abs=1e-9)

    def test_infeasible_constraint_detected(self):
        prob = box(
            [1.0, 1.0],
            0.0,
            1.0,
            [LinearConstraint(np.array([1.0, 1.0]), 5.0, ">=")],
        )
        sol = solve_lp(prob)
        assert sol.status == "infeasible"
        assert sol.z_star is None

    def test_unbounded_detected(self):
        prob = box([1.0], 0.0, np.inf)
        sol = solve_lp(prob)
        assert sol.status == "unbounded"

    def test_crossed_bounds_raise_with_variable(self):
        obj = ObjectiveSpec(("a", "b"), np.array([1.0, 1.0]), 0.0)
        prob = LPProblem(obj, np.array([0.0, 2.0]), np.array([5.0, 1.0]))
        with pytest.raises(InfeasibleBounds) as err:
            solve_lp(prob)
        assert err.value.variable == "b"

    def test_fixed_variables_pass_through(self):
        obj = ObjectiveSpec(("a", "b"), np.array([1.0, 1.0]), 0.0)
        prob = LPProblem(
            obj,
            np.array([0.0, 0.0]),
            np.array([0.0, 0.0]),
            (LinearConstraint(np.array([1.0, 1.0]), 30.0, "<="),),
        )
        sol = solve_lp(prob)
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(0.0)

    def test_contributions_sum_to_objective(self):
        rng = np.random.default_rng(50)
        c = rng.standard_normal(6)
        prob = box(c, -2.0, 4.0, [LinearConstraint(np.ones(6), 3.0)])
        sol = solve_lp(prob)
        assert sol.contributions.sum() == pytest.approx(sol.objective_value, abs=1e-9)
        assert np.allclose(sol.contributions, c * sol.z_star)

    def test_greedy_knapsack_oracle(self):
        # budget problems with one total-spend cap have a closed-form greedy
        # answer: fill variables by descending rate
        rng = np.random.default_rng(60)
        for _ in range(200):
            n = int(rng.integers(2, 9))
            c = rng.uniform(0.1, 5.0, n)
            upper = rng.uniform(0.5, 4.0, n)
            budget = float(rng.uniform(0.2, 0.9) * upper.sum())
            prob = box(c, 0.0, upper, [LinearConstraint(np.ones(n), budget)])
            sol = solve_lp(prob)
            assert sol.status == "optimal"
            remaining = budget
            ref = np.zeros(n)
            for j in np.argsort(-c):
                take = min(upper[j], remaining)
                ref[j] = take
                remaining -= take
                if remaining <= 0:
                    break
            assert sol.objective_value == pytest.approx(float(c @ ref), abs=1e-7)

    def test_matches_reference_solver_on_random_instances(self):
        rng = np.random.default_rng(70)
        agree = infeasible = 0
        for _ in range(150):
            n = int(rng.integers(2, 8))
            m = int(rng.integers(1, 4))
            c = rng.standard_normal(n) * rng.uniform(0.5, 10)
            lo = rng.uniform(-3, 0, n)
            up = lo + rng.uniform(0.5, 5, n)
            cons = []
            a_rows = []
            b_vals = []
            senses = []
            for _ in range(m):
                w = rng.standard_normal(n)
                sense = ("<=", ">=", "=")[int(rng.integers(0, 3))]
                bound = float(rng.uniform(-4, 4))
                cons.append(LinearConstraint(w, bound, sense))
                a_rows.append(w)
                b_vals.append(bound)
                senses.append(sense)
            prob = box(c, lo, up, cons)
            sol = solve_lp(prob)

            a_ub, b_ub, a_eq, b_eq = [], [], [], []
            for w, b, s in zip(a_rows, b_vals, senses):
                if s == "<=":
                    a_ub.append(w)
                    b_ub.append(b)
                elif s == ">=":
                    a_ub.append(-w)
                    b_ub.append(-b)
                else:
                    a_eq.append(w)
                    b_eq.append(b)
            ref = linprog(
                -c,
                A_ub=np.array(a_ub) if a_ub else None,
                b_ub=np.array(b_ub) if b_ub else None,
                A_eq=np.array(a_eq) if a_eq else None,
                b_eq=np.array(b_eq) if b_eq else None,
                bounds=list(zip(lo, up)),
                method="highs",
            )
            if ref.status == 2:
                assert sol.status == "infeasible"
                infeasible += 1
            else:
                assert ref.status == 0
                assert sol.status == "optimal"
                assert sol.objective_value == pytest.approx(-ref.fun, abs=1e-6)
                agree += 1
        assert agree >= 90
        assert infeasible > 0

    def test_single_perturbation_optimality_certificate(self):
        # nudging any single coordinate of z* while staying feasible must not
        # improve the objective
        rng = np.random.default_rng(80)
        n = 5
        c = rng.standard_normal(n)
        w = np.abs(rng.standard_normal(n)) + 0.1
        prob = box(c, -2.0, 4.0, [LinearConstraint(w, 6.0)])
        sol = solve_lp(prob)
        z = sol.z_star
        for j in range(n):
            for delta in (0.01, -0.01):
                cand = z.copy()
                cand[j] += delta
                if cand[j] < -2.0 or cand[j] > 4.0:
                    continue
                if w @ cand > 6.0 + 1e-9:
                    continue
                assert c @ cand <= sol.objective_value + 1e-9


class TestAllocation:
    def _example_problem(self):
        meta = tuple(m for m in example_metadata() if m.name != "nrx")
        names = tuple(m.name for m in meta)
        rng = np.random.default_rng(90)
        coefs = rng.uniform(-50000, 90000, len(names))
        obj = ObjectiveSpec(names, coefs, 1_080_544.09)
        prob = LPProblem(
            obj,
            np.full(len(names), -2.0),
            np.full(len(names), 4.0),
            (LinearConstraint(np.ones(len(names)), 30.0, "<=", "total"),),
        )
        return meta, prob

    def test_levels_and_predicted_volume(self):
        meta, prob = self._example_problem()
        sol = solve_lp(prob)
        report = allocation_report(sol, prob.objective, meta, prob.lower, prob.upper)
        by_name = {m.name: m for m in meta}
        for row in report.rows:
            m = by_name[row.variable]
            assert row.level == pytest.approx(m.mean + row.z * m.sd, abs=1e-9)
        assert report.predicted_volume == pytest.approx(
            report.intercept + report.objective_value, abs=1e-9
        )

    def test_z_four_level_for_first_channel(self):
        meta, prob = self._example_problem()
        sol = solve_lp(prob)
        report = allocation_report(sol, prob.objective, meta, prob.lower, prob.upper)
        row = next(r for r in report.rows if r.variable == "con")
        if row.z == pytest.approx(4.0):
            assert row.level == pytest.approx(54113.88 + 4 * 21606.72, abs=1e-6)

    def test_rejects_non_optimal_solution(self):
        meta, prob = self._example_problem()
        from mediamix.mixopt import LPSolution

        bad = LPSolution("infeasible", None, None, None, None, "constraints")
        with pytest.raises(ValueError):
            allocation_report(bad, prob.objective, meta, prob.lower, prob.upper)
