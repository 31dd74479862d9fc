"""HTTP contract for the scenario service."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from mediamix import create_app, example_config, run_pipeline, solve_lp
from mediamix.mixopt import LinearConstraint, LPProblem


@pytest.fixture(scope="module")
def bundle(tmp_path_factory):
    out = tmp_path_factory.mktemp("svc")
    b, _ = run_pipeline(example_config(output_dir=str(out)))
    return b


@pytest.fixture(scope="module")
def client(bundle):
    return TestClient(create_app(bundle))


class TestModelEndpoint:
    def test_lists_every_promotional_variable(self, client):
        body = client.get("/api/v1/model").json()
        names = [v["name"] for v in body["variables"]]
        assert len(names) == 11
        assert "nrx" not in names
        assert names[0] == "con"

    def test_carries_metadata_and_coefficients(self, client, bundle):
        body = client.get("/api/v1/model").json()
        first = body["variables"][0]
        assert first["mean"] == pytest.approx(54113.88)
        assert first["sd"] == pytest.approx(21606.72)
        assert first["coefficient"] == pytest.approx(
            float(bundle.objective.coefficients[0])
        )
        assert body["intercept"] == pytest.approx(bundle.objective.intercept)

    def test_default_bounds_and_constraints(self, client):
        body = client.get("/api/v1/model").json()
        assert body["default_bounds"]["lower"]["con"] == -2.0
        assert body["default_bounds"]["upper"]["con"] == 4.0
        cons = body["default_constraints"]
        assert len(cons) == 1
        assert cons[0]["sense"] == "<="
        assert cons[0]["bound"] == 30.0

    def test_provenance_identifies_the_run(self, client, bundle):
        body = client.get("/api/v1/model").json()
        assert body["provenance"]["config_hash"] == bundle.config_hash
        assert body["provenance"]["seed"] == bundle.seed


class TestOptimizeEndpoint:
    def test_default_request_reproduces_in_process_solution(self, client, bundle):
        resp = client.post("/api/v1/optimize", json={})
        assert resp.status_code == 200
        body = resp.json()
        prob = LPProblem(
            bundle.objective, bundle.lp_lower, bundle.lp_upper, bundle.lp_constraints
        )
        ref = solve_lp(prob)
        assert body["z_star"] == ref.z_star.tolist()
        assert body["objective_value"] == ref.objective_value
        assert body["contributions"] == ref.contributions.tolist()

    def test_allocation_levels_follow_metadata(self, client, bundle):
        body = client.post("/api/v1/optimize", json={}).json()
        meta = {m.name: m for m in bundle.meta}
        for row in body["allocation"]:
            m = meta[row["variable"]]
            assert row["level"] == pytest.approx(m.mean + row["z"] * m.sd)
        assert body["predicted_volume"] == pytest.approx(
            body["intercept"] + body["objective_value"]
        )

    def test_partial_bounds_merge_with_defaults(self, client):
        body = client.post(
            "/api/v1/optimize", json={"upper": {"con": 2.0}}
        ).json()
        z = dict(zip(body["names"], body["z_star"]))
        assert z["con"] <= 2.0 + 1e-9

    def test_zero_box_collapses_to_intercept(self, client):
        body = client.post(
            "/api/v1/optimize", json={"lower": 0.0, "upper": 0.0}
        ).json()
        assert body["objective_value"] == pytest.approx(0.0, abs=1e-12)
        assert body["predicted_volume"] == pytest.approx(body["intercept"])

    def test_crossed_bounds_are_a_422_with_the_variable(self, client):
        resp = client.post(
            "/api/v1/optimize",
            json={"lower": {"cal": 3.0}, "upper": {"cal": 1.0}},
        )
        assert resp.status_code == 422
        detail = resp.json()["detail"]
        assert detail["status"] == "infeasible"
        assert detail["reason"] == "bounds"
        assert detail["variable"] == "cal"

    def test_impossible_constraint_is_a_422(self, client):
        resp = client.post(
            "/api/v1/optimize",
            json={"constraints": [{"total": 100.0, "sense": ">="}]},
        )
        assert resp.status_code == 422
        assert resp.json()["detail"]["reason"] == "constraints"

    def test_malformed_body_is_a_400(self, client):
        resp = client.post("/api/v1/optimize", json={"lower": "huge"})
        assert resp.status_code == 400
        assert resp.json()["status"] == "invalid"

    def test_unknown_variable_is_a_400(self, client):
        resp = client.post("/api/v1/optimize", json={"upper": {"zzz": 1.0}})
        assert resp.status_code == 400

    def test_custom_constraint_binds(self, client, bundle):
        resp = client.post(
            "/api/v1/optimize",
            json={"constraints": [{"total": 10.0, "sense": "<="}]},
        )
        body = resp.json()
        assert sum(body["z_star"]) == pytest.approx(10.0, abs=1e-9)
        prob = LPProblem(
            bundle.objective,
            bundle.lp_lower,
            bundle.lp_upper,
            (LinearConstraint(np.ones(11), 10.0, "<=", "total"),),
        )
        ref = solve_lp(prob)
        assert body["objective_value"] == ref.objective_value
        assert body["z_star"] == ref.z_star.tolist()

    def test_weighted_constraint_round_trip(self, client):
        weights = {"con": 1.0, "cal": 2.0}
        resp = client.post(
            "/api/v1/optimize",
            json={"constraints": [{"weights": weights, "bound": 4.0, "sense": "<="}]},
        )
        assert resp.status_code == 200
        z = dict(zip(resp.json()["names"], resp.json()["z_star"]))
        assert z["con"] + 2 * z["cal"] <= 4.0 + 1e-9
