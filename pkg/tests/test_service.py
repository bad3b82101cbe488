import numpy as np
import pytest
from fastapi.testclient import TestClient

from trms_ftc.service.app import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


SHORT_SCENARIO = {
    "fault": {"kind": "step", "channels": [1], "amplitude": 0.3,
              "t_start": 0.5, "t_stop": 1.5},
    "sim": {"t_end": 2.0,
            "references": {"alpha_v": [[0.0, 0.0]], "alpha_h": [[0.0, 0.0]]},
            "initial_state": {"trim": [0.0, 0.0]}},
}


class TestHealth:
    def test_health(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "ok"
        assert body["version"]


class TestLinearize:
    def test_default_bank_document(self, client):
        resp = client.post("/linearize", json={"fault": {"kind": "none"}})
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["schema"] == "trms-ftc/bank-v1"
        assert doc["nodes"] == [-0.4, 0.0, 0.4]
        assert len(doc["models"]) == 3
        a = np.array(doc["models"][1]["a"])
        assert a.shape == (6, 6)
        assert a[2, 2] == pytest.approx(-0.6983, abs=1e-4)

    def test_rank_violation_maps_to_400(self, client):
        cfg = {"fault": {"kind": "none"}, "bank": {"measured_states": [1, 4]}}
        resp = client.post("/linearize", json=cfg)
        assert resp.status_code == 400
        assert "full column rank" in resp.json()["detail"]


class TestDesign:
    def test_design_document_shapes(self, client):
        resp = client.post("/design", json={"fault": {"kind": "none"}})
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["schema"] == "trms-ftc/design-v1"
        assert doc["controller"]["zeta"] == 2.0
        assert doc["controller"]["rho"] == 700.0
        assert len(doc["gains"]["k1"]) == 3
        assert np.array(doc["gains"]["k1"][0]).shape == (2, 6)
        assert np.array(doc["uio"]["k2"][0]).shape == (6, 4)
        assert np.array(doc["uio"]["h_proj"][0]).shape == (2, 4)

    def test_infeasible_trim_maps_to_400(self, client):
        cfg = {"fault": {"kind": "none"}, "params": {"u_sat": 0.05}}
        resp = client.post("/design", json=cfg)
        assert resp.status_code == 400
        assert "gravity torque" in resp.json()["detail"]


class TestSim:
    def test_returns_csv_and_is_deterministic(self, client):
        first = client.post("/sim", json=SHORT_SCENARIO)
        second = client.post("/sim", json=SHORT_SCENARIO)
        assert first.status_code == 200
        assert first.headers["content-type"].startswith("text/csv")
        assert first.content == second.content
        header = first.text.splitlines()[0]
        assert header.startswith("t,x1,x2,x3,x4,x5,x6,xh1")
        assert len(first.text.splitlines()) == 2002

    def test_malformed_config_maps_to_422(self, client):
        resp = client.post("/sim", json={"sim": {"dt": -1.0}})
        assert resp.status_code == 422

    def test_unknown_param_key_maps_to_400(self, client):
        cfg = dict(SHORT_SCENARIO)
        cfg["params"] = {"not_a_param": 1.0}
        resp = client.post("/sim", json=cfg)
        assert resp.status_code == 400
        assert "unknown parameter" in resp.json()["detail"]


class TestMetricsEndpoint:
    def test_round_trip_with_sim(self, client):
        csv_text = client.post("/sim", json=SHORT_SCENARIO).text
        resp = client.post("/metrics", json={"csv": csv_text})
        assert resp.status_code == 200
        body = resp.json()
        assert body["rms_pitch_pre"] is not None
        assert body["rms_pitch_post"] is not None
        assert body["fault_rms"] >= 0.0
        assert 0.0 <= body["sat_duty_main"] <= 1.0

    def test_fault_start_override(self, client):
        csv_text = client.post("/sim", json=SHORT_SCENARIO).text
        resp = client.post("/metrics", json={"csv": csv_text, "fault_start": 1.0})
        assert resp.status_code == 200

    def test_bad_csv_maps_to_400(self, client):
        resp = client.post("/metrics", json={"csv": "t,x1\n0,0\n"})
        assert resp.status_code == 400
