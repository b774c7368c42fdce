import pytest
from fastapi.testclient import TestClient

import stagecut.service as service_mod
from stagecut.analytics import generate_synthetic_project
from stagecut.optimizer import InfeasibleEditError
from stagecut.project import load_project, prepare_scene, write_project
from stagecut.service import create_app


@pytest.fixture(scope="module")
def project_bits(tmp_path_factory):
    out = tmp_path_factory.mktemp("svc_demo")
    write_project(generate_synthetic_project(1, 3, 60.0), out)
    project = load_project(out / "manifest.json")
    rushes, table = prepare_scene(project)
    return project, rushes, table


@pytest.fixture(scope="module")
def client(project_bits):
    project, rushes, table = project_bits
    app = create_app(project, rushes, table)
    return TestClient(app)


class TestProjectEndpoint:
    def test_reports_scene_and_rushes(self, client):
        doc = client.get("/api/project").json()
        assert doc["frames"] == 1440
        assert doc["fps"] == 24.0
        assert doc["duration_secs"] == pytest.approx(60.0)
        assert doc["establish_frames"] == 96
        assert len(doc["actors"]) == 3
        assert len(doc["rushes"]) == 8
        assert doc["rushes"][-1]["scale"] == "MASTER"


class TestPotentialsEndpoint:
    def test_stride_downsamples(self, client):
        doc = client.get("/api/potentials", params={"stride": 24}).json()
        assert len(doc["frames"]) == 60
        assert all(len(r["values"]) == 60 for r in doc["rushes"])

    def test_bad_stride_is_400(self, client):
        assert client.get("/api/potentials", params={"stride": "x"}).status_code == 400
        assert client.get("/api/potentials", params={"stride": 0}).status_code == 400


class TestWindowsEndpoint:
    def test_all_rushes(self, client):
        doc = client.get("/api/windows", params={"stride": 48}).json()
        assert len(doc["rushes"]) == 8
        assert all(len(r["windows"]) == 30 for r in doc["rushes"])

    def test_single_rush(self, client):
        doc = client.get("/api/windows", params={"rush": 0, "stride": 24}).json()
        assert len(doc["rushes"]) == 1
        first = doc["rushes"][0]["windows"][0]
        assert first is None or len(first) == 4

    def test_unknown_rush_is_400(self, client):
        assert client.get("/api/windows", params={"rush": 99}).status_code == 400


class TestEditEndpoint:
    def test_wide_has_zero_cuts(self, client):
        resp = client.post("/api/edit", json={"strategy": "wide"})
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["stats"]["cut_count"] == 0
        assert len(doc["edl"]["segments"]) == 1

    def test_identical_requests_identical_bytes(self, client):
        a = client.post("/api/edit", json={"strategy": "gazed", "m": 14})
        b = client.post("/api/edit", json={"strategy": "gazed", "m": 14})
        assert a.status_code == 200
        assert a.content == b.content

    def test_override_reaches_config_echo(self, client):
        doc = client.post("/api/edit", json={"strategy": "gazed", "m": 14}).json()
        assert doc["config"]["m"] == 14.0
        assert doc["config"]["age_cap_secs"] == 28.0

    def test_speaker_strategy_served(self, client):
        resp = client.post("/api/edit", json={"strategy": "speaker"})
        assert resp.status_code == 200
        assert resp.json()["stats"]["cut_count"] >= 1

    def test_unknown_strategy_is_field_level_400(self, client):
        resp = client.post("/api/edit", json={"strategy": "dissolve"})
        assert resp.status_code == 400
        assert "strategy" in resp.json()["errors"]

    def test_invalid_parameter_combination_is_400(self, client):
        resp = client.post("/api/edit", json={"strategy": "gazed",
                                              "alpha": 0.9, "beta": 0.4})
        assert resp.status_code == 400
        assert "params" in resp.json()["errors"]

    def test_unknown_override_key_is_400(self, client):
        resp = client.post("/api/edit", json={"strategy": "gazed", "zoom": 3})
        assert resp.status_code == 400
        assert "zoom" in resp.json()["errors"]

    def test_non_numeric_override_is_400(self, client):
        resp = client.post("/api/edit", json={"strategy": "gazed", "m": "fast"})
        assert resp.status_code == 400

    def test_infeasible_scene_maps_to_422_with_frame(self, project_bits, monkeypatch):
        project, rushes, table = project_bits

        def boom(*args, **kwargs):
            raise InfeasibleEditError(7)

        monkeypatch.setattr(service_mod, "run_strategy", boom)
        client = TestClient(create_app(project, rushes, table))
        resp = client.post("/api/edit", json={"strategy": "gazed"})
        assert resp.status_code == 422
        assert resp.json()["frame"] == 7

    def test_matches_cli_equivalent_stats(self, project_bits, tmp_path):
        from stagecut.analytics import cut_stats
        from stagecut.baselines import run_strategy
        from stagecut.project import cost_params_from_config

        project, rushes, table = project_bits
        client = TestClient(create_app(project, rushes, table))
        doc = client.post("/api/edit", json={"strategy": "greedy"}).json()
        params = cost_params_from_config(project.config, project.dims.fps)
        edl = run_strategy("greedy", table, rushes, params, speakers=project.speakers)
        stats = cut_stats(edl, project.dims.fps, params, rushes, table)
        assert doc["stats"]["cut_count"] == stats.cut_count
        assert doc["stats"]["cost"]["total"] == pytest.approx(stats.cost["total"])


class TestStaticServing:
    def test_placeholder_without_assets(self, client):
        resp = client.get("/")
        assert resp.status_code == 200
        assert "no UI bundle" in resp.text

    def test_serves_bundle_when_present(self, project_bits, tmp_path):
        project, rushes, table = project_bits
        (tmp_path / "index.html").write_text("<html><body>studio</body></html>")
        client = TestClient(create_app(project, rushes, table, assets_dir=tmp_path))
        resp = client.get("/")
        assert resp.status_code == 200
        assert "studio" in resp.text

    def test_frame_endpoint_404_when_missing(self, project_bits, tmp_path):
        project, rushes, table = project_bits
        client = TestClient(create_app(project, rushes, table, frames_dir=tmp_path))
        assert client.get("/api/frame/3").status_code == 404
