import time

import pytest
from fastapi.testclient import TestClient

from riskcontext import pipeline
from riskcontext.service.app import create_app
from riskcontext.service.jobs import JobQueue, JobRecord
from riskcontext.service.storage import Workspace

from conftest import small_app_config


def wait_for(client, job_id, timeout=60.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        record = client.get(f"/v1/jobs/{job_id}").json()
        if record["state"] in ("done", "failed"):
            return record
        time.sleep(0.02)
    raise TimeoutError(job_id)


def submit_and_wait(client, path, body=None):
    response = client.post(path, json=body if body is not None else {})
    assert response.status_code == 202, response.text
    record = response.json()
    assert record["state"] in ("queued", "running", "done")
    return wait_for(client, record["job_id"])


@pytest.fixture(scope="module")
def service(tmp_path_factory):
    data_dir = str(tmp_path_factory.mktemp("svc"))
    config = small_app_config(data_dir)
    pipeline.step_generate(Workspace(data_dir), config)
    app = create_app(config)
    with TestClient(app) as client:
        for path, body in [
            ("/v1/cohort/build", {}),
            ("/v1/models/train", {"kind": "MLP"}),
            ("/v1/prototypes/build", {}),
            ("/v1/explanations/build", {}),
            ("/v1/guidelines/ingest", {}),
        ]:
            record = submit_and_wait(client, path, body)
            assert record["state"] == "done", record
        yield client


class TestJobQueue:
    def test_lifecycle(self):
        queue = JobQueue(lambda kind, params: {"ok": kind})
        record = queue.submit("train")
        assert queue.join(5)
        assert queue.get(record.job_id).state == "done"
        assert queue.get(record.job_id).result == {"ok": "train"}

    def test_failure_captured(self):
        def boom(kind, params):
            raise RuntimeError("nope")

        queue = JobQueue(boom)
        record = queue.submit("train")
        assert queue.join(5)
        assert queue.get(record.job_id).state == "failed"
        assert "nope" in queue.get(record.job_id).error

    def test_illegal_transition(self):
        record = JobRecord(job_id="j", kind="train")
        record.transition("running")
        record.transition("done")
        with pytest.raises(ValueError):
            record.transition("running")

    def test_unknown_kind(self):
        queue = JobQueue(lambda kind, params: {})
        with pytest.raises(ValueError):
            queue.submit("frobnicate")


class TestEndpoints:
    def test_unknown_job_404(self, service):
        assert service.get("/v1/jobs/unknown").status_code == 404

    def test_unknown_model_kind_400_names_field(self, service):
        response = service.post("/v1/models/train", json={"kind": "SVM"})
        assert response.status_code == 400
        body = response.json()
        assert body["code"] == "validation_error"
        assert "kind" in body["path"]

    def test_metrics_available_after_train(self, service):
        response = service.get("/v1/models/MLP/metrics")
        assert response.status_code == 200
        body = response.json()
        assert set(body) >= {"precision", "recall", "auc_roc", "auc_prc", "brier"}

    def test_prototypes_length_capped_by_k(self, service):
        full = service.get("/v1/prototypes?k=20").json()
        assert len(full["prototypes"]) == min(20, full["pool_size"])
        two = service.get("/v1/prototypes?k=2").json()
        assert len(two["prototypes"]) == 2

    def test_prototype_summary_matches_artifact(self, service):
        summary = service.get("/v1/prototypes/summary")
        assert summary.status_code == 200
        assert summary.json()["n"] >= 1

    def test_patient_risk_and_explanation(self, service):
        pid = service.get("/v1/prototypes?k=1").json()["prototypes"][0]["patient_id"]
        risk = service.get(f"/v1/patients/{pid}/risk").json()
        assert risk["risk_display"] == f"{risk['risk']:.2f}"
        explanation = service.get(f"/v1/patients/{pid}/explanation")
        assert explanation.status_code == 200
        assert len(explanation.json()["phi"]) > 0

    def test_unknown_patient_404(self, service):
        assert service.get("/v1/patients/NOPE/risk").status_code == 404
        assert service.get("/v1/patients/NOPE/explanation").status_code == 404

    def test_aggregate_top(self, service):
        body = service.get("/v1/explanations/aggregate?top=5").json()
        assert len(body["importances"]) == 5

    def test_qa_ask(self, service):
        response = service.post(
            "/v1/qa/ask",
            json={"question": "What should be done if A1C levels are greater than 10?"},
        )
        top = response.json()["answers"][0]
        assert "early introduction of insulin" in top["answer_text"]
        assert top["numeric_bonus"] > 0
        assert top["total"] == top["lexical_score"] + top["numeric_bonus"]

    def test_qa_empty_question_400(self, service):
        assert service.post("/v1/qa/ask", json={"question": "  "}).status_code == 400

    def test_context_q4_renders_risk(self, service):
        pid = service.get("/v1/prototypes?k=1").json()["prototypes"][0]["patient_id"]
        risk_display = service.get(f"/v1/patients/{pid}/risk").json()["risk_display"]
        response = service.post(
            "/v1/context/answer", json={"kind": "Q4", "patient_id": pid}
        )
        assert response.status_code == 200
        assert f"risk is found to be {risk_display}" in response.json()["rendered_text"]

    def test_context_unknown_kind_400(self, service):
        response = service.post("/v1/context/answer", json={"kind": "Q9"})
        assert response.status_code == 400

    def test_openapi_served(self, service):
        spec = service.get("/v1/spec")
        assert spec.status_code == 200
        assert "/v1/qa/ask" in spec.json()["paths"]

    def test_get_purity(self, service):
        a = service.get("/v1/prototypes/summary").content
        b = service.get("/v1/prototypes/summary").content
        assert a == b
        c = service.get("/v1/explanations/aggregate").content
        d = service.get("/v1/explanations/aggregate").content
        assert c == d

    def test_responses_never_embed_visit_streams(self, service):
        pid = service.get("/v1/prototypes?k=1").json()["prototypes"][0]["patient_id"]
        for path in (
            "/v1/prototypes?k=20",
            "/v1/prototypes/summary",
            f"/v1/patients/{pid}/risk",
            f"/v1/patients/{pid}/explanation",
            "/v1/cohort/stats",
        ):
            body = service.get(path).text
            assert '"visits"' not in body and '"codes"' not in body, path


class TestBearerToken:
    def test_static_token_gate(self, tmp_path):
        import dataclasses

        config = small_app_config(str(tmp_path / "auth"))
        config = dataclasses.replace(
            config, service=dataclasses.replace(config.service, bearer_token="s3cret")
        )
        with TestClient(create_app(config)) as client:
            assert client.get("/v1/jobs/x").status_code == 401
            ok = client.get(
                "/v1/jobs/x", headers={"authorization": "Bearer s3cret"}
            )
            assert ok.status_code == 404  # authenticated, job just unknown


class TestColdStore:
    def test_explanation_before_training_409_names_model(self, tmp_path):
        config = small_app_config(str(tmp_path / "cold"))
        app = create_app(config)
        with TestClient(app) as client:
            response = client.get("/v1/patients/P000001/risk")
            assert response.status_code == 409
            assert "build" in response.json()["message"] or "snapshot" in response.json()["message"]

    def test_qa_before_ingest_409(self, tmp_path):
        data_dir = str(tmp_path / "cold2")
        config = small_app_config(data_dir)
        ws = Workspace(data_dir)
        pipeline.step_generate(ws, config)
        pipeline.step_build_cohort(ws, config)
        app = create_app(config)
        with TestClient(app) as client:
            response = client.post("/v1/qa/ask", json={"question": "anything at all"})
            assert response.status_code == 409
            assert "ingest" in response.json()["message"]

    def test_train_conflict_409(self, tmp_path):
        import threading

        data_dir = str(tmp_path / "conflict")
        config = small_app_config(data_dir)
        ws = Workspace(data_dir)
        pipeline.step_generate(ws, config)
        pipeline.step_build_cohort(ws, config)

        slow_started = threading.Event()
        release = threading.Event()

        def run_job(kind, params):
            slow_started.set()
            release.wait(10)
            return {}

        app = create_app(config)
        app.state.jobs._runner = run_job  # stall the worker on the first job
        with TestClient(app) as client:
            first = client.post("/v1/models/train", json={"kind": "LR"})
            assert first.status_code == 202
            slow_started.wait(10)
            second = client.post("/v1/models/train", json={"kind": "LR"})
            release.set()
            assert second.status_code == 409
            assert second.json()["code"] == "conflict"
