"""HTTP API over the pipeline: mutations run as jobs, reads are pure over
the current snapshot, errors share one {code, message, path?} shape."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .. import pipeline
from ..config import AppConfig
from ..context.answers import answer as compose_answer, render
from ..context.routing import QUESTION_KINDS
from ..errors import (
    DependencyError,
    NotFoundError,
    QueryError,
    RiskContextError,
    StructureError,
    ValidationError,
)
from ..guidelines.parser import ParseConfig
from .jobs import JobQueue
from .storage import Workspace

API_PREFIX = "/v1"

# Job that builds each artifact, for 409 messages that name the fix.
_ARTIFACT_JOB = {
    "cohort": "build",
    "features": "build",
    "split": "train",
    "model": "train",
    "metrics": "train",
    "attributions": "explain",
    "aggregate": "explain",
    "prototypes": "prototypes",
    "prototype_summary": "prototypes",
    "guidelines": "ingest",
    "snapshot": "build",
    "answerer": "ingest",
    "claims": "build",
}


class TrainRequest(BaseModel):
    kind: str = Field(pattern="^(LR|MLP)$")


class IngestRequest(BaseModel):
    html: str | None = None
    parse_config: dict | None = None


class ExplainRequest(BaseModel):
    patient_ids: list[str] | None = None


class AskRequest(BaseModel):
    question: str
    k: int = 3
    patient_id: str | None = None


class ContextRequest(BaseModel):
    kind: str
    patient_id: str | None = None
    question: str | None = None


def _error(status: int, code: str, message: str, path: str | None = None) -> JSONResponse:
    body = {"code": code, "message": message}
    if path:
        body["path"] = path
    return JSONResponse(status_code=status, content=body)


def create_app(config: AppConfig | None = None) -> FastAPI:
    if config is None:
        from ..config import load_config

        config = load_config()  # honors RISKCONTEXT_PORT / RISKCONTEXT_DATA_DIR
    ws = Workspace(config.service.data_dir)

    def run_job(kind: str, params: dict) -> dict:
        if kind == "build":
            return pipeline.step_build_cohort(ws, config)
        if kind == "train":
            section = config.model
            if params.get("kind"):
                from dataclasses import replace

                section_config = replace(config, model=replace(section, kind=params["kind"]))
                return pipeline.step_train(ws, section_config)
            return pipeline.step_train(ws, config)
        if kind == "ingest":
            html = params.get("html")
            parse_config = None
            if params.get("parse_config"):
                parse_config = ParseConfig.from_dict(params["parse_config"])
            if html is None:
                html = pipeline.fixture_guideline_html().decode("utf-8")
                parse_config = parse_config or pipeline.fixture_parse_config()
            return pipeline.step_ingest_guidelines(ws, html.encode("utf-8"), parse_config)
        if kind == "prototypes":
            return pipeline.step_prototypes(ws, config)
        if kind == "explain":
            return pipeline.step_explain(ws, config, params.get("patient_ids"))
        if kind == "evaluate":
            return pipeline.step_evaluate(ws, config)
        raise ValueError(f"unknown job kind {kind!r}")

    jobs = JobQueue(run_job, workers=config.service.workers)

    app = FastAPI(
        title="riskcontext service",
        version="1.0",
        openapi_url=f"{API_PREFIX}/spec",
        docs_url=None,
        redoc_url=None,
    )
    app.state.workspace = ws
    app.state.jobs = jobs
    app.state.config = config

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        first = exc.errors()[0]
        path = ".".join(str(p) for p in first.get("loc", ()))
        return _error(400, "validation_error", first.get("msg", "invalid request"), path)

    @app.exception_handler(RiskContextError)
    async def _domain_handler(request: Request, exc: RiskContextError):
        if isinstance(exc, NotFoundError):
            return _error(404, "not_found", str(exc))
        if isinstance(exc, DependencyError):
            job = _ARTIFACT_JOB.get(exc.missing, exc.missing)
            return _error(409, "not_built", f"{exc} (run the {job!r} job)")
        if isinstance(exc, (QueryError, ValidationError, StructureError)):
            return _error(400, "bad_request", str(exc))
        return _error(400, "domain_error", str(exc))

    if config.service.bearer_token:
        @app.middleware("http")
        async def _auth(request: Request, call_next):
            expected = f"Bearer {config.service.bearer_token}"
            if request.headers.get("authorization") != expected:
                return _error(401, "unauthorized", "missing or invalid bearer token")
            return await call_next(request)

    def _stores():
        return pipeline.load_stores(ws, config)

    def _snapshot():
        return ws.require_snapshot()

    def _accepted(record) -> JSONResponse:
        return JSONResponse(status_code=202, content=record.to_dict())

    # --- mutations -----------------------------------------------------
    @app.post(f"{API_PREFIX}/cohort/build", status_code=202)
    def cohort_build():
        return _accepted(jobs.submit("build"))

    @app.post(f"{API_PREFIX}/models/train", status_code=202)
    def models_train(body: TrainRequest):
        if jobs.has_active("train"):
            return _error(409, "conflict", "a train job is already active for this dataset")
        return _accepted(jobs.submit("train", {"kind": body.kind}))

    @app.post(f"{API_PREFIX}/guidelines/ingest", status_code=202)
    def guidelines_ingest(body: IngestRequest):
        return _accepted(
            jobs.submit("ingest", {"html": body.html, "parse_config": body.parse_config})
        )

    @app.post(f"{API_PREFIX}/prototypes/build", status_code=202)
    def prototypes_build():
        return _accepted(jobs.submit("prototypes"))

    @app.post(f"{API_PREFIX}/explanations/build", status_code=202)
    def explanations_build(body: ExplainRequest | None = None):
        params = {"patient_ids": body.patient_ids if body else None}
        return _accepted(jobs.submit("explain", params))

    @app.get(API_PREFIX + "/jobs/{job_id}")
    def get_job(job_id: str):
        record = jobs.get(job_id)
        if record is None:
            raise NotFoundError(f"unknown job {job_id!r}")
        return record.to_dict()

    # --- reads ----------------------------------------------------------
    @app.get(f"{API_PREFIX}/prototypes")
    def get_prototypes(k: int = 20):
        snapshot = _snapshot()
        payload = json.loads(snapshot.read_bytes("prototypes"))
        stores = _stores()
        model = stores.require("model")
        matrix = stores.require("features")
        entries = []
        weights = payload["prototype_set"]["weights"]
        for patient_id, weight in zip(payload["patient_ids"], weights):
            risk = float(model.predict_proba(matrix.X[matrix.row_for(patient_id)]))
            entries.append(
                {
                    "patient_id": patient_id,
                    "weight": weight,
                    "risk": risk,
                    "risk_display": f"{risk:.2f}",
                }
            )
        return {"prototypes": entries[: max(0, k)], "pool_size": len(payload["pool_rows"])}

    @app.get(f"{API_PREFIX}/prototypes/summary")
    def get_prototype_summary():
        return _snapshot().read_json("prototype_summary")

    @app.get(API_PREFIX + "/patients/{patient_id}/risk")
    def get_risk(patient_id: str):
        stores = _stores()
        matrix = stores.require("features")
        model = stores.require("model")
        try:
            row = matrix.row_for(patient_id)
        except KeyError:
            raise NotFoundError(f"unknown patient {patient_id!r}") from None
        risk = float(model.predict_proba(matrix.X[row]))
        return {"patient_id": patient_id, "risk": risk, "risk_display": f"{risk:.2f}"}

    @app.get(API_PREFIX + "/patients/{patient_id}/explanation")
    def get_explanation(patient_id: str):
        stores = _stores()
        matrix = stores.require("features")
        try:
            matrix.row_for(patient_id)
        except KeyError:
            raise NotFoundError(f"unknown patient {patient_id!r}") from None
        attributions = stores.require("attributions")
        if patient_id not in attributions:
            raise DependencyError(
                f"no attribution stored for patient {patient_id!r}",
                missing="attributions",
            )
        return attributions[patient_id].to_dict()

    @app.get(f"{API_PREFIX}/explanations/aggregate")
    def get_aggregate(top: int = 20):
        ranked = _snapshot().read_json("aggregate")
        return {"importances": ranked[: max(0, top)]}

    @app.get(API_PREFIX + "/models/{kind}/metrics")
    def get_metrics(kind: str):
        metrics = _snapshot().read_json("metrics")
        if kind not in metrics:
            raise NotFoundError(f"no metrics recorded for model kind {kind!r}")
        return metrics[kind]

    @app.get(f"{API_PREFIX}/cohort/stats")
    def get_cohort_stats():
        snapshot = _snapshot()
        cohort = snapshot.read_json("cohort")
        from ..context.answers import condition_group_stats

        stores = _stores()
        matrix = stores.require("features")
        stats = [
            {k: s[k] for k in ("label", "count", "frequency")}
            for s in condition_group_stats(matrix)
        ]
        return {
            "cohort_size": len(cohort["members"]),
            "exclusions": cohort["exclusions"],
            "positive_rate": float(np.mean(matrix.y)) if matrix.n_rows else 0.0,
            "condition_groups": stats,
        }

    # --- QA and contextualization ---------------------------------------
    @app.post(f"{API_PREFIX}/qa/ask")
    def qa_ask(body: AskRequest):
        if not body.question.strip():
            raise QueryError("question is empty")
        stores = _stores()
        answerer = stores.require("answerer")
        ranked = answerer.ask(body.question, k=body.k)
        return {
            "question": body.question,
            "answers": [r.to_dict() for r in ranked],
        }

    @app.post(f"{API_PREFIX}/context/answer")
    def context_answer(body: ContextRequest):
        known = set(QUESTION_KINDS) | {"FreeText"}
        if body.kind not in known:
            return _error(
                400, "validation_error", f"unknown question kind {body.kind!r}", "body.kind"
            )
        stores = _stores()
        if body.kind == "FreeText":
            if not body.question or not body.question.strip():
                raise QueryError("FreeText questions need a non-empty question field")
            bundle = compose_answer(body.question, stores, body.patient_id)
        else:
            bundle = compose_answer(body.kind, stores, body.patient_id)
        payload = bundle.to_dict()
        payload["rendered_text"] = render(bundle, "text").decode("utf-8")
        return payload

    ui_dir = Path(__file__).resolve().parents[3] / "frontend" / "dist"
    if ui_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def main() -> None:  # pragma: no cover - thin uvicorn launcher
    import uvicorn

    from ..config import load_config

    config = load_config()
    uvicorn.run(create_app(config), host="127.0.0.1", port=config.service.port)
