"""Pipeline steps shared by the CLI and the service job executor.

Every step reads from a Workspace, runs exactly one stage, and commits
the resulting JSON artifacts to a new snapshot, so batch and service
runs produce byte-identical files for identical inputs and seeds.
"""
from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .config import AppConfig
from .cohort.features import build_features
from .cohort.select import select_cohort
from .cohort.synth import (
    SynthConfig,
    default_planted_weights,
    generate_claims,
    synthetic_ccs_map,
)
from .cohort.types import CcsMap, FeatureMatrix, read_claims, write_claims
from .context.answers import ContextStores, load_default_templates
from .errors import DependencyError, NotFoundError
from .explain.aggregate import aggregate_importance
from .explain.protodash import protodash
from .explain.shapley import Attribution, shapley_exact, shapley_sampled
from .explain.summary import summarize_prototypes
from .guidelines.model import from_json as guideline_from_json, to_json as guideline_to_json
from .guidelines.parser import ParseConfig, parse_html_with_report
from .models.data import split_data
from .models.metrics import evaluate_scores
from .models.nets import RiskModel, train_selected
from .qa.retriever import Bm25Answerer, IndexedRecommendation
from .service.storage import Workspace, dump_json


def synth_config_from(config: AppConfig) -> SynthConfig:
    section = config.synth
    weights = section.planted_weights
    if weights is None:
        weights = default_planted_weights(section.n_ccs_features, section.seed)
    return SynthConfig(
        n_patients=section.n_patients,
        n_ccs_features=section.n_ccs_features,
        seed=section.seed,
        planted_weights=tuple(weights),
        base_rate=section.base_rate,
        violation_rate=section.violation_rate,
        xor_pairs=section.xor_pairs,
        horizon_days=config.cohort.horizon_days,
        pre_enrollment_days=config.cohort.pre_enrollment_days,
    )


def step_generate(ws: Workspace, config: AppConfig) -> dict:
    synth_config = synth_config_from(config)
    patients = generate_claims(synth_config)
    write_claims(patients, ws.claims_path)
    synthetic_ccs_map(synth_config.n_ccs_features).save(ws.ccs_map_path)
    return {"patients": len(patients), "claims_file": str(ws.claims_path)}


def step_build_cohort(ws: Workspace, config: AppConfig) -> dict:
    if not ws.claims_path.exists():
        raise DependencyError("no claims file; run generate-data first", missing="claims")
    patients = read_claims(ws.claims_path)
    ccs_map = CcsMap.load(ws.ccs_map_path)
    cohort = select_cohort(patients, config.cohort)
    matrix = build_features(cohort, ccs_map, config.cohort)

    cohort_payload = {
        "members": [
            {"patient_id": p.patient_id, "index_date": int(index_date)}
            for p, index_date in cohort.members
        ],
        "exclusions": cohort.exclusions,
        "n_input": len(patients),
    }
    ws.new_snapshot(
        {
            "cohort": dump_json(cohort_payload),
            "features": dump_json(matrix.to_dict()),
        }
    )
    return {
        "cohort_size": len(cohort),
        "exclusions": cohort.exclusions,
        "positive_rate": float(matrix.y.mean()) if len(matrix.y) else 0.0,
    }


def _load_features(ws: Workspace) -> FeatureMatrix:
    snapshot = ws.require_snapshot()
    return FeatureMatrix.from_dict(snapshot.read_json("features"))


def step_train(ws: Workspace, config: AppConfig) -> dict:
    matrix = _load_features(ws)
    section = config.model
    split = split_data(matrix.n_rows, section.fractions, section.split_seed)
    tr, va, te = list(split.train), list(split.validation), list(split.test)
    model = train_selected(
        section.kind, matrix.X[tr], matrix.y[tr], matrix.X[va], matrix.y[va], section.train
    )
    report = evaluate_scores(
        model.predict_proba(matrix.X[te]), matrix.y[te], section.threshold
    )
    ws.new_snapshot(
        {
            "split": dump_json(split.to_dict()),
            "model": dump_json(model.to_dict()),
            "metrics": dump_json({section.kind: report.to_dict()}),
        }
    )
    return {"kind": section.kind, "metrics": report.to_dict()}


def step_evaluate(ws: Workspace, config: AppConfig) -> dict:
    snapshot = ws.require_snapshot()
    matrix = _load_features(ws)
    model = RiskModel.from_dict(snapshot.read_json("model"))
    split_raw = snapshot.read_json("split")
    te = list(split_raw["test"])
    report = evaluate_scores(
        model.predict_proba(matrix.X[te]), matrix.y[te], config.model.threshold
    )
    metrics = snapshot.read_json("metrics") if snapshot.has("metrics") else {}
    metrics[model.kind] = report.to_dict()
    ws.new_snapshot({"metrics": dump_json(metrics)})
    return {"kind": model.kind, "metrics": report.to_dict()}


def _risk_pool(matrix: FeatureMatrix, model: RiskModel, test_rows: list[int], cutoff: float):
    """High-risk candidate rows (test split, predicted risk >= cutoff)."""
    risks = np.asarray(model.predict_proba(matrix.X[test_rows]))
    return [row for row, risk in zip(test_rows, risks) if risk >= cutoff]


def step_prototypes(ws: Workspace, config: AppConfig) -> dict:
    snapshot = ws.require_snapshot()
    matrix = _load_features(ws)
    model = RiskModel.from_dict(snapshot.read_json("model"))
    split_raw = snapshot.read_json("split")
    pool = _risk_pool(matrix, model, list(split_raw["test"]), config.explain.risk_cutoff)

    if pool:
        rows = matrix.X[pool]
        k = min(config.explain.prototype_k, len(pool))
        proto = protodash(rows, rows, k)
        proto_dict = proto.to_dict()
        prototype_rows = [pool[i] for i in proto.indices]
    else:
        k = 0
        proto_dict = {
            "indices": [],
            "weights": [],
            "objective_trace": [],
            "kernel_spec": {"kind": "rbf", "bandwidth": None},
        }
        prototype_rows = []
    prototype_ids = [matrix.patient_ids[r] for r in prototype_rows]
    summary_dict = {"n": 0, "rows": []}
    if prototype_rows:
        summary_dict = summarize_prototypes(
            matrix.X[prototype_rows], matrix.feature_names, matrix.ccs_labels
        ).to_dict()

    payload = {
        "prototype_set": proto_dict,
        "pool_rows": [int(r) for r in pool],
        "prototype_rows": [int(r) for r in prototype_rows],
        "patient_ids": prototype_ids,
        "risk_cutoff": config.explain.risk_cutoff,
    }
    ws.new_snapshot(
        {
            "prototypes": dump_json(payload),
            "prototype_summary": dump_json(summary_dict),
        }
    )
    return {"k": k, "patient_ids": prototype_ids}


def step_explain(ws: Workspace, config: AppConfig, patient_ids: list[str] | None = None) -> dict:
    snapshot = ws.require_snapshot()
    matrix = _load_features(ws)
    model = RiskModel.from_dict(snapshot.read_json("model"))
    if not snapshot.has("prototypes") and patient_ids is None:
        raise DependencyError(
            "prototypes not built yet; run the prototypes job first",
            missing="prototypes",
        )
    if patient_ids is None:
        patient_ids = snapshot.read_json("prototypes")["patient_ids"]

    split_raw = snapshot.read_json("split")
    reference = matrix.X[list(split_raw["train"])].mean(axis=0)

    section = config.explain
    names = tuple(matrix.feature_names)
    attributions: dict[str, Attribution] = {}
    for patient_id in patient_ids:
        try:
            row = matrix.row_for(patient_id)
        except KeyError:
            raise NotFoundError(f"unknown patient {patient_id!r}") from None
        x = matrix.X[row]
        if matrix.X.shape[1] <= section.exact_cap:
            attribution = shapley_exact(
                model, x, reference, patient_id=patient_id, feature_names=names,
                cap=section.exact_cap,
            )
        else:
            attribution = shapley_sampled(
                model, x, reference,
                n_samples=section.shapley_samples,
                seed=section.shapley_seed,
                patient_id=patient_id,
                feature_names=names,
            )
        attributions[patient_id] = attribution

    rows = np.vstack([matrix.X[matrix.row_for(pid)] for pid in patient_ids])
    ranked = aggregate_importance(
        [attributions[pid] for pid in patient_ids], rows, top_n=section.aggregate_top
    )

    payload = {
        "reference": [float(v) for v in reference],
        "items": {pid: attributions[pid].to_dict() for pid in sorted(attributions)},
    }
    ws.new_snapshot(
        {
            "attributions": dump_json(payload),
            "aggregate": dump_json([fi.to_dict() for fi in ranked]),
        }
    )
    return {"patients": len(attributions), "top_feature": ranked[0].feature if ranked else None}


def step_ingest_guidelines(
    ws: Workspace, html: bytes, parse_config: ParseConfig | None = None
) -> dict:
    doc, skipped = parse_html_with_report(html, parse_config)
    ws.new_snapshot({"guidelines": guideline_to_json(doc)})
    return {
        "chapters": len(doc.chapters),
        "recommendations": len(doc.recommendations()),
        "skipped": skipped,
    }


def fixture_guideline_html() -> bytes:
    return (resources.files("riskcontext.fixtures") / "guidelines.html").read_bytes()


def fixture_parse_config() -> ParseConfig:
    raw = (resources.files("riskcontext.fixtures") / "parse_config.json").read_text()
    return ParseConfig.from_dict(json.loads(raw))


def load_stores(ws: Workspace, config: AppConfig) -> ContextStores:
    """Materialize ContextStores from the current snapshot; missing
    artifacts stay None and raise DependencyError on first use."""
    stores = ContextStores()
    snapshot = ws.current_snapshot()
    if snapshot is None:
        return stores

    if snapshot.has("features"):
        stores.features = FeatureMatrix.from_dict(snapshot.read_json("features"))
    if snapshot.has("model"):
        stores.model = RiskModel.from_dict(snapshot.read_json("model"))
    if snapshot.has("attributions"):
        raw = snapshot.read_json("attributions")
        stores.attributions = {
            pid: Attribution.from_dict(item) for pid, item in raw["items"].items()
        }
    if snapshot.has("prototypes"):
        stores.prototype_ids = snapshot.read_json("prototypes")["patient_ids"]
    if snapshot.has("prototype_summary"):
        from .explain.summary import PrototypeSummary

        stores.prototype_summary = PrototypeSummary.from_dict(
            snapshot.read_json("prototype_summary")
        )
    if snapshot.has("guidelines"):
        doc = guideline_from_json(snapshot.read_bytes("guidelines"))
        stores.guideline_doc = doc
        stores.answerer = Bm25Answerer(
            [
                IndexedRecommendation(r.rec_id, r.text, r.numeric_constraints)
                for r in doc.recommendations()
            ],
            numeric_bonus=config.qa.numeric_bonus,
        )

    stores.drug_class = config.context.drug_class
    stores.top_importances = config.context.top_importances
    stores.qa_k = config.qa.k
    if config.context.templates_file:
        with open(config.context.templates_file, encoding="utf-8") as fh:
            stores.templates = json.load(fh)
    else:
        stores.templates = load_default_templates()
    if config.context.lab_overrides_file:
        with open(config.context.lab_overrides_file, encoding="utf-8") as fh:
            stores.lab_overrides = json.load(fh)
    return stores
