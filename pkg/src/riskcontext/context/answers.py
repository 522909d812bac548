"""Answer composition: route a question kind to its backing stores and
assemble an ordered bundle of provenance-carrying parts."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from ..cohort.types import FeatureMatrix
from ..errors import DependencyError, InputError, NotFoundError
from ..explain.shapley import Attribution
from ..explain.summary import PrototypeSummary
from ..guidelines.model import GuidelineDoc
from ..models.nets import RiskModel
from ..qa.retriever import Answerer
from .routing import QuestionKind, QuestionAnnotation, route

PART_KINDS = (
    "RiskScore",
    "FeatureImportance",
    "PrototypeSummary",
    "GuidelineText",
    "CohortStat",
    "TemplatedText",
)


def load_default_templates() -> dict[str, str]:
    raw = (resources.files("riskcontext.fixtures") / "templates.json").read_text()
    return json.loads(raw)


@dataclass(frozen=True)
class Provenance:
    module: str
    identifiers: dict

    def to_dict(self) -> dict:
        return {"module": self.module, "identifiers": dict(self.identifiers)}

    @classmethod
    def from_dict(cls, d: dict) -> "Provenance":
        return cls(module=d["module"], identifiers=dict(d["identifiers"]))


@dataclass(frozen=True)
class AnswerPart:
    kind: str
    payload: dict
    provenance: Provenance

    def __post_init__(self):
        if self.kind not in PART_KINDS:
            raise InputError(f"unknown part kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "payload": self.payload,
            "provenance": self.provenance.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnswerPart":
        return cls(
            kind=d["kind"],
            payload=d["payload"],
            provenance=Provenance.from_dict(d["provenance"]),
        )


@dataclass(frozen=True)
class AnswerBundle:
    question: str
    annotation: QuestionAnnotation
    parts: tuple[AnswerPart, ...]

    def __post_init__(self):
        if not self.parts:
            raise InputError("an answer bundle needs at least one part")

    def to_dict(self) -> dict:
        return {
            "question": self.question,
            "annotation": self.annotation.to_dict(),
            "parts": [p.to_dict() for p in self.parts],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnswerBundle":
        return cls(
            question=d["question"],
            annotation=QuestionAnnotation.from_dict(d["annotation"]),
            parts=tuple(AnswerPart.from_dict(p) for p in d["parts"]),
        )


@dataclass
class ContextStores:
    """Everything answer composition can draw on; None means not built."""

    model: RiskModel | None = None
    features: FeatureMatrix | None = None
    attributions: dict[str, Attribution] | None = None
    prototype_ids: list[str] | None = None
    prototype_summary: PrototypeSummary | None = None
    answerer: Answerer | None = None
    guideline_doc: GuidelineDoc | None = None
    templates: dict[str, str] = field(default_factory=load_default_templates)
    lab_overrides: dict[str, dict] = field(default_factory=dict)
    drug_class: str = "GLP-1 RA"
    top_importances: int = 10
    qa_k: int = 3

    def require(self, name: str):
        value = getattr(self, name)
        if value is None:
            raise DependencyError(f"store {name!r} has not been built", missing=name)
        return value


def condition_group_stats(features: FeatureMatrix) -> list[dict]:
    """Cohort-wide Level-1 group frequencies, descending."""
    groups: dict[str, list[int]] = {}
    for i, name in enumerate(features.feature_names):
        label = features.ccs_labels.get(name)
        if label:
            groups.setdefault(label, []).append(i)
    n = max(features.n_rows, 1)
    stats = []
    for label in sorted(groups):
        hit = np.any(features.X[:, groups[label]] > 0.5, axis=1)
        stats.append(
            {
                "label": label,
                "count": int(hit.sum()),
                "frequency": round(float(hit.mean()), 4),
                "columns": groups[label],
            }
        )
    stats.sort(key=lambda s: (-s["count"], s["label"]))
    return stats


def _risk_display(risk: float) -> str:
    return f"{risk:.2f}"


def _patient_row(stores: ContextStores, patient_id: str) -> tuple[int, np.ndarray]:
    features = stores.require("features")
    try:
        row = features.row_for(patient_id)
    except KeyError:
        raise NotFoundError(f"unknown patient {patient_id!r}") from None
    return row, features.X[row]


def _patient_groups(stores: ContextStores, patient_id: str) -> list[dict]:
    """The patient's condition groups, ordered by cohort frequency."""
    features = stores.require("features")
    _, x = _patient_row(stores, patient_id)
    out = []
    for stat in condition_group_stats(features):
        if np.any(x[stat["columns"]] > 0.5):
            out.append({k: stat[k] for k in ("label", "count", "frequency")})
    return out


def _lab_flags(stores: ContextStores, patient_id: str) -> list[dict]:
    """Lab-proxy flags; claims carry no labs, so values come from the
    optional override file and are marked proxy-derived."""
    overrides = stores.lab_overrides.get(patient_id, {})
    flags = []
    a1c = overrides.get("hba1c")
    if a1c is not None and float(a1c) >= 10:
        flags.append(
            {"flag": f"High HbA1C (>= 10): measured {a1c}", "proxy_derived": True}
        )
    return flags


def _part_risk(stores: ContextStores, patient_id: str) -> AnswerPart:
    model = stores.require("model")
    _, x = _patient_row(stores, patient_id)
    risk = float(model.predict_proba(x))
    return AnswerPart(
        kind="RiskScore",
        payload={
            "patient_id": patient_id,
            "risk": risk,
            "risk_display": _risk_display(risk),
        },
        provenance=Provenance("models", {"kind": model.kind, "patient_id": patient_id}),
    )


def _handle_prototype_overview(stores: ContextStores, patient_id, question) -> list[AnswerPart]:
    summary = stores.require("prototype_summary")
    return [
        AnswerPart(
            kind="PrototypeSummary",
            payload=summary.to_dict(),
            provenance=Provenance(
                "explain", {"prototype_ids": stores.require("prototype_ids")}
            ),
        )
    ]


def _handle_risk_rationale(stores: ContextStores, patient_id, question) -> list[AnswerPart]:
    attributions = stores.require("attributions")
    if patient_id not in attributions:
        raise NotFoundError(f"no attribution computed for patient {patient_id!r}")
    attribution = attributions[patient_id]
    _, x = _patient_row(stores, patient_id)
    order = np.argsort(-np.abs(attribution.phi), kind="mergesort")
    entries = [
        {
            "feature": attribution.feature_names[i],
            "phi": float(attribution.phi[i]),
            "present": bool(x[i] > 0.5),
        }
        for i in order[: stores.top_importances]
    ]
    importance = AnswerPart(
        kind="FeatureImportance",
        payload={
            "patient_id": patient_id,
            "baseline_value": attribution.baseline_value,
            "method": attribution.method,
            "entries": entries,
        },
        provenance=Provenance(
            "explain", {"patient_id": patient_id, "method": attribution.method}
        ),
    )
    return [importance, _part_risk(stores, patient_id)]


def _handle_patient_description(stores: ContextStores, patient_id, question) -> list[AnswerPart]:
    flags = _lab_flags(stores, patient_id)
    groups = _patient_groups(stores, patient_id)
    flags_text = "; ".join(f["flag"] for f in flags)
    template = stores.templates["Q3_patient_description"]
    text = template.format(
        flags=f"{flags_text}. " if flags_text else "",
        condition_list=" | ".join(g["label"] for g in groups[:5]),
    )
    templated = AnswerPart(
        kind="TemplatedText",
        payload={
            "template_key": "Q3_patient_description",
            "text": text,
            "slots": {"flags": flags, "condition_list": [g["label"] for g in groups[:5]]},
        },
        provenance=Provenance("context", {"template": "Q3_patient_description"}),
    )
    stat = AnswerPart(
        kind="CohortStat",
        payload={"patient_id": patient_id, "groups": groups},
        provenance=Provenance("cohort", {"patient_id": patient_id}),
    )
    return [templated, stat]


def _guideline_parts(stores: ContextStores, query: str) -> list[AnswerPart]:
    answerer = stores.require("answerer")
    grades = {}
    doc = stores.guideline_doc
    if doc is not None:
        grades = {r.rec_id: r.grade for r in doc.recommendations()}
    parts = []
    for ranked in answerer.ask(query, k=stores.qa_k):
        parts.append(
            AnswerPart(
                kind="GuidelineText",
                payload={
                    "rec_id": ranked.rec_id,
                    "text": ranked.answer_text,
                    "grade": grades.get(ranked.rec_id, "Ungraded"),
                    "lexical_score": ranked.lexical_score,
                    "numeric_bonus": ranked.numeric_bonus,
                    "total": ranked.total,
                    "matched_constraints": [
                        {"question": q.to_dict(), "answer": a.to_dict()}
                        for q, a in ranked.matched_constraints
                    ],
                },
                provenance=Provenance("qa", {"rec_id": ranked.rec_id, "query": query}),
            )
        )
    return parts


def _query_for(kind: QuestionKind, stores: ContextStores, patient_id: str | None) -> str:
    if kind.key == "Q3a":
        a1c = 10
        if patient_id is not None:
            a1c = stores.lab_overrides.get(patient_id, {}).get("hba1c", 10)
        return stores.templates["Q3a_query"].format(a1c_value=a1c)
    if kind.key == "Q5":
        groups = _patient_groups(stores, patient_id)
        stems = [g["label"].lower() for g in groups[:3]] or ["multiple organ systems"]
        return stores.templates["Q5_query"].format(complication_list=", ".join(stems))
    if kind.key == "Q6":
        return stores.templates["Q6_query"]
    return kind.question_text


def _handle_guideline_query(stores: ContextStores, patient_id, question, kind) -> list[AnswerPart]:
    query = _query_for(kind, stores, patient_id)
    parts = _guideline_parts(stores, query)
    if not parts:
        raise DependencyError("guideline index returned no results", missing="answerer")
    return parts


def _handle_drug_viability(stores: ContextStores, patient_id, question) -> list[AnswerPart]:
    risk_part = _part_risk(stores, patient_id)
    groups = _patient_groups(stores, patient_id)
    comorbidities = [g["label"].lower() for g in groups[:2]] or ["no mapped conditions"]
    text = stores.templates["Q4_drug_viability"].format(
        drug_class=stores.drug_class,
        risk=risk_part.payload["risk_display"],
        comorbidity_list=" and ".join(comorbidities),
    )
    templated = AnswerPart(
        kind="TemplatedText",
        payload={
            "template_key": "Q4_drug_viability",
            "text": text,
            "slots": {
                "drug_class": stores.drug_class,
                "risk": risk_part.payload["risk_display"],
                "comorbidity_list": comorbidities,
            },
        },
        provenance=Provenance("context", {"template": "Q4_drug_viability"}),
    )
    parts = [templated, risk_part]
    doc = stores.guideline_doc
    if doc is not None:
        for chapter in doc.chapters:
            for si, section in enumerate(chapter.free_text_sections):
                if "neutral effect" in section:
                    parts.append(
                        AnswerPart(
                            kind="GuidelineText",
                            payload={
                                "rec_id": f"{chapter.chapter_id}.free_text[{si}]",
                                "text": section,
                                "grade": "Ungraded",
                            },
                            provenance=Provenance(
                                "guidelines",
                                {"chapter_id": chapter.chapter_id, "section": si},
                            ),
                        )
                    )
    return parts


_PATIENT_REQUIRED = {"Q2", "Q3", "Q3a", "Q4", "Q5", "Q6"}


def answer(kind_or_text: str, stores: ContextStores, patient_id: str | None = None) -> AnswerBundle:
    kind = route(kind_or_text)
    if kind.key in _PATIENT_REQUIRED:
        if patient_id is None:
            raise InputError(f"{kind.key} requires a patient_id")
        _patient_row(stores, patient_id)  # not-found check up front

    if kind.handler == "prototype_overview":
        parts = _handle_prototype_overview(stores, patient_id, kind.question_text)
    elif kind.handler == "risk_rationale":
        parts = _handle_risk_rationale(stores, patient_id, kind.question_text)
    elif kind.handler == "patient_description":
        parts = _handle_patient_description(stores, patient_id, kind.question_text)
    elif kind.handler == "guideline_query":
        parts = _handle_guideline_query(stores, patient_id, kind.question_text, kind)
    elif kind.handler == "drug_viability":
        parts = _handle_drug_viability(stores, patient_id, kind.question_text)
    elif kind.handler == "free_text":
        parts = _guideline_parts(stores, kind.question_text)
        if not parts:
            raise DependencyError("guideline index returned no results", missing="answerer")
    else:  # pragma: no cover - routing table is closed
        raise InputError(f"no handler for {kind.key}")

    return AnswerBundle(
        question=kind.question_text, annotation=kind.annotation, parts=tuple(parts)
    )


def render(bundle: AnswerBundle, format: str = "json") -> bytes:
    """Lossless JSON or a human-readable text layout with provenance
    footnotes, parts in order."""
    if format == "json":
        return (json.dumps(bundle.to_dict(), indent=2, sort_keys=True) + "\n").encode()
    if format != "text":
        raise InputError(f"unknown render format {format!r}")

    lines = [f"Q: {bundle.question}"]
    ann = bundle.annotation
    lines.append(
        f"[source: {ann.source.value} | relevance: {ann.relevance.value} | "
        f"contextualization: {', '.join(sorted(d.value for d in ann.dimensions))}]"
    )
    footnotes = []
    for i, part in enumerate(bundle.parts, start=1):
        payload = part.payload
        if part.kind == "RiskScore":
            body = f"Predicted CKD risk: {payload['risk_display']}"
        elif part.kind == "FeatureImportance":
            rows = [
                f"    {e['feature']}: phi={e['phi']:+.4f}"
                f" ({'present' if e['present'] else 'absent'})"
                for e in payload["entries"]
            ]
            body = "Feature importance:\n" + "\n".join(rows)
        elif part.kind == "PrototypeSummary":
            body = PrototypeSummary.from_dict(payload).render_text().rstrip()
        elif part.kind == "GuidelineText":
            grade = payload.get("grade", "Ungraded")
            body = f"{payload['text']} (grade {grade})"
        elif part.kind == "CohortStat":
            rows = [
                f"    {g['label']}: {g['count']} ({100 * g['frequency']:.1f}%)"
                for g in payload["groups"]
            ]
            body = "Condition groups (cohort frequency):\n" + "\n".join(rows)
        else:  # TemplatedText
            body = payload["text"]
        lines.append(f"  [{i}] {body}")
        ident = ", ".join(
            f"{k}={v}" for k, v in sorted(part.provenance.identifiers.items())
            if not isinstance(v, (list, dict))
        )
        footnotes.append(f"  ^{i} {part.provenance.module}" + (f" ({ident})" if ident else ""))
    lines.append("provenance:")
    lines.extend(footnotes)
    return ("\n".join(lines) + "\n").encode()
