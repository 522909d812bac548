"""Question routing: each named clinician question carries fixed
source/relevance/dimension annotations and a handler binding."""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class Source(str, Enum):
    ALGORITHMIC = "Algorithmic"
    GUIDELINES = "Guidelines"
    BOTH = "Both"


class Relevance(str, Enum):
    T2DM = "T2DM"
    CKD = "CKD"
    BOTH = "Both"


class Dimension(str, Enum):
    PATIENT = "Patient"
    RISK_PREDICTION = "RiskPrediction"
    POST_HOC_EXPLANATION = "PostHocExplanation"


@dataclass(frozen=True)
class QuestionAnnotation:
    source: Source
    relevance: Relevance
    dimensions: frozenset[Dimension]

    def __post_init__(self):
        if not self.dimensions:
            raise ValueError("annotation needs at least one dimension")

    def to_dict(self) -> dict:
        return {
            "source": self.source.value,
            "relevance": self.relevance.value,
            "dimensions": sorted(d.value for d in self.dimensions),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QuestionAnnotation":
        return cls(
            source=Source(d["source"]),
            relevance=Relevance(d["relevance"]),
            dimensions=frozenset(Dimension(x) for x in d["dimensions"]),
        )


@dataclass(frozen=True)
class QuestionKind:
    key: str  # "Q1".."Q6", "Q3a", or "FreeText"
    name: str
    annotation: QuestionAnnotation
    handler: str  # answer-composer binding, see answers.py
    question_text: str = ""


def _annotation(source, relevance, *dims) -> QuestionAnnotation:
    return QuestionAnnotation(source, relevance, frozenset(dims))


QUESTION_KINDS: dict[str, QuestionKind] = {
    kind.key: kind
    for kind in (
        QuestionKind(
            "Q1",
            "PrototypeOverview",
            _annotation(Source.ALGORITHMIC, Relevance.BOTH, Dimension.POST_HOC_EXPLANATION),
            handler="prototype_overview",
            question_text="Who are the most interesting patients?",
        ),
        QuestionKind(
            "Q2",
            "RiskRationale",
            _annotation(Source.ALGORITHMIC, Relevance.CKD, Dimension.RISK_PREDICTION),
            handler="risk_rationale",
            question_text="Why does the model state a high-risk for CKD?",
        ),
        QuestionKind(
            "Q3",
            "PatientDescription",
            _annotation(Source.ALGORITHMIC, Relevance.T2DM, Dimension.RISK_PREDICTION),
            handler="patient_description",
            question_text="How will you describe the patient w.r.t diabetes?",
        ),
        QuestionKind(
            "Q3a",
            "LabThresholdGuideline",
            _annotation(Source.GUIDELINES, Relevance.T2DM, Dimension.PATIENT),
            handler="guideline_query",
            question_text="What should be done if A1C levels are greater than 10?",
        ),
        QuestionKind(
            "Q4",
            "DrugViability",
            _annotation(
                Source.GUIDELINES,
                Relevance.BOTH,
                Dimension.PATIENT,
                Dimension.RISK_PREDICTION,
            ),
            handler="drug_viability",
            question_text="What do you know about the viability of GLP-1 RA drugs for the patient?",
        ),
        QuestionKind(
            "Q5",
            "ComplicationTreatment",
            _annotation(
                Source.GUIDELINES,
                Relevance.BOTH,
                Dimension.PATIENT,
                Dimension.RISK_PREDICTION,
            ),
            handler="guideline_query",
            question_text="What drugs to administer for patients with T2D complications?",
        ),
        QuestionKind(
            "Q6",
            "TreatmentGoals",
            _annotation(Source.GUIDELINES, Relevance.T2DM, Dimension.PATIENT),
            handler="guideline_query",
            question_text="What is typically done for patients like this who are not meeting treatment goals?",
        ),
    )
}

FREE_TEXT = QuestionKind(
    "FreeText",
    "FreeText",
    _annotation(Source.GUIDELINES, Relevance.BOTH, Dimension.PATIENT),
    handler="free_text",
)

_NAME_TO_KEY = {kind.name.lower(): key for key, kind in QUESTION_KINDS.items()}


def _normalize(text: str) -> str:
    return re.sub(r"[^a-z0-9 ]", "", text.lower()).strip()


_TEXT_TO_KEY = {_normalize(kind.question_text): key for key, kind in QUESTION_KINDS.items()}


_KEY_LOOKUP = {key.lower(): key for key in QUESTION_KINDS}


def route(kind_or_text: str) -> QuestionKind:
    """Resolve a question key, kind name, or canonical question text;
    anything else becomes FreeText."""
    token = kind_or_text.strip()
    if token.lower() in _KEY_LOOKUP:
        return QUESTION_KINDS[_KEY_LOOKUP[token.lower()]]
    if token.lower() in _NAME_TO_KEY:
        return QUESTION_KINDS[_NAME_TO_KEY[token.lower()]]
    normalized = _normalize(token)
    if normalized in _TEXT_TO_KEY:
        return QUESTION_KINDS[_TEXT_TO_KEY[normalized]]
    return QuestionKind(
        key=FREE_TEXT.key,
        name=FREE_TEXT.name,
        annotation=FREE_TEXT.annotation,
        handler=FREE_TEXT.handler,
        question_text=kind_or_text,
    )
