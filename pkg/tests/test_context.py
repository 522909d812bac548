import json

import numpy as np
import pytest

from riskcontext.context import (
    AnswerBundle,
    ContextStores,
    Dimension,
    Relevance,
    Source,
    answer,
    render,
    route,
)
from riskcontext.errors import DependencyError, InputError, NotFoundError

# (source, relevance, dimensions) per named question, cell for cell.
EXPECTED_ROUTES = {
    "Q1": (Source.ALGORITHMIC, Relevance.BOTH, {Dimension.POST_HOC_EXPLANATION}),
    "Q2": (Source.ALGORITHMIC, Relevance.CKD, {Dimension.RISK_PREDICTION}),
    "Q3": (Source.ALGORITHMIC, Relevance.T2DM, {Dimension.RISK_PREDICTION}),
    "Q3a": (Source.GUIDELINES, Relevance.T2DM, {Dimension.PATIENT}),
    "Q4": (
        Source.GUIDELINES,
        Relevance.BOTH,
        {Dimension.PATIENT, Dimension.RISK_PREDICTION},
    ),
    "Q5": (
        Source.GUIDELINES,
        Relevance.BOTH,
        {Dimension.PATIENT, Dimension.RISK_PREDICTION},
    ),
    "Q6": (Source.GUIDELINES, Relevance.T2DM, {Dimension.PATIENT}),
}


class TestRouting:
    @pytest.mark.parametrize("key", sorted(EXPECTED_ROUTES))
    def test_table(self, key):
        kind = route(key)
        source, relevance, dims = EXPECTED_ROUTES[key]
        assert kind.key == key
        assert kind.annotation.source == source
        assert kind.annotation.relevance == relevance
        assert set(kind.annotation.dimensions) == dims

    def test_unknown_text_routes_to_free_text(self):
        kind = route("Does this patient need a statin?")
        assert kind.key == "FreeText"
        assert kind.annotation.source == Source.GUIDELINES
        assert kind.question_text == "Does this patient need a statin?"

    def test_canonical_question_text_routes_to_kind(self):
        kind = route("Who are the most interesting patients?")
        assert kind.key == "Q1"

    def test_kind_name_routes(self):
        assert route("PrototypeOverview").key == "Q1"

    def test_routing_total_and_deterministic(self):
        for key in EXPECTED_ROUTES:
            assert route(key).key == route(key.lower()).key == key


class TestAnswers:
    def _pid(self, built_stores):
        return built_stores.prototype_ids[0]

    def test_q1_prototype_summary(self, built_stores):
        bundle = answer("Q1", built_stores)
        assert bundle.parts[0].kind == "PrototypeSummary"
        assert bundle.parts[0].payload["n"] == len(built_stores.prototype_ids)

    def test_q2_importances_and_risk(self, built_stores):
        bundle = answer("Q2", built_stores, self._pid(built_stores))
        kinds = [p.kind for p in bundle.parts]
        assert kinds == ["FeatureImportance", "RiskScore"]
        entries = bundle.parts[0].payload["entries"]
        assert len(entries) == built_stores.top_importances

    def test_q3_description(self, built_stores):
        bundle = answer("Q3", built_stores, self._pid(built_stores))
        kinds = [p.kind for p in bundle.parts]
        assert kinds == ["TemplatedText", "CohortStat"]
        groups = bundle.parts[1].payload["groups"]
        counts = [g["count"] for g in groups]
        assert counts == sorted(counts, reverse=True)

    def test_q3a_retrieves_insulin_recommendation(self, built_stores):
        bundle = answer("Q3a", built_stores, self._pid(built_stores))
        assert bundle.parts[0].kind == "GuidelineText"
        assert "early introduction of insulin" in bundle.parts[0].payload["text"]
        assert bundle.parts[0].payload["numeric_bonus"] > 0

    def test_q4_renders_two_decimal_risk(self, built_stores):
        pid = self._pid(built_stores)
        bundle = answer("Q4", built_stores, pid)
        templated = bundle.parts[0]
        risk_part = next(p for p in bundle.parts if p.kind == "RiskScore")
        assert templated.payload["slots"]["risk"] == risk_part.payload["risk_display"]
        assert f"risk is found to be {risk_part.payload['risk_display']}" in templated.payload["text"]

    def test_q6_retrieves_delay_recommendation(self, built_stores):
        bundle = answer("Q6", built_stores, self._pid(built_stores))
        assert "should not be delayed" in bundle.parts[0].payload["text"]

    def test_q4_template_varies_only_in_patient_slots(self, built_stores):
        ids = built_stores.prototype_ids[:2]
        texts = []
        for pid in ids:
            bundle = answer("Q4", built_stores, pid)
            payload = bundle.parts[0].payload
            text = payload["text"]
            text = text.replace(payload["slots"]["risk"], "{risk}")
            text = text.replace(" and ".join(payload["slots"]["comorbidity_list"]), "{c}")
            texts.append(text)
        assert len(set(texts)) == 1

    def test_patient_required(self, built_stores):
        with pytest.raises(InputError):
            answer("Q2", built_stores)

    def test_unknown_patient(self, built_stores):
        with pytest.raises(NotFoundError):
            answer("Q2", built_stores, "NOPE")

    def test_missing_store_errors_with_name(self, built_stores):
        empty = ContextStores()
        with pytest.raises(DependencyError) as err:
            answer("Q1", empty)
        assert err.value.missing == "prototype_summary"

    def test_provenance_resolves(self, built_stores):
        pid = self._pid(built_stores)
        rec_ids = {r.rec_id for r in built_stores.guideline_doc.recommendations()}
        for key in ("Q1", "Q2", "Q3", "Q3a", "Q4", "Q5", "Q6"):
            bundle = answer(key, built_stores, pid)
            for part in bundle.parts:
                assert part.provenance.module
                rec_id = part.provenance.identifiers.get("rec_id")
                if rec_id and part.kind == "GuidelineText" and "free_text" not in rec_id:
                    assert rec_id in rec_ids

    def test_free_text_answer(self, built_stores):
        bundle = answer("When should metformin be the initial agent?", built_stores)
        assert bundle.annotation.source == Source.GUIDELINES
        assert all(p.kind == "GuidelineText" for p in bundle.parts)


class TestRender:
    def test_json_round_trip(self, built_stores):
        bundle = answer("Q1", built_stores)
        parsed = AnswerBundle.from_dict(json.loads(render(bundle, "json")))
        assert parsed == bundle

    def test_text_contains_provenance_footnotes(self, built_stores):
        pid = built_stores.prototype_ids[0]
        bundle = answer("Q3a", built_stores, pid)
        text = render(bundle, "text").decode()
        assert "provenance:" in text
        assert "rec_id=ch1.g1.r3" in text

    def test_empty_parts_rejected_at_construction(self, built_stores):
        bundle = answer("Q1", built_stores)
        with pytest.raises(InputError):
            AnswerBundle(question="q", annotation=bundle.annotation, parts=())

    def test_unknown_format(self, built_stores):
        bundle = answer("Q1", built_stores)
        with pytest.raises(InputError):
            render(bundle, "yaml")
