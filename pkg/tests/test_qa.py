import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskcontext.errors import QueryError
from riskcontext.qa import (
    Bm25Answerer,
    Interval,
    NumericConstraint,
    constraint_satisfied,
    parse_numeric_phrases,
    render_constraint,
    tokenize,
)


def one(text):
    constraints = parse_numeric_phrases(text)
    assert len(constraints) == 1, constraints
    return constraints[0]


class TestNumericGrammar:
    def test_greater_than(self):
        c = one("A1C levels are greater than 10")
        assert c.quantity == "a1c"
        assert c.interval == Interval(10, math.inf, lower_open=True)

    def test_between(self):
        c = one("between 5 and 9")
        assert c.interval == Interval(5, 9)

    def test_closed_bound_with_unit(self):
        c = one("blood glucose levels (greater than or equal to 300 mg/dL)")
        assert c.quantity == "glucose"
        assert c.unit == "mg/dL"
        assert c.interval == Interval(300, math.inf, lower_open=False)

    @pytest.mark.parametrize(
        "phrase,lower,upper,lower_open,upper_open",
        [
            ("at least 5", 5, math.inf, False, False),
            ("at most 5", -math.inf, 5, False, False),
            ("above 5", 5, math.inf, True, False),
            ("below 5", -math.inf, 5, False, True),
            ("less than or equal to 5", -math.inf, 5, False, False),
            ("< 5", -math.inf, 5, False, True),
            (">= 5", 5, math.inf, False, False),
        ],
    )
    def test_comparators(self, phrase, lower, upper, lower_open, upper_open):
        c = one(f"value {phrase}")
        assert c.interval == Interval(lower, upper, lower_open, upper_open)

    def test_bracketed_restatement_attaches(self):
        c = one("A1C greater than 10% [ 86 mmol/mol ]")
        assert c.unit == "%"
        assert len(c.alternates) == 1
        alt_interval, alt_unit = c.alternates[0]
        assert alt_unit == "mmol/mol" and alt_interval.lower == 86

    def test_no_comparator_no_constraint(self):
        assert parse_numeric_phrases("take 0.8 grams per kilogram daily") == []

    def test_comparator_without_number_skipped(self):
        assert parse_numeric_phrases("at least annually, check kidneys") == []

    def test_decimal_values(self):
        c = one("potassium at most 5.5 mmol/L")
        assert c.interval.upper == 5.5 and c.unit == "mmol/L"

    def test_quantity_window(self):
        c = one("eGFR is below 60")
        assert c.quantity == "egfr"

    def test_source_span_covers_match(self):
        text = "keep A1C greater than 7 at review"
        c = one(text)
        assert text[c.source_span[0] : c.source_span[1]] == "greater than 7"


class TestContainment:
    def make(self, quantity, lower, upper, lower_open=False, upper_open=False, unit=None):
        return NumericConstraint(
            quantity=quantity,
            interval=Interval(lower, upper, lower_open, upper_open),
            unit=unit,
        )

    def test_reflexive(self):
        q = self.make("a1c", 10, math.inf, lower_open=True)
        assert constraint_satisfied(q, q)

    def test_wider_question_not_contained(self):
        q = self.make("a1c", 7, math.inf, lower_open=True)
        a = self.make("a1c", 10, math.inf, lower_open=True)
        assert not constraint_satisfied(q, a)
        assert constraint_satisfied(a, q)

    def test_quantity_mismatch(self):
        q = self.make("a1c", 10, math.inf, lower_open=True)
        a = self.make("glucose", 10, math.inf, lower_open=True)
        assert not constraint_satisfied(q, a)

    def test_alias_table(self):
        q = self.make("hba1c", 10, math.inf, lower_open=True)
        a = self.make("a1c", 9, math.inf, lower_open=True)
        assert constraint_satisfied(q, a)

    def test_open_closed_boundary(self):
        closed = self.make("x", 10, math.inf)
        open_ = self.make("x", 10, math.inf, lower_open=True)
        assert constraint_satisfied(open_, closed)
        assert not constraint_satisfied(closed, open_)

    def test_unit_mismatch_fails(self):
        q = self.make("a1c", 10, math.inf, unit="%")
        a = self.make("a1c", 10, math.inf, unit="mmol/mol")
        assert not constraint_satisfied(q, a)

    def test_missing_unit_is_wildcard(self):
        q = self.make("a1c", 10, math.inf)
        a = self.make("a1c", 10, math.inf, unit="%")
        assert constraint_satisfied(q, a)

    def test_alternate_form_enables_match(self):
        q = self.make("a1c", 90, math.inf, unit="mmol/mol")
        a = NumericConstraint(
            quantity="a1c",
            interval=Interval(10, math.inf),
            unit="%",
            alternates=((Interval(86, math.inf), "mmol/mol"),),
        )
        assert constraint_satisfied(q, a)

    @given(
        st.floats(-100, 100),
        st.floats(0.1, 50),
        st.floats(0.1, 50),
        st.floats(0.1, 50),
    )
    @settings(max_examples=80, deadline=None)
    def test_containment_implies_midpoint_witness(self, lo, width_q, pad_lo, pad_hi):
        q = self.make("x", lo, lo + width_q)
        a = self.make("x", lo - pad_lo, lo + width_q + pad_hi)
        assert constraint_satisfied(q, a)
        mid = (q.interval.lower + q.interval.upper) / 2
        assert a.interval.lower <= mid <= a.interval.upper


class TestRenderStability:
    @given(
        st.sampled_from(["a1c", "glucose", "egfr", "potassium"]),
        st.sampled_from(["lower_open", "lower_closed", "upper_open", "upper_closed", "between"]),
        st.integers(1, 400),
        st.integers(1, 50),
        st.sampled_from([None, "%", "mg/dL", "mmol/mol", "mmol/L"]),
    )
    @settings(max_examples=100, deadline=None)
    def test_parse_render_parse(self, quantity, shape, value, width, unit):
        if shape == "between":
            interval = Interval(value, value + width)
        elif shape == "lower_open":
            interval = Interval(value, math.inf, lower_open=True)
        elif shape == "lower_closed":
            interval = Interval(value, math.inf)
        elif shape == "upper_open":
            interval = Interval(-math.inf, value, upper_open=True)
        else:
            interval = Interval(-math.inf, value)
        c = NumericConstraint(quantity=quantity, interval=interval, unit=unit)
        back = parse_numeric_phrases(render_constraint(c))
        assert len(back) == 1
        assert (back[0].quantity, back[0].interval, back[0].unit) == (
            c.quantity,
            c.interval,
            c.unit,
        )


DOCS = [
    ("r1", "Start insulin when A1C levels are greater than 10 percent overall."),
    ("r2", "Continue metformin for stable kidney function and review yearly."),
    ("r3", "Refer to nephrology when eGFR is less than 30."),
]


class TestAnswerer:
    def test_empty_question_rejected(self):
        answerer = Bm25Answerer(DOCS)
        with pytest.raises(QueryError):
            answerer.ask("the of and")

    def test_deterministic_and_insertion_order_invariant(self):
        q = "When should insulin start for high A1C?"
        a = Bm25Answerer(DOCS).ask(q)
        b = Bm25Answerer(list(reversed(DOCS))).ask(q)
        assert [r.rec_id for r in a] == [r.rec_id for r in b]
        assert [r.total for r in a] == [r.total for r in b]

    def test_numeric_bonus_contained(self):
        answerer = Bm25Answerer(DOCS)
        results = {r.rec_id: r for r in answerer.ask("a1c greater than 10", k=3)}
        assert results["r1"].numeric_bonus == 2.0
        assert results["r1"].matched_constraints

    def test_numeric_bonus_zero_when_not_contained(self):
        answerer = Bm25Answerer(DOCS)
        results = {r.rec_id: r for r in answerer.ask("a1c greater than 7", k=3)}
        assert results["r1"].numeric_bonus == 0.0

    def test_scores_nonnegative(self):
        answerer = Bm25Answerer(DOCS)
        for r in answerer.ask("insulin kidney nephrology", k=3):
            assert r.lexical_score >= 0 and r.numeric_bonus >= 0

    def test_irrelevant_doc_never_displaces_positive_total(self):
        q = "insulin for high a1c"
        base = Bm25Answerer(DOCS).ask(q, k=len(DOCS))
        padded = Bm25Answerer(DOCS + [("zz", "Унrelated tokens about gardening soil")]).ask(
            q, k=len(DOCS) + 1
        )
        base_positive = [r.rec_id for r in base if r.total > 0]
        padded_positive = [r.rec_id for r in padded if r.total > 0]
        assert base_positive == padded_positive

    def test_tie_break_by_rec_id(self):
        docs = [("b", "identical text here"), ("a", "identical text here")]
        results = Bm25Answerer(docs).ask("identical text", k=2)
        assert [r.rec_id for r in results] == ["a", "b"]

    def test_tokenizer_drops_stopwords(self):
        assert tokenize("What is the A1C of the patient?") == ["what", "a1c", "patient"]
