from .numeric import (
    DEFAULT_ALIASES,
    Interval,
    NumericConstraint,
    constraint_satisfied,
    parse_numeric_phrases,
    quantities_match,
    render_constraint,
)
from .retriever import (
    Answerer,
    BM25_B,
    BM25_K1,
    Bm25Answerer,
    IndexedRecommendation,
    NUMERIC_BONUS_WEIGHT,
    RankedAnswer,
    STOPWORDS,
    tokenize,
)

__all__ = [
    "Answerer",
    "BM25_B",
    "BM25_K1",
    "Bm25Answerer",
    "DEFAULT_ALIASES",
    "IndexedRecommendation",
    "Interval",
    "NUMERIC_BONUS_WEIGHT",
    "NumericConstraint",
    "RankedAnswer",
    "STOPWORDS",
    "constraint_satisfied",
    "parse_numeric_phrases",
    "quantities_match",
    "render_constraint",
    "tokenize",
]
