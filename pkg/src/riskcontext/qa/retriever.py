"""Lexical retrieval over recommendation text with a numeric-range bonus.

BM25 supplies the lexical score; every question constraint contained in
a recommendation's ranges adds a fixed bonus. The `Answerer` interface
keeps the scorer swappable (e.g. for a learned reader) without touching
callers.
"""
from __future__ import annotations

import math
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass

from ..errors import QueryError
from .numeric import (
    DEFAULT_ALIASES,
    NumericConstraint,
    constraint_satisfied,
    parse_numeric_phrases,
)

BM25_K1 = 1.2
BM25_B = 0.75
NUMERIC_BONUS_WEIGHT = 2.0

STOPWORDS = frozenset(
    """a an and are as at be by for from if in into is it of on or that the
    their this to was were with""".split()
)

_TOKEN = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    return [t for t in _TOKEN.findall(text.lower()) if t not in STOPWORDS]


@dataclass(frozen=True)
class RankedAnswer:
    rec_id: str
    answer_text: str
    lexical_score: float
    numeric_bonus: float
    matched_constraints: tuple[tuple[NumericConstraint, NumericConstraint], ...]

    @property
    def total(self) -> float:
        return self.lexical_score + self.numeric_bonus

    def to_dict(self) -> dict:
        return {
            "rec_id": self.rec_id,
            "answer_text": self.answer_text,
            "lexical_score": self.lexical_score,
            "numeric_bonus": self.numeric_bonus,
            "total": self.total,
            "matched_constraints": [
                {"question": q.to_dict(), "answer": a.to_dict()}
                for q, a in self.matched_constraints
            ],
        }


class Answerer(ABC):
    """Anything that can answer questions over a recommendation store."""

    @abstractmethod
    def ask(self, question: str, k: int = 3) -> list[RankedAnswer]:
        ...


@dataclass(frozen=True)
class IndexedRecommendation:
    rec_id: str
    text: str
    constraints: tuple[NumericConstraint, ...]


class Bm25Answerer(Answerer):
    """Deterministic BM25 + numeric-containment answerer.

    The index is immutable once built; rebuilds swap in a new instance.
    """

    def __init__(
        self,
        recommendations: list[tuple[str, str]] | list[IndexedRecommendation],
        k1: float = BM25_K1,
        b: float = BM25_B,
        numeric_bonus: float = NUMERIC_BONUS_WEIGHT,
        aliases: tuple[set[str], ...] = DEFAULT_ALIASES,
    ):
        docs: list[IndexedRecommendation] = []
        for item in recommendations:
            if isinstance(item, IndexedRecommendation):
                docs.append(item)
            else:
                rec_id, text = item
                docs.append(
                    IndexedRecommendation(
                        rec_id=rec_id,
                        text=text,
                        constraints=tuple(parse_numeric_phrases(text)),
                    )
                )
        docs.sort(key=lambda d: d.rec_id)
        self.docs = tuple(docs)
        self.k1 = k1
        self.b = b
        self.numeric_bonus = numeric_bonus
        self.aliases = aliases

        self._doc_tokens = [tokenize(d.text) for d in self.docs]
        self._doc_lens = [len(t) for t in self._doc_tokens]
        self._avg_len = (
            sum(self._doc_lens) / len(self._doc_lens) if self._doc_lens else 0.0
        )
        self._tf: list[dict[str, int]] = []
        df: dict[str, int] = {}
        for tokens in self._doc_tokens:
            counts: dict[str, int] = {}
            for t in tokens:
                counts[t] = counts.get(t, 0) + 1
            self._tf.append(counts)
            for t in counts:
                df[t] = df.get(t, 0) + 1
        n = len(self.docs)
        # +1 inside the log keeps IDF (and so all scores) nonnegative.
        self._idf = {
            t: math.log(1.0 + (n - d + 0.5) / (d + 0.5)) for t, d in df.items()
        }

    def __len__(self) -> int:
        return len(self.docs)

    def _lexical_score(self, query_tokens: list[str], doc_idx: int) -> float:
        tf = self._tf[doc_idx]
        length_norm = 1.0 - self.b + self.b * (
            self._doc_lens[doc_idx] / self._avg_len if self._avg_len else 0.0
        )
        score = 0.0
        for t in query_tokens:
            f = tf.get(t, 0)
            if f == 0:
                continue
            score += self._idf[t] * f * (self.k1 + 1.0) / (f + self.k1 * length_norm)
        return score

    def ask(self, question: str, k: int = 3) -> list[RankedAnswer]:
        query_tokens = tokenize(question)
        if not query_tokens:
            raise QueryError("question is empty after tokenization")
        question_constraints = parse_numeric_phrases(question)

        results = []
        for i, doc in enumerate(self.docs):
            matched = tuple(
                (q, a)
                for q in question_constraints
                for a in doc.constraints
                if constraint_satisfied(q, a, self.aliases)
            )
            n_satisfied = sum(
                1
                for q in question_constraints
                if any(constraint_satisfied(q, a, self.aliases) for a in doc.constraints)
            )
            bonus = self.numeric_bonus * n_satisfied
            results.append(
                RankedAnswer(
                    rec_id=doc.rec_id,
                    answer_text=doc.text,
                    lexical_score=self._lexical_score(query_tokens, i),
                    numeric_bonus=bonus,
                    matched_constraints=matched,
                )
            )
        results.sort(key=lambda r: (-r.total, r.rec_id))
        return results[:k]
