from .routing import (
    Dimension,
    FREE_TEXT,
    QUESTION_KINDS,
    QuestionAnnotation,
    QuestionKind,
    Relevance,
    Source,
    route,
)
from .answers import (
    AnswerBundle,
    AnswerPart,
    ContextStores,
    PART_KINDS,
    Provenance,
    answer,
    condition_group_stats,
    load_default_templates,
    render,
)

__all__ = [
    "AnswerBundle",
    "AnswerPart",
    "ContextStores",
    "Dimension",
    "FREE_TEXT",
    "PART_KINDS",
    "Provenance",
    "QUESTION_KINDS",
    "QuestionAnnotation",
    "QuestionKind",
    "Relevance",
    "Source",
    "answer",
    "condition_group_stats",
    "load_default_templates",
    "render",
    "route",
]
