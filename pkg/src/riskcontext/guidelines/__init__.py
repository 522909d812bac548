from .model import (
    Chapter,
    GRADES,
    GuidelineDoc,
    Recommendation,
    RecommendationGroup,
    SCHEMA_VERSION,
    from_json,
    to_json,
    validate,
)
from .parser import ParseConfig, parse_html, parse_html_with_report
from .htmltree import Node, parse_html_tree

__all__ = [
    "Chapter",
    "GRADES",
    "GuidelineDoc",
    "Node",
    "ParseConfig",
    "Recommendation",
    "RecommendationGroup",
    "SCHEMA_VERSION",
    "from_json",
    "parse_html",
    "parse_html_tree",
    "parse_html_with_report",
    "to_json",
    "validate",
]
