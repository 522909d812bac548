"""Evidence-structure document model with versioned, strict JSON I/O."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from ..errors import ValidationError
from ..qa.numeric import NumericConstraint, parse_numeric_phrases

SCHEMA_VERSION = 1
GRADES = ("A", "B", "C", "E", "Ungraded")

_REC_ID = re.compile(r"^ch\d+\.g\d+\.r\d+$")


@dataclass(frozen=True)
class Recommendation:
    rec_id: str
    text: str
    grade: str
    numeric_constraints: tuple[NumericConstraint, ...] = ()

    @classmethod
    def build(cls, rec_id: str, text: str, grade: str) -> "Recommendation":
        """Construct with the numeric-constraint cache populated."""
        return cls(
            rec_id=rec_id,
            text=text,
            grade=grade,
            numeric_constraints=tuple(parse_numeric_phrases(text)),
        )


@dataclass(frozen=True)
class RecommendationGroup:
    group_id: str
    topic: str
    recommendations: tuple[Recommendation, ...]


@dataclass(frozen=True)
class Chapter:
    chapter_id: str
    title: str
    groups: tuple[RecommendationGroup, ...]
    free_text_sections: tuple[str, ...] = ()


@dataclass(frozen=True)
class GuidelineDoc:
    doc_id: str
    title: str
    year: int
    chapters: tuple[Chapter, ...]

    def recommendations(self) -> list[Recommendation]:
        return [
            rec
            for chapter in self.chapters
            for group in chapter.groups
            for rec in group.recommendations
        ]


def validate(doc: GuidelineDoc) -> list[str]:
    """Invariant report; an empty list means the document is valid."""
    violations: list[str] = []
    titles: dict[str, str] = {}
    rec_paths: dict[str, list[str]] = {}
    for chapter in doc.chapters:
        if chapter.title in titles:
            violations.append(
                f"duplicate chapter title {chapter.title!r} "
                f"({titles[chapter.title]} and {chapter.chapter_id})"
            )
        titles[chapter.title] = chapter.chapter_id
        for group in chapter.groups:
            if not group.recommendations:
                violations.append(f"group {group.group_id} has no recommendations")
            for rec in group.recommendations:
                path = f"{chapter.chapter_id}/{group.group_id}"
                rec_paths.setdefault(rec.rec_id, []).append(path)
                if not rec.text:
                    violations.append(f"recommendation {rec.rec_id} has empty text")
                if not _REC_ID.match(rec.rec_id):
                    violations.append(
                        f"recommendation id {rec.rec_id!r} is not chapter.group.ordinal"
                    )
                if rec.grade not in GRADES:
                    violations.append(
                        f"recommendation {rec.rec_id} has unknown grade {rec.grade!r}"
                    )
                recomputed = tuple(parse_numeric_phrases(rec.text))
                if recomputed != rec.numeric_constraints:
                    violations.append(
                        f"recommendation {rec.rec_id} has a stale numeric cache"
                    )
    for rec_id, paths in sorted(rec_paths.items()):
        if len(paths) > 1:
            violations.append(
                f"recommendation id {rec_id} appears in multiple groups: "
                + ", ".join(paths)
            )
    return violations


def _require(d: dict, key: str, path: str):
    if key not in d:
        raise ValidationError(f"missing required field {key!r}", path)
    return d[key]


def _reject_unknown(d: dict, allowed: set[str], path: str, strict: bool) -> None:
    if not strict:
        return
    unknown = sorted(set(d) - allowed)
    if unknown:
        raise ValidationError(f"unknown field {unknown[0]!r}", path)


def to_json(doc: GuidelineDoc) -> bytes:
    payload = {
        "version": SCHEMA_VERSION,
        "doc_id": doc.doc_id,
        "title": doc.title,
        "year": doc.year,
        "chapters": [
            {
                "chapter_id": ch.chapter_id,
                "title": ch.title,
                "groups": [
                    {
                        "group_id": g.group_id,
                        "topic": g.topic,
                        "recommendations": [
                            {
                                "rec_id": r.rec_id,
                                "text": r.text,
                                "grade": r.grade,
                                "numeric_constraints": [
                                    c.to_dict() for c in r.numeric_constraints
                                ],
                            }
                            for r in g.recommendations
                        ],
                    }
                    for g in ch.groups
                ],
                "free_text_sections": list(ch.free_text_sections),
            }
            for ch in doc.chapters
        ],
    }
    return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")


def from_json(data: bytes | str, strict: bool = True) -> GuidelineDoc:
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"not valid JSON: {exc}", "$") from exc
    if not isinstance(payload, dict):
        raise ValidationError("document root must be an object", "$")

    version = _require(payload, "version", "$")
    if version != SCHEMA_VERSION:
        raise ValidationError(
            f"unsupported schema version {version!r}; this reader handles "
            f"version {SCHEMA_VERSION}",
            "$.version",
        )
    _reject_unknown(
        payload, {"version", "doc_id", "title", "year", "chapters"}, "$", strict
    )

    chapters = []
    raw_chapters = _require(payload, "chapters", "$")
    for ci, raw_ch in enumerate(raw_chapters):
        ch_path = f"$.chapters[{ci}]"
        _reject_unknown(
            raw_ch,
            {"chapter_id", "title", "groups", "free_text_sections"},
            ch_path,
            strict,
        )
        groups = []
        for gi, raw_g in enumerate(_require(raw_ch, "groups", ch_path)):
            g_path = f"{ch_path}.groups[{gi}]"
            _reject_unknown(
                raw_g, {"group_id", "topic", "recommendations"}, g_path, strict
            )
            recs = []
            for ri, raw_r in enumerate(_require(raw_g, "recommendations", g_path)):
                r_path = f"{g_path}.recommendations[{ri}]"
                _reject_unknown(
                    raw_r,
                    {"rec_id", "text", "grade", "numeric_constraints"},
                    r_path,
                    strict,
                )
                recs.append(
                    Recommendation(
                        rec_id=_require(raw_r, "rec_id", r_path),
                        text=_require(raw_r, "text", r_path),
                        grade=_require(raw_r, "grade", r_path),
                        numeric_constraints=tuple(
                            NumericConstraint.from_dict(c)
                            for c in raw_r.get("numeric_constraints", ())
                        ),
                    )
                )
            groups.append(
                RecommendationGroup(
                    group_id=_require(raw_g, "group_id", g_path),
                    topic=_require(raw_g, "topic", g_path),
                    recommendations=tuple(recs),
                )
            )
        chapters.append(
            Chapter(
                chapter_id=_require(raw_ch, "chapter_id", ch_path),
                title=_require(raw_ch, "title", ch_path),
                groups=tuple(groups),
                free_text_sections=tuple(raw_ch.get("free_text_sections", ())),
            )
        )
    return GuidelineDoc(
        doc_id=_require(payload, "doc_id", "$"),
        title=_require(payload, "title", "$"),
        year=int(_require(payload, "year", "$")),
        chapters=tuple(chapters),
    )
