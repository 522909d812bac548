"""Selector-driven extraction of the evidence structure from guideline HTML."""
from __future__ import annotations

import json
from dataclasses import dataclass

from ..errors import StructureError
from .htmltree import parse_html_tree
from .model import Chapter, GuidelineDoc, Recommendation, RecommendationGroup


@dataclass(frozen=True)
class ParseConfig:
    """Structural markers mapping HTML to evidence-structure roles."""

    doc_id: str = "fixture-cpg"
    year: int = 2021
    doc_title_selector: str = "h1.doc-title"
    chapter_selector: str = "section.chapter"
    chapter_title_selector: str = "h2.chapter-title"
    group_selector: str = "div.rec-group"
    group_topic_selector: str = "h3.group-topic"
    recommendation_selector: str = "div.recommendation"
    grade_selector: str = "span.grade"
    free_text_selector: str = "div.free-text"
    grade_vocabulary: tuple[str, ...] = ("A", "B", "C", "E")

    @classmethod
    def from_dict(cls, d: dict) -> "ParseConfig":
        kwargs = dict(d)
        if "grade_vocabulary" in kwargs:
            kwargs["grade_vocabulary"] = tuple(kwargs["grade_vocabulary"])
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "ParseConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def parse_html_with_report(
    html: bytes | str, config: ParseConfig | None = None
) -> tuple[GuidelineDoc, list[str]]:
    """Parse guideline HTML; returns the document plus skipped-node notes."""
    config = config or ParseConfig()
    tree = parse_html_tree(html)
    skipped: list[str] = []

    title_node = tree.select_one(config.doc_title_selector)
    doc_title = title_node.text() if title_node else "Untitled guideline"

    chapter_nodes = tree.select(config.chapter_selector)
    if not chapter_nodes:
        raise StructureError(
            f"no chapters found with selector {config.chapter_selector!r}"
        )

    chapters: list[Chapter] = []
    total_recs = 0
    for ci, ch_node in enumerate(chapter_nodes, start=1):
        chapter_id = f"ch{ci}"
        title_node = ch_node.select_one(config.chapter_title_selector)
        if title_node is None:
            skipped.append(f"{chapter_id}: no chapter title node; using placeholder")
            ch_title = f"Chapter {ci}"
        else:
            ch_title = title_node.text()

        groups: list[RecommendationGroup] = []
        for gi, g_node in enumerate(ch_node.select(config.group_selector), start=1):
            group_id = f"{chapter_id}.g{gi}"
            topic_node = g_node.select_one(config.group_topic_selector)
            topic = topic_node.text() if topic_node else f"Group {gi}"

            recs: list[Recommendation] = []
            for ri, r_node in enumerate(
                g_node.select(config.recommendation_selector), start=1
            ):
                rec_id = f"{group_id}.r{ri}"
                grade = "Ungraded"
                markers = r_node.select(config.grade_selector)
                if markers:
                    candidate = markers[-1].text()
                    if candidate in config.grade_vocabulary:
                        grade = candidate
                        markers[-1].detach()
                    else:
                        skipped.append(
                            f"{rec_id}: grade marker {candidate!r} outside vocabulary"
                        )
                text = r_node.text()
                if not text:
                    skipped.append(f"{rec_id}: empty recommendation text")
                    continue
                recs.append(Recommendation.build(rec_id=rec_id, text=text, grade=grade))

            if not recs:
                skipped.append(f"{group_id}: group has no recommendation blocks")
                continue
            total_recs += len(recs)
            groups.append(
                RecommendationGroup(
                    group_id=group_id, topic=topic, recommendations=tuple(recs)
                )
            )

        free_text = tuple(
            node.text() for node in ch_node.select(config.free_text_selector)
        )
        chapters.append(
            Chapter(
                chapter_id=chapter_id,
                title=ch_title,
                groups=tuple(groups),
                free_text_sections=free_text,
            )
        )

    titles = [c.title for c in chapters]
    if len(set(titles)) != len(titles):
        dupes = sorted({t for t in titles if titles.count(t) > 1})
        raise StructureError(f"duplicate chapter titles: {dupes}")
    if total_recs == 0:
        raise StructureError("document contains no recommendation blocks")

    doc = GuidelineDoc(
        doc_id=config.doc_id,
        title=doc_title,
        year=config.year,
        chapters=tuple(chapters),
    )
    return doc, skipped


def parse_html(html: bytes | str, config: ParseConfig | None = None) -> GuidelineDoc:
    doc, _ = parse_html_with_report(html, config)
    return doc
