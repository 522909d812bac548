"""Tolerant HTML tree builder with a small CSS-selector subset.

Built on the stdlib event parser: mismatched end tags recover by
popping to the nearest open ancestor, stray end tags are ignored, and
void elements never nest. Selectors support `tag`, `.class`,
`tag.class`, and descendant chains ("section.chapter h2").
"""
from __future__ import annotations

import re
from html.parser import HTMLParser

_VOID = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)
# Elements that implicitly close an open element of the same tag.
_SELF_CLOSING_SIBLINGS = frozenset({"p", "li", "td", "th", "tr", "option"})

_WS = re.compile(r"\s+")


class Node:
    __slots__ = ("tag", "attrs", "children", "parent")

    def __init__(self, tag: str, attrs: dict[str, str] | None = None, parent=None):
        self.tag = tag
        self.attrs = attrs or {}
        self.children: list[Node | str] = []
        self.parent = parent

    @property
    def classes(self) -> set[str]:
        return set(self.attrs.get("class", "").split())

    def text(self) -> str:
        """All descendant text, whitespace runs collapsed, trimmed."""
        pieces: list[str] = []

        def walk(node: Node) -> None:
            for child in node.children:
                if isinstance(child, str):
                    pieces.append(child)
                else:
                    walk(child)

        walk(self)
        return _WS.sub(" ", "".join(pieces)).strip()

    def iter_elements(self):
        for child in self.children:
            if isinstance(child, Node):
                yield child
                yield from child.iter_elements()

    def select(self, selector: str) -> list["Node"]:
        """Descendants matching a simple selector, in document order."""
        parts = [_parse_simple(p) for p in selector.split()]
        matches: list[Node] = []
        for node in self.iter_elements():
            if _matches(node, parts[-1]) and _ancestors_match(node, parts[:-1], self):
                matches.append(node)
        return matches

    def select_one(self, selector: str) -> "Node | None":
        found = self.select(selector)
        return found[0] if found else None

    def detach(self) -> None:
        if self.parent is not None:
            self.parent.children = [c for c in self.parent.children if c is not self]
            self.parent = None

    def __repr__(self) -> str:
        return f"<{self.tag} {self.attrs}>"


def _parse_simple(part: str) -> tuple[str | None, set[str]]:
    chunks = part.split(".")
    tag = chunks[0] or None
    return tag, {c for c in chunks[1:] if c}


def _matches(node: Node, simple: tuple[str | None, set[str]]) -> bool:
    tag, classes = simple
    if tag is not None and node.tag != tag:
        return False
    return classes <= node.classes


def _ancestors_match(node: Node, parts, root: Node) -> bool:
    current = node.parent
    for simple in reversed(parts):
        while current is not None and current is not root and not _matches(current, simple):
            current = current.parent
        if current is None or current is root:
            return False
        current = current.parent
    return True


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = Node("#document")
        self.stack = [self.root]

    def handle_starttag(self, tag, attrs):
        if tag in _SELF_CLOSING_SIBLINGS and self.stack[-1].tag == tag:
            self.stack.pop()
        node = Node(tag, dict(attrs), parent=self.stack[-1])
        self.stack[-1].children.append(node)
        if tag not in _VOID:
            self.stack.append(node)

    def handle_startendtag(self, tag, attrs):
        node = Node(tag, dict(attrs), parent=self.stack[-1])
        self.stack[-1].children.append(node)

    def handle_endtag(self, tag):
        for i in range(len(self.stack) - 1, 0, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                return
        # Stray end tag: recovered by ignoring it.

    def handle_data(self, data):
        if data:
            self.stack[-1].children.append(data)


def parse_html_tree(html: str | bytes) -> Node:
    if isinstance(html, bytes):
        html = html.decode("utf-8")
    builder = _TreeBuilder()
    builder.feed(html)
    builder.close()
    return builder.root
