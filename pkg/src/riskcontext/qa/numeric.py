"""Numeric-range phrase grammar and interval containment.

Recognizes comparator phrases ("greater than", "at least", ">=", ...)
and "between X and Y", each with an optional decimal number and unit,
plus bracketed restatements of the same bound in an alternate unit.
"""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass

log = logging.getLogger(__name__)

UNITS = ("%", "mg/dL", "mmol/mol", "mmol/L")

# Words that are never the quantity a number talks about.
_QUANTITY_SKIP = frozenset(
    """a an and are be been being for if in is it its levels level of or than
    that the their then this to target targets value values very was were
    when with within equal greater less least most above below between""".split()
)

_NUM = r"\d+(?:\.\d+)?"
_UNIT = r"%|mg/dl|mmol/mol|mmol/l"
_COMPARATORS = [
    ("greater than or equal to", "lower", False),
    ("less than or equal to", "upper", False),
    ("greater than", "lower", True),
    ("less than", "upper", True),
    ("at least", "lower", False),
    ("at most", "upper", False),
    ("above", "lower", True),
    ("below", "upper", True),
    (">=", "lower", False),
    ("<=", "upper", False),
    ("≥", "lower", False),
    ("≤", "upper", False),
    (">", "lower", True),
    ("<", "upper", True),
]
_WORD_COMPS = "|".join(
    re.escape(c) for c, _, _ in _COMPARATORS if c[0].isalpha()
)
_SYMBOL_COMPS = "|".join(
    re.escape(c) for c, _, _ in _COMPARATORS if not c[0].isalpha()
)
_COMP_PATTERN = rf"(?<![A-Za-z])(?:{_WORD_COMPS})\b|{_SYMBOL_COMPS}"
_PHRASE = re.compile(
    rf"(?:\bbetween\s+(?P<lo>{_NUM})(?:\s*(?P<lo_unit>{_UNIT}))?\s+and\s+"
    rf"(?P<hi>{_NUM})(?:\s*(?P<hi_unit>{_UNIT}))?)"
    rf"|(?:(?P<comp>{_COMP_PATTERN})\s*(?P<num>{_NUM})(?:\s*(?P<unit>{_UNIT}))?)",
    re.IGNORECASE,
)
_RESTATEMENT = re.compile(
    rf"\s*[\[(]\s*(?P<num>{_NUM})\s*(?P<unit>{_UNIT})\s*[\])]", re.IGNORECASE
)
_WORD = re.compile(r"[A-Za-z0-9%]+(?:/[A-Za-z0-9]+)?")

_CANONICAL_UNITS = {u.lower(): u for u in UNITS}


@dataclass(frozen=True)
class Interval:
    lower: float  # -inf allowed
    upper: float  # +inf allowed
    lower_open: bool = False
    upper_open: bool = False

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"empty interval ({self.lower}, {self.upper})")
        if math.isinf(self.lower) and math.isinf(self.upper):
            raise ValueError("at least one bound must be finite")

    def contains_interval(self, other: "Interval") -> bool:
        """True iff `other` is a subset of this interval."""
        if other.lower < self.lower:
            return False
        if other.lower == self.lower and self.lower_open and not other.lower_open:
            return False
        if other.upper > self.upper:
            return False
        if other.upper == self.upper and self.upper_open and not other.upper_open:
            return False
        return True

    def to_dict(self) -> dict:
        return {
            "lower": None if math.isinf(self.lower) else self.lower,
            "upper": None if math.isinf(self.upper) else self.upper,
            "lower_open": self.lower_open,
            "upper_open": self.upper_open,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Interval":
        return cls(
            lower=-math.inf if d["lower"] is None else float(d["lower"]),
            upper=math.inf if d["upper"] is None else float(d["upper"]),
            lower_open=bool(d["lower_open"]),
            upper_open=bool(d["upper_open"]),
        )


@dataclass(frozen=True)
class NumericConstraint:
    quantity: str
    interval: Interval
    unit: str | None = None
    source_span: tuple[int, int] = (0, 0)
    # Bracketed restatements: the same bound expressed in other units.
    alternates: tuple[tuple[Interval, str], ...] = ()

    def forms(self) -> list[tuple[Interval, str | None]]:
        return [(self.interval, self.unit)] + [(i, u) for i, u in self.alternates]

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "interval": self.interval.to_dict(),
            "unit": self.unit,
            "source_span": list(self.source_span),
            "alternates": [
                {"interval": i.to_dict(), "unit": u} for i, u in self.alternates
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NumericConstraint":
        return cls(
            quantity=d["quantity"],
            interval=Interval.from_dict(d["interval"]),
            unit=d.get("unit"),
            source_span=tuple(d.get("source_span", (0, 0))),
            alternates=tuple(
                (Interval.from_dict(a["interval"]), a["unit"])
                for a in d.get("alternates", ())
            ),
        )


DEFAULT_ALIASES = ({"a1c", "hba1c"}, {"glucose", "blood glucose"})


def _normalize_token(token: str) -> str:
    return re.sub(r"[^a-z0-9]", "", token.lower())


def _nearest_quantity(text: str, before: int, window: int = 5) -> str:
    words = [m.group(0) for m in _WORD.finditer(text, 0, before)]
    for token in reversed(words[-window:]):
        norm = _normalize_token(token)
        if not norm or norm in _QUANTITY_SKIP:
            continue
        if norm.isdigit() or token.lower() in _CANONICAL_UNITS:
            continue
        if any(ch.isalpha() for ch in norm):
            return norm
    return ""


def _canonical_unit(raw: str | None) -> str | None:
    if raw is None:
        return None
    return _CANONICAL_UNITS[raw.lower()]


def _bounded(side: str, value: float, is_open: bool) -> Interval:
    if side == "lower":
        return Interval(lower=value, upper=math.inf, lower_open=is_open)
    return Interval(lower=-math.inf, upper=value, upper_open=is_open)


def parse_numeric_phrases(text: str) -> list[NumericConstraint]:
    """Extract every numeric-range constraint from free text.

    Unparseable numeric fragments are skipped (and logged), never fatal.
    """
    comparator_of = {c.lower(): (side, is_open) for c, side, is_open in _COMPARATORS}
    out: list[NumericConstraint] = []
    for m in _PHRASE.finditer(text):
        try:
            quantity = _nearest_quantity(text, m.start())
            end = m.end()
            if m.group("comp") is not None:
                side, is_open = comparator_of[m.group("comp").lower()]
                value = float(m.group("num"))
                interval = _bounded(side, value, is_open)
                unit = _canonical_unit(m.group("unit"))
                alternates = []
                rest = _RESTATEMENT.match(text, end)
                while rest is not None:
                    alternates.append(
                        (
                            _bounded(side, float(rest.group("num")), is_open),
                            _canonical_unit(rest.group("unit")),
                        )
                    )
                    end = rest.end()
                    rest = _RESTATEMENT.match(text, end)
                out.append(
                    NumericConstraint(
                        quantity=quantity,
                        interval=interval,
                        unit=unit,
                        source_span=(m.start(), end),
                        alternates=tuple(alternates),
                    )
                )
            else:
                lo, hi = float(m.group("lo")), float(m.group("hi"))
                unit = _canonical_unit(m.group("lo_unit") or m.group("hi_unit"))
                out.append(
                    NumericConstraint(
                        quantity=quantity,
                        interval=Interval(lower=lo, upper=hi),
                        unit=unit,
                        source_span=(m.start(), end),
                    )
                )
        except ValueError as exc:
            log.debug("skipping unparseable numeric phrase %r: %s", m.group(0), exc)
    return out


def render_constraint(c: NumericConstraint) -> str:
    """Canonical text for a constraint; parsing it back yields the same
    quantity, interval, and unit."""

    def fmt(v: float) -> str:
        return str(int(v)) if float(v).is_integer() else repr(v)

    unit = f" {c.unit}" if c.unit else ""
    iv = c.interval
    if not math.isinf(iv.lower) and not math.isinf(iv.upper):
        return f"{c.quantity} between {fmt(iv.lower)}{unit} and {fmt(iv.upper)}{unit}"
    if not math.isinf(iv.lower):
        phrase = "greater than" if iv.lower_open else "greater than or equal to"
        return f"{c.quantity} {phrase} {fmt(iv.lower)}{unit}"
    phrase = "less than" if iv.upper_open else "less than or equal to"
    return f"{c.quantity} {phrase} {fmt(iv.upper)}{unit}"


def quantities_match(
    q: str, a: str, aliases: tuple[set[str], ...] = DEFAULT_ALIASES
) -> bool:
    qn, an = _normalize_token(q), _normalize_token(a)
    if qn == an:
        return True
    for group in aliases:
        normalized = {_normalize_token(g) for g in group}
        if qn in normalized and an in normalized:
            return True
    return False


def constraint_satisfied(
    q: NumericConstraint,
    a: NumericConstraint,
    aliases: tuple[set[str], ...] = DEFAULT_ALIASES,
) -> bool:
    """True iff the question's range lies within the answer's range for a
    matching quantity; units must agree when both sides state one."""
    if not quantities_match(q.quantity, a.quantity, aliases):
        return False
    for q_interval, q_unit in q.forms():
        for a_interval, a_unit in a.forms():
            if q_unit is not None and a_unit is not None and q_unit != a_unit:
                continue
            if a_interval.contains_interval(q_interval):
                return True
    return False
