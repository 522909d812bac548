"""Baseline description summaries for a prototype set.

Demographic columns are reported raw; diagnosis indicators roll up to
their Level-1 condition groups, with counts of patients carrying at
least one indicator in the group.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..cohort.types import AGE_GROUPS, SEX_FEMALE

HIGH_PREVALENCE_CUTOFF = 0.5


@dataclass(frozen=True)
class SummaryRow:
    label: str
    count: int
    percentage: float  # 100 * count / n, one decimal
    high_prevalence: bool

    def formatted(self) -> str:
        return f"{self.count} ({self.percentage})"


@dataclass(frozen=True)
class PrototypeSummary:
    n: int
    rows: tuple[SummaryRow, ...]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "rows": [
                {
                    "label": r.label,
                    "count": r.count,
                    "percentage": r.percentage,
                    "high_prevalence": r.high_prevalence,
                }
                for r in self.rows
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PrototypeSummary":
        return cls(
            n=int(d["n"]),
            rows=tuple(
                SummaryRow(
                    label=r["label"],
                    count=int(r["count"]),
                    percentage=float(r["percentage"]),
                    high_prevalence=bool(r["high_prevalence"]),
                )
                for r in d["rows"]
            ),
        )

    def render_text(self) -> str:
        """Aligned two-column table: Feature / Count (%)."""
        labels = ["Feature"] + [r.label for r in self.rows]
        width = max(len(s) for s in labels)
        lines = [f"{'Feature':<{width}}  Count (%)", f"{'n':<{width}}  {self.n}"]
        for r in self.rows:
            lines.append(f"{r.label:<{width}}  {r.formatted()}")
        return "\n".join(lines) + "\n"


def _row(label: str, count: int, n: int, cutoff: float) -> SummaryRow:
    percentage = round(100.0 * count / n, 1)
    return SummaryRow(
        label=label,
        count=count,
        percentage=percentage,
        high_prevalence=count / n >= cutoff,
    )


def summarize_prototypes(
    rows: np.ndarray,
    feature_names: list[str],
    ccs_labels: dict[str, str],
    cutoff: float = HIGH_PREVALENCE_CUTOFF,
) -> PrototypeSummary:
    """Tableone-style counts for a set of prototype feature rows.

    `ccs_labels` maps indicator names to Level-1 group labels; indicators
    without a label fall back to their own name.
    """
    rows = np.asarray(rows)
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise ValueError("need a non-empty 2-D matrix of prototype rows")
    if rows.shape[1] != len(feature_names):
        raise ValueError("row width must match feature_names")
    n = rows.shape[0]
    col = {name: i for i, name in enumerate(feature_names)}

    out: list[SummaryRow] = []
    for name in AGE_GROUPS:
        if name in col:
            out.append(_row(name, int(np.sum(rows[:, col[name]] > 0.5)), n, cutoff))
    if SEX_FEMALE in col:
        out.append(
            _row("SEX - FEMALE", int(np.sum(rows[:, col[SEX_FEMALE]] > 0.5)), n, cutoff)
        )

    group_cols: dict[str, list[int]] = {}
    demographic = set(AGE_GROUPS) | {SEX_FEMALE}
    for name in feature_names:
        if name in demographic:
            continue
        group_cols.setdefault(ccs_labels.get(name, name), []).append(col[name])
    for group in sorted(group_cols):
        any_hit = np.any(rows[:, group_cols[group]] > 0.5, axis=1)
        out.append(_row(group, int(np.sum(any_hit)), n, cutoff))

    return PrototypeSummary(n=n, rows=tuple(out))
