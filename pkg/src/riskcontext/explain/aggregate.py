"""Cross-patient aggregation of attributions, mirroring the two summary
views: mean absolute importance ranking and per-patient signed spread."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from .shapley import Attribution


@dataclass(frozen=True)
class FeatureImportance:
    feature: str
    mean_abs_phi: float
    # One (signed phi, feature-present) pair per patient.
    spread: tuple[tuple[float, bool], ...]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "mean_abs_phi": self.mean_abs_phi,
            "spread": [[phi, present] for phi, present in self.spread],
        }


def aggregate_importance(
    attributions: list[Attribution],
    rows: np.ndarray | None = None,
    top_n: int = 20,
) -> list[FeatureImportance]:
    """Rank features by mean |phi| (ties broken by name), keeping each
    patient's signed value and presence flag for the spread view.

    `rows` aligns with `attributions` and supplies presence flags; without
    it every flag is False.
    """
    if not attributions:
        raise InputError("need at least one attribution to aggregate")
    names = attributions[0].feature_names
    if not names:
        raise InputError("attributions must carry feature names")
    for a in attributions:
        if a.feature_names != names:
            raise InputError(
                f"attribution for {a.patient_id!r} uses a different feature ordering"
            )
    phi = np.vstack([a.phi for a in attributions])
    if rows is not None:
        rows = np.asarray(rows)
        if rows.shape != phi.shape:
            raise InputError("rows must align with the attribution matrix")

    mean_abs = np.mean(np.abs(phi), axis=0)
    order = sorted(range(len(names)), key=lambda i: (-mean_abs[i], names[i]))
    ranked = []
    for i in order[:top_n]:
        spread = tuple(
            (float(phi[p, i]), bool(rows[p, i] > 0.5) if rows is not None else False)
            for p in range(len(attributions))
        )
        ranked.append(
            FeatureImportance(feature=names[i], mean_abs_phi=float(mean_abs[i]), spread=spread)
        )
    return ranked
