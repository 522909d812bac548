"""Feature-matrix construction from a selected cohort."""
from __future__ import annotations

import logging

import numpy as np

from ..errors import MappingError
from .select import Cohort, age_at, label_outcome
from .types import (
    AGE_GROUPS,
    SEX_FEMALE,
    CcsMap,
    CohortConfig,
    FeatureMatrix,
    age_group,
)

log = logging.getLogger(__name__)


def ccs_feature_name(ccs: int) -> str:
    # Zero padding keeps lexicographic order equal to numeric order.
    return f"CCS_{ccs:03d}"


def build_features(
    cohort: Cohort,
    ccs_map: CcsMap,
    config: CohortConfig,
    *,
    ignore_codes: frozenset[str] = frozenset(),
    binarize: bool = True,
    min_prevalence: float = 0.005,
) -> FeatureMatrix:
    """Temporally aggregated CCS indicators plus age-group and sex one-hots.

    Indicators see only visits at or before the index date; codes missing
    from the crosswalk raise unless listed in `ignore_codes`. Indicators
    below `min_prevalence` are dropped and logged.
    """
    per_patient_counts: list[dict[int, int]] = []
    for patient, index_date in cohort.members:
        counts: dict[int, int] = {}
        for visit in patient.visits:
            if visit.date > index_date:
                continue
            for code in visit.codes:
                if code in ignore_codes:
                    continue
                hit = ccs_map.try_lookup(code)
                if hit is None:
                    raise MappingError(
                        f"diagnosis code {code!r} (patient {patient.patient_id}) "
                        "has no CCS mapping and is not in the ignore list"
                    )
                ccs, _ = hit
                counts[ccs] = counts.get(ccs, 0) + 1
        per_patient_counts.append(counts)

    all_ccs = sorted({ccs for counts in per_patient_counts for ccs in counts})
    ccs_names = [ccs_feature_name(c) for c in all_ccs]
    n = len(cohort.members)

    indicator = np.zeros((n, len(all_ccs)), dtype=np.float64)
    col_of = {c: i for i, c in enumerate(all_ccs)}
    for row, counts in enumerate(per_patient_counts):
        for ccs, count in counts.items():
            indicator[row, col_of[ccs]] = 1.0 if binarize else float(count)

    dropped: list[str] = []
    if min_prevalence > 0 and n > 0:
        prevalence = (indicator > 0).mean(axis=0)
        keep = prevalence >= min_prevalence
        dropped = [name for name, k in zip(ccs_names, keep) if not k]
        if dropped:
            log.info("dropping %d sparse CCS indicators: %s", len(dropped), dropped)
        indicator = indicator[:, keep]
        ccs_names = [name for name, k in zip(ccs_names, keep) if k]

    demo = np.zeros((n, len(AGE_GROUPS) + 1), dtype=np.float64)
    for row, (patient, index_date) in enumerate(cohort.members):
        group = age_group(age_at(patient, index_date))
        demo[row, AGE_GROUPS.index(group)] = 1.0
        if patient.sex == "F":
            demo[row, -1] = 1.0

    labels = np.array(
        [
            label_outcome(patient, index_date, config)
            for patient, index_date in cohort.members
        ],
        dtype=np.float64,
    )

    ccs_labels = {
        ccs_feature_name(ccs): group
        for ccs, group in ccs_map.ccs_to_group.items()
        if ccs_feature_name(ccs) in ccs_names
    }

    return FeatureMatrix(
        feature_names=ccs_names + list(AGE_GROUPS) + [SEX_FEMALE],
        X=np.hstack([indicator, demo]),
        y=labels,
        index_dates=np.array([d for _, d in cohort.members], dtype=np.int64),
        patient_ids=[p.patient_id for p, _ in cohort.members],
        ccs_labels=ccs_labels,
        dropped_features=dropped,
    )
