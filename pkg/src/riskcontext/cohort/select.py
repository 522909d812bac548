"""Cohort inclusion rules and outcome labeling.

A patient enters the cohort when, at the date of their first T2DM-coded
visit (the index date), they have enough T2DM visits, a full run-in
enrollment period, more T2DM than T1D visits, an in-range age, and no
CKD code on or before the index date. Labels look only at the
(index, index + horizon] window.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .types import CodeMatcher, CohortConfig, PatientRecord, epoch_year_of

# Exclusion reasons, in the order criteria are checked; a patient is
# counted once, under the first criterion it fails.
REASON_INSUFFICIENT_VISITS = "insufficient-visits"
REASON_ENROLLMENT_GAP = "enrollment-gap"
REASON_T1D_DOMINANT = "t1d-dominant"
REASON_AGE_OUT_OF_RANGE = "age-out-of-range"
REASON_PREVALENT_CKD = "prevalent-ckd"

EXCLUSION_REASONS = (
    REASON_INSUFFICIENT_VISITS,
    REASON_ENROLLMENT_GAP,
    REASON_T1D_DOMINANT,
    REASON_AGE_OUT_OF_RANGE,
    REASON_PREVALENT_CKD,
)


@dataclass
class Cohort:
    """Selected (patient, index_date) pairs plus per-criterion audit counts."""

    members: list[tuple[PatientRecord, int]]
    exclusions: dict[str, int] = field(
        default_factory=lambda: {r: 0 for r in EXCLUSION_REASONS}
    )

    def __len__(self) -> int:
        return len(self.members)

    def patient_ids(self) -> list[str]:
        return [p.patient_id for p, _ in self.members]


def age_at(patient: PatientRecord, day: int) -> int:
    """Age in the calendar year containing `day` (year precision)."""
    return epoch_year_of(day) - patient.birth_year


def first_exclusion_reason(
    patient: PatientRecord, config: CohortConfig
) -> tuple[str | None, int | None]:
    """Return (reason, index_date); reason None means included."""
    t2dm = CodeMatcher(config.t2dm_codes)
    t1d = CodeMatcher(config.t1d_codes)
    ckd = CodeMatcher(config.ckd_codes)

    t2dm_visits = [v for v in patient.visits if t2dm.any_in(v.codes)]
    if len(t2dm_visits) < config.min_t2dm_visits:
        return REASON_INSUFFICIENT_VISITS, None
    index_date = t2dm_visits[0].date

    if patient.enrollment_start > index_date - config.pre_enrollment_days:
        return REASON_ENROLLMENT_GAP, index_date

    t1d_count = sum(1 for v in patient.visits if t1d.any_in(v.codes))
    if len(t2dm_visits) <= t1d_count:
        return REASON_T1D_DOMINANT, index_date

    age = age_at(patient, index_date)
    if not (config.age_min <= age <= config.age_max):
        return REASON_AGE_OUT_OF_RANGE, index_date

    # Prevalent cases have no valid onset label, so they leave the cohort.
    if any(ckd.any_in(v.codes) for v in patient.visits if v.date <= index_date):
        return REASON_PREVALENT_CKD, index_date

    return None, index_date


def select_cohort(patients: list[PatientRecord], config: CohortConfig) -> Cohort:
    cohort = Cohort(members=[])
    for patient in patients:
        reason, index_date = first_exclusion_reason(patient, config)
        if reason is None:
            cohort.members.append((patient, index_date))
        else:
            cohort.exclusions[reason] += 1
    return cohort


def label_outcome(patient: PatientRecord, index_date: int, config: CohortConfig) -> int:
    """1 iff a CKD code falls strictly after the index date but within horizon."""
    ckd = CodeMatcher(config.ckd_codes)
    horizon_end = index_date + config.horizon_days
    for visit in patient.visits:
        if index_date < visit.date <= horizon_end and ckd.any_in(visit.codes):
            return 1
    return 0
