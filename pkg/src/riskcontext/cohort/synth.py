"""Synthetic claims generator with a planted logistic risk function.

Generated exposures drive CKD onset through a known logistic model, so a
learner can recover signal; a configurable fraction of patients violate
each inclusion criterion so cohort filtering has something to do.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError
from .types import CcsMap, PatientRecord, Visit, epoch_year_of

# Canonical Level-1 condition groups used by the shipped crosswalks.
LEVEL1_GROUPS = (
    "Infectious and parasitic diseases",
    "Neoplasms",
    "Endocrine; nutritional; and metabolic diseases and immunity disorders",
    "Diseases of the blood and blood-forming organs",
    "Mental Illness",
    "Mood disorders",
    "Diseases of the nervous system and sense organs",
    "Diseases of the circulatory system",
    "Diseases of the respiratory system",
    "Diseases of the digestive system",
    "Diseases of the genitourinary system",
    "Complications of pregnancy; childbirth; and the puerperium",
    "Diseases of the skin and subcutaneous tissue",
    "Diseases of the musculoskeletal system and connective tissue",
    "Congenital anomalies",
    "Injury and poisoning",
    "Symptoms; signs; and ill-defined conditions and factors influencing health status",
    "Residual codes; unclassified",
)

ENDOCRINE = LEVEL1_GROUPS[2]
CIRCULATORY = LEVEL1_GROUPS[7]
GENITOURINARY = LEVEL1_GROUPS[10]
SYMPTOMS = LEVEL1_GROUPS[16]

# Letters that never collide with the E10/E11 diabetes or N18 kidney codes.
_CODE_LETTERS = "ABCDFGHJKLM"

T2DM_ICD10 = "E11.9"
T2DM_ICD9 = "250.00"
T1D_ICD10 = "E10.9"
T1D_ICD9 = "250.01"
CKD_ICD10 = "N18.3"
CKD_ICD9 = "585.9"
FILLER_CODE = "R51"  # headache; keeps visits non-empty for exposure-free patients


def exposure_code(j: int) -> str:
    """ICD-10-style code for synthetic exposure feature j."""
    letter = _CODE_LETTERS[j // 80]
    return f"{letter}{10 + j % 80}"


def synthetic_ccs_map(n_ccs_features: int) -> CcsMap:
    """Crosswalk covering the generator's code universe.

    Exposure feature j maps to CCS 900+j with Level-1 groups cycling
    through the canonical list; disease-defining codes map to their
    conventional CCS concepts.
    """
    entries: dict[str, tuple[int, str]] = {
        "E11.*": (49, ENDOCRINE),
        "250.*0": (49, ENDOCRINE),
        "250.*2": (50, ENDOCRINE),
        "362.0": (50, ENDOCRINE),
        "E10.*": (49, ENDOCRINE),
        "250.*1": (49, ENDOCRINE),
        "250.*3": (50, ENDOCRINE),
        "N18.*": (158, GENITOURINARY),
        "585.*": (158, GENITOURINARY),
        "403.*": (99, CIRCULATORY),
        FILLER_CODE: (251, SYMPTOMS),
    }
    for j in range(n_ccs_features):
        entries[exposure_code(j)] = (900 + j, LEVEL1_GROUPS[j % len(LEVEL1_GROUPS)])
    return CcsMap(entries)


@dataclass(frozen=True)
class SynthConfig:
    """Knobs for the generator; defaults give a mildly imbalanced cohort."""

    n_patients: int
    n_ccs_features: int
    seed: int
    planted_weights: tuple[float, ...]
    base_rate: float = 0.2
    # Independent chance, per criterion, that a patient is built to fail it.
    violation_rate: float = 0.04
    # Extra logit terms of the form weight * xor(exposure_i, exposure_j).
    xor_pairs: tuple[tuple[int, int, float], ...] = ()
    icd9_fraction: float = 0.3
    horizon_days: int = 360
    pre_enrollment_days: int = 365
    late_onset_rate: float = 0.1

    def __post_init__(self):
        if self.n_patients <= 0:
            raise ConfigurationError("n_patients must be positive")
        if self.n_ccs_features <= 0:
            raise ConfigurationError("n_ccs_features must be positive")
        if len(self.planted_weights) != self.n_ccs_features:
            raise ConfigurationError(
                f"planted_weights has length {len(self.planted_weights)}, "
                f"expected {self.n_ccs_features}"
            )
        if not (0.0 < self.base_rate < 1.0):
            raise ConfigurationError("base_rate must be in (0, 1)")
        for i, j, _ in self.xor_pairs:
            if not (0 <= i < self.n_ccs_features and 0 <= j < self.n_ccs_features):
                raise ConfigurationError(f"xor pair ({i}, {j}) out of range")

    @classmethod
    def from_dict(cls, d: dict) -> "SynthConfig":
        kwargs = dict(d)
        kwargs["planted_weights"] = tuple(kwargs["planted_weights"])
        if "xor_pairs" in kwargs:
            kwargs["xor_pairs"] = tuple(tuple(p) for p in kwargs["xor_pairs"])
        return cls(**kwargs)


def default_planted_weights(n_ccs_features: int, seed: int, n_active: int = 12) -> tuple[float, ...]:
    """Sparse signed weight pattern giving a comfortably learnable signal."""
    rng = np.random.default_rng(seed)
    weights = np.zeros(n_ccs_features)
    active = rng.choice(n_ccs_features, min(n_active, n_ccs_features), replace=False)
    weights[active] = rng.uniform(1.2, 2.2, len(active)) * rng.choice([-1.0, 1.0], len(active))
    return tuple(float(w) for w in weights)


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + np.exp(-z))
    e = np.exp(z)
    return e / (1.0 + e)


def generate_claims(config: SynthConfig) -> list[PatientRecord]:
    """Deterministic synthetic patient records for a given seed."""
    rng = np.random.default_rng(config.seed)
    d = config.n_ccs_features
    weights = np.asarray(config.planted_weights, dtype=np.float64)

    exposure_probs = rng.uniform(0.10, 0.45, size=d)
    bias = float(np.log(config.base_rate / (1.0 - config.base_rate)))

    xor_terms = []
    for i, j, wt in config.xor_pairs:
        pi, pj = exposure_probs[i], exposure_probs[j]
        xor_terms.append((i, j, wt, pi * (1 - pj) + pj * (1 - pi)))

    patients: list[PatientRecord] = []
    for idx in range(config.n_patients):
        patient_id = f"P{idx:06d}"
        sex = "F" if rng.random() < 0.5 else "M"

        violate_age = rng.random() < config.violation_rate
        violate_visits = rng.random() < config.violation_rate
        violate_enrollment = rng.random() < config.violation_rate
        violate_t1d = rng.random() < config.violation_rate
        violate_prevalent = rng.random() < config.violation_rate

        index_date = int(rng.integers(400, 1500))
        if violate_age:
            age = int(rng.integers(66, 90)) if rng.random() < 0.5 else int(rng.integers(5, 19))
        else:
            age = int(rng.integers(19, 65))
        birth_year = epoch_year_of(index_date) - age

        if violate_enrollment:
            enrollment_start = index_date - int(rng.integers(0, config.pre_enrollment_days))
        else:
            enrollment_start = (
                index_date - config.pre_enrollment_days - int(rng.integers(0, 200))
            )
        enrollment_start = max(0, enrollment_start)
        enrollment_end = index_date + config.horizon_days + 365

        use_icd9 = rng.random() < config.icd9_fraction
        t2dm_code = T2DM_ICD9 if use_icd9 else T2DM_ICD10
        t1d_code = T1D_ICD9 if use_icd9 else T1D_ICD10
        ckd_code = CKD_ICD9 if use_icd9 else CKD_ICD10

        exposures = (rng.random(d) < exposure_probs).astype(np.float64)
        logit = bias + float(weights @ (exposures - exposure_probs))
        for i, j, wt, mean_xor in xor_terms:
            xor = float(exposures[i] != exposures[j])
            logit += wt * (xor - mean_xor)
        onset = rng.random() < _sigmoid(logit)

        visits: dict[int, list[str]] = {}

        def add(day: int, code: str) -> None:
            day = int(min(max(day, enrollment_start), enrollment_end))
            visits.setdefault(day, [])
            if code not in visits[day]:
                visits[day].append(code)

        # Spread every active exposure over pre-index visits so the planted
        # signal is recoverable from the feature window.
        active = [exposure_code(j) for j in range(d) if exposures[j] > 0]
        pre_lo = max(enrollment_start, index_date - 300)
        n_pre = int(rng.integers(2, 6))
        pre_days = sorted(rng.integers(pre_lo, index_date + 1, size=n_pre).tolist())
        if not active:
            add(pre_days[0], FILLER_CODE)
        for k, code in enumerate(active):
            add(pre_days[k % len(pre_days)], code)
        for _ in range(int(rng.integers(0, 3))):
            if active:
                add(int(rng.integers(pre_lo, index_date + 1)), active[int(rng.integers(len(active)))])

        # T2DM visits: the first one defines the index date.
        add(index_date, t2dm_code)
        if not violate_visits:
            for _ in range(1 + int(rng.integers(0, 2))):
                add(index_date + int(rng.integers(10, 150)), t2dm_code)

        if violate_t1d:
            t2dm_count = sum(1 for codes in visits.values() if t2dm_code in codes)
            for k in range(t2dm_count):
                add(index_date + 151 + 7 * k, t1d_code)

        if violate_prevalent:
            add(index_date - int(rng.integers(0, 100)), ckd_code)

        if onset:
            add(index_date + int(rng.integers(1, config.horizon_days + 1)), ckd_code)
        elif rng.random() < config.late_onset_rate:
            add(index_date + config.horizon_days + int(rng.integers(30, 200)), ckd_code)

        # Post-index noise that must stay out of the feature window.
        for _ in range(int(rng.integers(0, 3))):
            code = active[int(rng.integers(len(active)))] if active else FILLER_CODE
            add(index_date + int(rng.integers(1, config.horizon_days)), code)

        record = PatientRecord(
            patient_id=patient_id,
            birth_year=birth_year,
            sex=sex,
            enrollment_start=enrollment_start,
            enrollment_end=enrollment_end,
            visits=tuple(
                Visit(date=day, codes=tuple(codes))
                for day, codes in sorted(visits.items())
            ),
        )
        patients.append(record)
    return patients
