from .types import (
    AGE_BINS,
    AGE_GROUPS,
    SEX_FEMALE,
    CcsMap,
    CohortConfig,
    FeatureMatrix,
    PatientRecord,
    Visit,
    age_group,
    epoch_year_of,
    is_valid_code,
    read_claims,
    write_claims,
)
from .select import Cohort, EXCLUSION_REASONS, age_at, label_outcome, select_cohort
from .features import build_features, ccs_feature_name
from .synth import LEVEL1_GROUPS, SynthConfig, generate_claims, synthetic_ccs_map

__all__ = [
    "AGE_BINS",
    "AGE_GROUPS",
    "SEX_FEMALE",
    "CcsMap",
    "CohortConfig",
    "Cohort",
    "EXCLUSION_REASONS",
    "FeatureMatrix",
    "LEVEL1_GROUPS",
    "PatientRecord",
    "SynthConfig",
    "Visit",
    "age_at",
    "age_group",
    "build_features",
    "ccs_feature_name",
    "epoch_year_of",
    "generate_claims",
    "is_valid_code",
    "label_outcome",
    "read_claims",
    "select_cohort",
    "synthetic_ccs_map",
    "write_claims",
]
