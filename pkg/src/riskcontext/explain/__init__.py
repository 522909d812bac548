from .shapley import Attribution, EXACT_FEATURE_CAP, shapley_exact, shapley_sampled
from .protodash import (
    KernelSpec,
    PrototypeSet,
    kkt_residual,
    median_bandwidth,
    objective,
    protodash,
    rbf_kernel,
)
from .aggregate import FeatureImportance, aggregate_importance
from .summary import (
    HIGH_PREVALENCE_CUTOFF,
    PrototypeSummary,
    SummaryRow,
    summarize_prototypes,
)

__all__ = [
    "Attribution",
    "EXACT_FEATURE_CAP",
    "FeatureImportance",
    "HIGH_PREVALENCE_CUTOFF",
    "KernelSpec",
    "PrototypeSet",
    "PrototypeSummary",
    "SummaryRow",
    "aggregate_importance",
    "kkt_residual",
    "median_bandwidth",
    "objective",
    "protodash",
    "rbf_kernel",
    "shapley_exact",
    "shapley_sampled",
    "summarize_prototypes",
]
