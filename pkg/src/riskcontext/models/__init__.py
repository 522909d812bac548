from .data import DEFAULT_FRACTIONS, Split, split_data
from .nets import (
    KIND_LR,
    KIND_MLP,
    Layer,
    RiskModel,
    TrainConfig,
    bce_from_logits,
    bce_from_proba,
    loss_and_grad,
    train,
    train_selected,
)
from .metrics import MetricsReport, auc_prc, auc_roc, brier, evaluate, evaluate_scores

__all__ = [
    "DEFAULT_FRACTIONS",
    "KIND_LR",
    "KIND_MLP",
    "Layer",
    "MetricsReport",
    "RiskModel",
    "Split",
    "TrainConfig",
    "auc_prc",
    "auc_roc",
    "bce_from_logits",
    "bce_from_proba",
    "brier",
    "evaluate",
    "evaluate_scores",
    "loss_and_grad",
    "split_data",
    "train",
    "train_selected",
]
