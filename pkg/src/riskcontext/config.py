"""Application configuration: one JSON file with a section per stage,
environment overrides for the service port and data directory."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .cohort.types import CohortConfig
from .errors import ConfigurationError
from .models.nets import TrainConfig

ENV_PORT = "RISKCONTEXT_PORT"
ENV_DATA_DIR = "RISKCONTEXT_DATA_DIR"


@dataclass(frozen=True)
class SynthSection:
    n_patients: int = 2000
    n_ccs_features: int = 30
    seed: int = 7
    # None derives a sparse signed weight pattern from the seed.
    planted_weights: tuple[float, ...] | None = None
    base_rate: float = 0.2
    violation_rate: float = 0.04
    xor_pairs: tuple[tuple[int, int, float], ...] = ()


@dataclass(frozen=True)
class ModelSection:
    kind: str = "MLP"
    threshold: float = 0.5
    split_seed: int = 1
    fractions: tuple[float, float, float] = (0.70, 0.10, 0.20)
    train: TrainConfig = field(default_factory=TrainConfig)


@dataclass(frozen=True)
class ExplainSection:
    shapley_samples: int = 2000
    shapley_seed: int = 17
    exact_cap: int = 20
    prototype_k: int = 20
    risk_cutoff: float = 0.5
    aggregate_top: int = 20


@dataclass(frozen=True)
class QaSection:
    k: int = 3
    numeric_bonus: float = 2.0


@dataclass(frozen=True)
class ContextSection:
    drug_class: str = "GLP-1 RA"
    top_importances: int = 10
    templates_file: str | None = None
    lab_overrides_file: str | None = None


@dataclass(frozen=True)
class ServiceSection:
    port: int = 8000
    data_dir: str = "data"
    workers: int = 1
    bearer_token: str | None = None


@dataclass(frozen=True)
class AppConfig:
    synth: SynthSection = field(default_factory=SynthSection)
    cohort: CohortConfig = field(default_factory=CohortConfig)
    model: ModelSection = field(default_factory=ModelSection)
    explain: ExplainSection = field(default_factory=ExplainSection)
    qa: QaSection = field(default_factory=QaSection)
    context: ContextSection = field(default_factory=ContextSection)
    service: ServiceSection = field(default_factory=ServiceSection)


def _build_section(cls, raw: dict):
    try:
        return cls(**raw)
    except TypeError as exc:
        raise ConfigurationError(f"bad config section for {cls.__name__}: {exc}") from exc


def load_config(path: str | None = None, env: dict | None = None) -> AppConfig:
    """Config file < environment; CLI flags apply on top of the result."""
    env = os.environ if env is None else env
    raw: dict = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)

    synth_raw = dict(raw.get("synth", {}))
    if synth_raw.get("planted_weights") is not None:
        synth_raw["planted_weights"] = tuple(synth_raw["planted_weights"])
    if "xor_pairs" in synth_raw:
        synth_raw["xor_pairs"] = tuple(tuple(p) for p in synth_raw["xor_pairs"])

    model_raw = dict(raw.get("model", {}))
    if "train" in model_raw:
        model_raw["train"] = TrainConfig.from_dict(model_raw["train"])
    if "fractions" in model_raw:
        model_raw["fractions"] = tuple(model_raw["fractions"])

    service_raw = dict(raw.get("service", {}))
    if env.get(ENV_PORT):
        service_raw["port"] = int(env[ENV_PORT])
    if env.get(ENV_DATA_DIR):
        service_raw["data_dir"] = env[ENV_DATA_DIR]

    return AppConfig(
        synth=_build_section(SynthSection, synth_raw),
        cohort=CohortConfig.from_dict(raw.get("cohort", {})),
        model=_build_section(ModelSection, model_raw),
        explain=_build_section(ExplainSection, raw.get("explain", {})),
        qa=_build_section(QaSection, raw.get("qa", {})),
        context=_build_section(ContextSection, raw.get("context", {})),
        service=_build_section(ServiceSection, service_raw),
    )
