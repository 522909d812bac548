import dataclasses

import pytest

from riskcontext import pipeline
from riskcontext.config import AppConfig
from riskcontext.service.storage import Workspace


def small_app_config(data_dir: str, kind: str = "MLP") -> AppConfig:
    base = AppConfig()
    return dataclasses.replace(
        base,
        synth=dataclasses.replace(base.synth, n_patients=600, seed=11),
        model=dataclasses.replace(
            base.model, kind=kind, train=base.model.train.replace(epochs=30)
        ),
        service=dataclasses.replace(base.service, data_dir=data_dir),
    )


@pytest.fixture(scope="session")
def built_workspace(tmp_path_factory):
    """One fully built pipeline workspace shared by read-only tests."""
    data_dir = str(tmp_path_factory.mktemp("pipeline"))
    config = small_app_config(data_dir)
    ws = Workspace(data_dir)
    pipeline.step_generate(ws, config)
    pipeline.step_build_cohort(ws, config)
    pipeline.step_train(ws, config)
    pipeline.step_prototypes(ws, config)
    pipeline.step_explain(ws, config)
    pipeline.step_ingest_guidelines(
        ws, pipeline.fixture_guideline_html(), pipeline.fixture_parse_config()
    )
    return ws, config


@pytest.fixture(scope="session")
def built_stores(built_workspace):
    ws, config = built_workspace
    return pipeline.load_stores(ws, config)
