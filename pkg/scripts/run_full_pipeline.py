#!/usr/bin/env python3
"""Drive the whole pipeline into a workspace and print the report.

Usage: python scripts/run_full_pipeline.py [data_dir] [--seed N] [--n-patients N]
"""
import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import dataclasses

from riskcontext import pipeline
from riskcontext.cli import build_report
from riskcontext.config import AppConfig
from riskcontext.service.storage import Workspace


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("data_dir", nargs="?", default="data")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--n-patients", type=int, default=2000)
    parser.add_argument("--kind", choices=["LR", "MLP"], default="MLP")
    args = parser.parse_args()

    base = AppConfig()
    config = dataclasses.replace(
        base,
        synth=dataclasses.replace(base.synth, seed=args.seed, n_patients=args.n_patients),
        model=dataclasses.replace(base.model, kind=args.kind),
        service=dataclasses.replace(base.service, data_dir=args.data_dir),
    )
    ws = Workspace(args.data_dir)

    print(f"== generate  -> {pipeline.step_generate(ws, config)}")
    print(f"== cohort    -> {pipeline.step_build_cohort(ws, config)}")
    print(f"== train     -> {pipeline.step_train(ws, config)['metrics']}")
    print(f"== prototypes-> {pipeline.step_prototypes(ws, config)['k']} selected")
    print(f"== explain   -> {pipeline.step_explain(ws, config)}")
    print(
        f"== guidelines-> {pipeline.step_ingest_guidelines(ws, pipeline.fixture_guideline_html(), pipeline.fixture_parse_config())}"
    )
    print()
    print(build_report(ws, config, ["metrics", "prototypes", "aggregate_importance", "question_flow"], "markdown"))


if __name__ == "__main__":
    main()
