"""Batch driver for the pipeline; each subcommand wraps one stage and
writes the same data-directory layout the service uses."""
from __future__ import annotations

import dataclasses
import functools
import json
import sys
from pathlib import Path

import click

from . import pipeline
from .config import AppConfig, load_config
from .context.answers import answer as compose_answer, render
from .context.routing import QUESTION_KINDS
from .errors import DependencyError, RiskContextError
from .explain.summary import PrototypeSummary
from .guidelines.parser import ParseConfig
from .service.storage import Workspace


def _domain_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except RiskContextError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


class _App:
    def __init__(self, config: AppConfig, data_dir: str | None):
        if data_dir:
            config = dataclasses.replace(
                config, service=dataclasses.replace(config.service, data_dir=data_dir)
            )
        self.config = config
        self.workspace = Workspace(config.service.data_dir)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON config file; flags override file values.")
@click.option("--data-dir", default=None, help="Workspace directory for artifacts.")
@click.pass_context
def main(ctx, config_path, data_dir):
    """CKD-risk pipeline: synthetic claims, cohort, models, explainers,
    guideline QA, and contextualized answers."""
    ctx.obj = _App(load_config(config_path), data_dir)


def _replace_model(app: _App, **model_overrides) -> AppConfig:
    return dataclasses.replace(
        app.config, model=dataclasses.replace(app.config.model, **model_overrides)
    )


@main.command("generate-data")
@click.option("--seed", type=int, default=None, help="Generator seed.")
@click.option("--n-patients", type=int, default=None, help="Patients to generate.")
@click.pass_obj
@_domain_errors
def generate_data(app: _App, seed, n_patients):
    """Write synthetic claims and their CCS crosswalk."""
    overrides = {}
    if seed is not None:
        overrides["seed"] = seed
    if n_patients is not None:
        overrides["n_patients"] = n_patients
    config = dataclasses.replace(
        app.config, synth=dataclasses.replace(app.config.synth, **overrides)
    )
    result = pipeline.step_generate(app.workspace, config)
    click.echo(json.dumps(result, sort_keys=True))


@main.command("build-cohort")
@click.pass_obj
@_domain_errors
def build_cohort(app: _App):
    """Apply inclusion criteria and emit the feature matrix."""
    result = pipeline.step_build_cohort(app.workspace, app.config)
    click.echo(json.dumps(result, sort_keys=True))


@main.command("train")
@click.option("--kind", type=click.Choice(["LR", "MLP"]), default=None)
@click.option("--seed", type=int, default=None, help="Training seed.")
@click.option("--epochs", type=int, default=None)
@click.pass_obj
@_domain_errors
def train_cmd(app: _App, kind, seed, epochs):
    """Train the risk model on the current feature snapshot."""
    overrides = {}
    if kind is not None:
        overrides["kind"] = kind
    train_overrides = {}
    if seed is not None:
        train_overrides["seed"] = seed
    if epochs is not None:
        train_overrides["epochs"] = epochs
    config = app.config
    if overrides or train_overrides:
        model = dataclasses.replace(
            config.model,
            **overrides,
            train=config.model.train.replace(**train_overrides)
            if train_overrides
            else config.model.train,
        )
        config = dataclasses.replace(config, model=model)
    result = pipeline.step_train(app.workspace, config)
    click.echo(json.dumps(result, sort_keys=True))


@main.command("evaluate")
@click.pass_obj
@_domain_errors
def evaluate_cmd(app: _App):
    """Recompute test metrics for the stored model."""
    result = pipeline.step_evaluate(app.workspace, app.config)
    click.echo(json.dumps(result, sort_keys=True))


@main.command("prototypes")
@click.option("--k", type=int, default=None, help="Prototype count.")
@click.pass_obj
@_domain_errors
def prototypes_cmd(app: _App, k):
    """Select prototypical high-risk patients and summarize them."""
    config = app.config
    if k is not None:
        config = dataclasses.replace(
            config, explain=dataclasses.replace(config.explain, prototype_k=k)
        )
    result = pipeline.step_prototypes(app.workspace, config)
    click.echo(json.dumps(result, sort_keys=True))


@main.command("explain")
@click.option("--patients", default=None, help="Comma-separated patient ids (default: prototypes).")
@click.pass_obj
@_domain_errors
def explain_cmd(app: _App, patients):
    """Compute per-patient feature attributions and the aggregate view."""
    ids = [p.strip() for p in patients.split(",")] if patients else None
    result = pipeline.step_explain(app.workspace, app.config, ids)
    click.echo(json.dumps(result, sort_keys=True))


@main.command("ingest-guidelines")
@click.option("--html", "html_path", type=click.Path(exists=True), default=None,
              help="Guideline HTML (default: bundled fixture corpus).")
@click.option("--parse-config", "parse_config_path", type=click.Path(exists=True), default=None)
@click.pass_obj
@_domain_errors
def ingest_guidelines(app: _App, html_path, parse_config_path):
    """Parse guideline HTML into the evidence-structure store."""
    if html_path:
        html = Path(html_path).read_bytes()
        parse_config = (
            ParseConfig.load(parse_config_path) if parse_config_path else ParseConfig()
        )
    else:
        html = pipeline.fixture_guideline_html()
        parse_config = (
            ParseConfig.load(parse_config_path)
            if parse_config_path
            else pipeline.fixture_parse_config()
        )
    result = pipeline.step_ingest_guidelines(app.workspace, html, parse_config)
    click.echo(json.dumps(result, sort_keys=True))


@main.command("ask")
@click.argument("question")
@click.option("-k", type=int, default=None, help="Answers to return.")
@click.pass_obj
@_domain_errors
def ask_cmd(app: _App, question, k):
    """Query the guideline store."""
    stores = pipeline.load_stores(app.workspace, app.config)
    answerer = stores.require("answerer")
    for ranked in answerer.ask(question, k=k if k is not None else app.config.qa.k):
        click.echo(
            f"[{ranked.rec_id}] total={ranked.total:.3f} "
            f"(lexical={ranked.lexical_score:.3f}, numeric={ranked.numeric_bonus:.1f})"
        )
        click.echo(f"  {ranked.answer_text}")


@main.command("context")
@click.argument("kind")
@click.option("--patient", "patient_id", default=None)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_obj
@_domain_errors
def context_cmd(app: _App, kind, patient_id, fmt):
    """Answer one of the named clinician questions (Q1..Q6, Q3a) or free text."""
    stores = pipeline.load_stores(app.workspace, app.config)
    bundle = compose_answer(kind, stores, patient_id)
    click.echo(render(bundle, fmt).decode("utf-8"), nl=False)


@main.command("serve")
@click.option("--port", type=int, default=None)
@click.pass_obj
@_domain_errors
def serve_cmd(app: _App, port):
    """Run the HTTP service over this data directory."""
    import uvicorn

    from .service.app import create_app

    config = app.config
    if port is not None:
        config = dataclasses.replace(
            config, service=dataclasses.replace(config.service, port=port)
        )
    uvicorn.run(create_app(config), host="127.0.0.1", port=config.service.port)


_REPORT_SECTIONS = ("metrics", "prototypes", "aggregate_importance", "question_flow")


@main.command("report")
@click.option("--sections", default=",".join(_REPORT_SECTIONS),
              help="Comma-separated subset of: " + ", ".join(_REPORT_SECTIONS))
@click.option("--format", "fmt", type=click.Choice(["markdown", "json"]), default="markdown")
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.pass_obj
@_domain_errors
def report_cmd(app: _App, sections, fmt, out_path):
    """Render the metrics, prototype, importance, and question-flow report."""
    wanted = [s.strip() for s in sections.split(",") if s.strip()]
    unknown = [s for s in wanted if s not in _REPORT_SECTIONS]
    if unknown:
        raise click.UsageError(f"unknown report section(s): {', '.join(unknown)}")
    if not wanted:
        raise click.UsageError("at least one report section is required")
    document = build_report(app.workspace, app.config, wanted, fmt)
    if out_path:
        Path(out_path).write_text(document, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(document, nl=False)


def build_report(ws: Workspace, config: AppConfig, sections: list[str], fmt: str) -> str:
    stores = pipeline.load_stores(ws, config)
    payload: dict = {}

    if "metrics" in sections:
        snapshot = ws.require_snapshot()
        if not snapshot.has("metrics"):
            raise DependencyError(
                "no trained model in the store; run the train step first",
                missing="model",
            )
        payload["metrics"] = snapshot.read_json("metrics")
    if "prototypes" in sections:
        summary = stores.require("prototype_summary")
        payload["prototypes"] = summary.to_dict()
    if "aggregate_importance" in sections:
        snapshot = ws.require_snapshot()
        payload["aggregate_importance"] = snapshot.read_json("aggregate")
    if "question_flow" in sections:
        prototype_ids = stores.require("prototype_ids")
        if not prototype_ids:
            raise RiskContextError(
                "prototype pool is empty; train a stronger model or lower the risk cutoff"
            )
        patient_id = prototype_ids[0]
        flow = []
        for key in ("Q1", "Q2", "Q3", "Q3a", "Q4", "Q5", "Q6"):
            kind = QUESTION_KINDS[key]
            bundle = compose_answer(key, stores, patient_id)
            flow.append(
                {
                    "key": key,
                    "question": kind.question_text,
                    "annotation": bundle.annotation.to_dict(),
                    "rendered": render(bundle, "text").decode("utf-8"),
                    "bundle": bundle.to_dict(),
                }
            )
        payload["question_flow"] = {"patient_id": patient_id, "questions": flow}

    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    return _render_markdown(payload)


def _render_markdown(payload: dict) -> str:
    lines: list[str] = ["# Risk contextualization report", ""]
    if "metrics" in payload:
        lines += ["## Risk model metrics", ""]
        lines.append("| Method | Precision | Recall | AUC-ROC | AUC-PRC | Brier |")
        lines.append("|---|---|---|---|---|---|")
        for kind in sorted(payload["metrics"]):
            m = payload["metrics"][kind]
            lines.append(
                f"| {kind} | {m['precision']:.3f} | {m['recall']:.3f} "
                f"| {m['auc_roc']:.3f} | {m['auc_prc']:.3f} | {m['brier']:.3f} |"
            )
        lines.append("")
    if "prototypes" in payload:
        summary = PrototypeSummary.from_dict(payload["prototypes"])
        lines += ["## Prototypical patients", ""]
        lines.append("| Feature | Count (%) |")
        lines.append("|---|---|")
        lines.append(f"| n | {summary.n} |")
        for row in summary.rows:
            label = f"**{row.label}**" if row.high_prevalence else row.label
            lines.append(f"| {label} | {row.formatted()} |")
        lines.append("")
    if "aggregate_importance" in payload:
        lines += ["## Aggregate feature importances", ""]
        lines.append("| Rank | Feature | Mean abs. importance |")
        lines.append("|---|---|---|")
        for i, item in enumerate(payload["aggregate_importance"], start=1):
            lines.append(f"| {i} | {item['feature']} | {item['mean_abs_phi']:.4f} |")
        lines.append("")
    if "question_flow" in payload:
        flow = payload["question_flow"]
        lines += [f"## Question flow (patient {flow['patient_id']})", ""]
        for entry in flow["questions"]:
            ann = entry["annotation"]
            lines.append(f"### {entry['key']}. {entry['question']}")
            lines.append(
                f"*Source: {ann['source']} | Relevance: {ann['relevance']} | "
                f"Contextualization: {', '.join(ann['dimensions'])}*"
            )
            lines.append("")
            lines.append("```")
            lines.append(entry["rendered"].rstrip("\n"))
            lines.append("```")
            lines.append("")
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    main()
