"""One binary, subcommands: serve, score, validate, eval, analysis."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from askgraph.errors import AskGraphError
from askgraph.evalrun.dataset import load_dataset
from askgraph.evalrun.metrics import profile_difficulty
from askgraph.evalrun.runner import AblationRunner, export_failures, write_reports
from askgraph.graphstore.graph import load_graph
from askgraph.graphstore.schema import load_schema
from askgraph.gremlin.complexity import complexity
from askgraph.gremlin.issues import GremlinSyntaxError
from askgraph.gremlin.parser import parse
from askgraph.gremlin.validator import validate
from askgraph.llm.templates import load_catalog
from askgraph.pipeline.engine import Pipeline
from askgraph.pipeline.state import PipelineConfig
from askgraph.retrieval.store import (
    MatchStrategy,
    build_index,
    dump_index,
    load_seed_pairs,
    save_seed_pairs,
)
from askgraph.service.config import ServiceConfig, build_backend, load_config_file


def _script_or_file(value: str) -> str:
    if os.path.exists(value):
        return Path(value).read_text(encoding="utf-8").strip()
    return value.strip()


@click.group()
def main() -> None:
    """Question answering over an embedded enterprise property graph."""


@main.command()
@click.argument("script")
def score(script: str) -> None:
    """Emit the complexity report of SCRIPT (literal text or a file path) as JSON."""
    try:
        report = complexity(parse(_script_or_file(script)))
    except GremlinSyntaxError as exc:
        click.echo(json.dumps({"error": exc.issue.to_dict()}))
        sys.exit(1)
    click.echo(json.dumps(report.to_dict()))
    for warning in report.warnings:
        click.echo(f"warning: {warning}", err=True)


@main.command("validate")
@click.option("--schema", "schema_file", required=True, type=click.Path(exists=True))
@click.argument("script")
def validate_cmd(schema_file: str, script: str) -> None:
    """Validate SCRIPT against a schema; one JSON line per issue, exit 0 iff clean."""
    schema = load_schema(schema_file)
    try:
        traversal = parse(_script_or_file(script))
    except GremlinSyntaxError as exc:
        click.echo(json.dumps(exc.issue.to_dict()))
        sys.exit(1)
    issues = validate(traversal, schema)
    for issue in issues:
        click.echo(json.dumps(issue.to_dict()))
    sys.exit(1 if issues else 0)


@main.command()
@click.option("--config", "config_file", required=True, type=click.Path(exists=True))
def serve(config_file: str) -> None:
    """Run the HTTP service."""
    import uvicorn

    from askgraph.service.app import create_app

    config = ServiceConfig.from_file(config_file)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")


# -- eval -----------------------------------------------------------------------


def _eval_setup(config_file: str, backend_kind: str | None):
    raw = load_config_file(config_file)
    graph_spec = raw["graph"]
    graph = load_graph(graph_spec["schema"], graph_spec["nodes"], graph_spec["edges"])
    pairs = load_seed_pairs(raw["seed_pairs"])
    backend_spec = dict(raw.get("backend", {"kind": "mock"}))
    if backend_kind:
        backend_spec["kind"] = backend_kind
    backend = build_backend(backend_spec)
    catalog = load_catalog(raw.get("prompt_catalog")) if raw.get("prompt_catalog") else None
    return raw, graph, pairs, backend, catalog


def _eval_configs(raw: dict) -> list[PipelineConfig]:
    base = raw.get("pipeline", {})
    strategies = raw.get("strategies", [s.value for s in MatchStrategy])
    ks = raw.get("ks", [3, 5])
    configs = []
    for k in ks:
        for name in strategies:
            configs.append(PipelineConfig.from_dict({**base, "strategy": name, "k": k}))
    if raw.get("zero_shot", True):
        configs.append(PipelineConfig.from_dict({**base, "k": 0}))
    return configs


@main.group("eval")
def eval_group() -> None:
    """Evaluation harness."""


@eval_group.command("run")
@click.option("--dataset", required=True, type=click.Path(exists=True))
@click.option("--config", "config_file", required=True, type=click.Path(exists=True))
@click.option("--backend", "backend_kind", type=click.Choice(["mock", "http"]), default=None)
@click.option("--out", "out_dir", default=None, help="report directory (default: config out_dir or eval_out)")
@click.option("--policy", type=click.Choice(["auto", "human"]), default="auto")
def eval_run(dataset, config_file, backend_kind, out_dir, policy) -> None:
    """Run all configured (strategy, k) cells over the dataset."""
    raw, graph, pairs, backend, catalog = _eval_setup(config_file, backend_kind)
    cases = load_dataset(dataset)
    runner = AblationRunner(graph, pairs, backend, catalog=catalog)
    records, report = runner.run(cases, _eval_configs(raw), policy=policy)
    out = out_dir or raw.get("out_dir", "eval_out")
    paths = write_reports(report, out)
    failures = export_failures(records, str(Path(out) / "failures.jsonl"), policy=policy)
    for cell in report.cells:
        click.echo(
            f"{cell.strategy:>10s} k={cell.k}: syntax_error_rate="
            f"{cell.syntax_error_rate * 100:.2f}% execution_correctness="
            f"{cell.execution_correctness * 100:.2f}%"
        )
    click.echo(f"reports: {paths['report_json']}, {paths['report_csv']}")
    click.echo(f"failures exported: {failures}")


@eval_group.command("profile")
@click.option("--dataset", required=True, type=click.Path(exists=True))
def eval_profile(dataset: str) -> None:
    """Print the difficulty histogram over gold scripts."""
    histogram = profile_difficulty(load_dataset(dataset))
    click.echo(json.dumps(histogram, sort_keys=True))


@eval_group.command("synth")
@click.option("--config", "config_file", required=True, type=click.Path(exists=True))
@click.option("--n", default=30, show_default=True)
@click.option("--out", required=True, type=click.Path())
def eval_synth(config_file: str, n: int, out: str) -> None:
    """Generate a synthetic dataset (question + gold script) from graph templates."""
    from askgraph.offline.graph2nl import synthesize_pairs

    raw = load_config_file(config_file)
    graph_spec = raw["graph"]
    graph = load_graph(graph_spec["schema"], graph_spec["nodes"], graph_spec["edges"])
    try:
        pairs = synthesize_pairs(graph, n=n, id_prefix="synth")
    except AskGraphError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    with open(out, "w", encoding="utf-8") as fh:
        for pair in pairs:
            case = {"id": pair.id, "question": pair.question, "gold_script": pair.script}
            fh.write(json.dumps(case, ensure_ascii=False) + "\n")
    histogram = profile_difficulty(load_dataset(out))
    click.echo(f"wrote {len(pairs)} cases to {out}; difficulty {json.dumps(histogram, sort_keys=True)}")


# -- analysis -------------------------------------------------------------------


@main.group()
def analysis() -> None:
    """Offline loop: synthesize seed pairs, regenerate failures, import approvals."""


@analysis.command()
@click.option("--config", "config_file", required=True, type=click.Path(exists=True))
@click.option("--n", default=20, show_default=True)
@click.option("--out", required=True, type=click.Path())
def synthesize(config_file: str, n: int, out: str) -> None:
    """Generate seed pairs from graph templates into OUT (JSON lines)."""
    from askgraph.offline.graph2nl import synthesize_pairs

    raw = load_config_file(config_file)
    graph_spec = raw["graph"]
    graph = load_graph(graph_spec["schema"], graph_spec["nodes"], graph_spec["edges"])
    try:
        pairs = synthesize_pairs(graph, n=n)
    except AskGraphError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    save_seed_pairs(out, pairs)
    click.echo(f"wrote {len(pairs)} pairs to {out}")


@analysis.command()
@click.option("--config", "config_file", required=True, type=click.Path(exists=True))
@click.option("--failures", required=True, type=click.Path(exists=True))
@click.option("--dataset", type=click.Path(exists=True), help="dataset supplying original questions")
@click.option("--out", required=True, type=click.Path())
def regenerate(config_file: str, failures: str, dataset: str | None, out: str) -> None:
    """Regenerate failed queries into a pending review file."""
    from askgraph.offline.review import regenerate_failures, save_review_file

    raw, graph, pairs, backend, catalog = _eval_setup(config_file, None)
    pipeline = Pipeline(
        graph,
        pairs,
        backend,
        catalog=catalog,
        config=PipelineConfig.from_dict(raw.get("pipeline", {})),
    )
    questions = {}
    if dataset:
        questions = {c.id: c.question for c in load_dataset(dataset)}
    items = regenerate_failures(failures, pipeline, questions)
    save_review_file(out, items)
    click.echo(f"wrote {len(items)} pending review items to {out}")


@analysis.command("import")
@click.option("--config", "config_file", required=True, type=click.Path(exists=True))
@click.option("--review", required=True, type=click.Path(exists=True))
@click.option("--out-seeds", default=None, help="updated seed file (default: overwrite the configured one)")
@click.option("--index-out", default=None, help="also dump the rebuilt full-mask index")
def import_cmd(config_file: str, review: str, out_seeds: str | None, index_out: str | None) -> None:
    """Fold approved review items into the seed store."""
    from askgraph.offline.review import import_approved

    raw = load_config_file(config_file)
    graph_spec = raw["graph"]
    graph = load_graph(graph_spec["schema"], graph_spec["nodes"], graph_spec["edges"])
    pairs = load_seed_pairs(raw["seed_pairs"])
    updated, errors = import_approved(review, pairs, graph)
    target = out_seeds or raw["seed_pairs"]
    save_seed_pairs(target, updated)
    if index_out:
        dump_index(build_index(updated, MatchStrategy.FULL_MASK, graph), index_out)
    click.echo(f"seed store: {len(pairs)} -> {len(updated)} pairs ({target})")
    for item_id, reason in errors:
        click.echo(f"skipped {item_id}: {reason}", err=True)
    sys.exit(1 if errors else 0)


if __name__ == "__main__":
    main()
