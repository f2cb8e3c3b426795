"""Ablation runner: every (strategy, k) cell over a dataset, single-shot.

Deterministic under the scripted mock: two runs write byte-identical
reports. Per-case failures are recorded, never abort a run.
"""

from __future__ import annotations

import csv
import json
from dataclasses import replace
from pathlib import Path

from askgraph.evalrun.dataset import EvalCase
from askgraph.evalrun.metrics import (
    CellMetrics,
    EvalRecord,
    MetricsReport,
    aggregate_cell,
    profile_difficulty,
)
from askgraph.graphstore.graph import PropertyGraph
from askgraph.gremlin.interpreter import execute
from askgraph.gremlin.issues import IssueKind
from askgraph.gremlin.parser import parse
from askgraph.llm.templates import PromptCatalog
from askgraph.pipeline.engine import Pipeline
from askgraph.pipeline.state import PipelineConfig
from askgraph.retrieval.store import ExamplePair

ZERO_SHOT = "zero_shot"


def cell_label(config: PipelineConfig) -> tuple[str, int]:
    if config.k == 0:
        return ZERO_SHOT, 0
    return config.strategy.value, config.k


class AblationRunner:
    def __init__(
        self,
        graph: PropertyGraph,
        pairs: list[ExamplePair],
        backend,
        catalog: PromptCatalog | None = None,
    ):
        self.graph = graph
        self.pairs = pairs
        self.backend = backend
        self.catalog = catalog
        self._gold_cache: dict[str, list] = {}

    def _gold_result(self, case: EvalCase) -> list | None:
        if case.gold_script is None:
            return None
        if case.id not in self._gold_cache:
            result = execute(parse(case.gold_script), self.graph)
            self._gold_cache[case.id] = result.to_rows()
        return self._gold_cache[case.id]

    def run_case(self, pipeline: Pipeline, case: EvalCase, strategy: str, k: int) -> EvalRecord:
        record = EvalRecord(
            case_id=case.id,
            strategy=strategy,
            k=k,
            backend_id=getattr(self.backend, "backend_id", "backend"),
            human_score=case.human_score,
        )
        try:
            record.gold_result = self._gold_result(case)
        except Exception as exc:  # a broken gold script is a dataset bug, record it
            record.failure_kind = "gold-error"
            record.failure_detail = str(exc)
            return record
        session = pipeline.new_session()
        turn = pipeline.handle_turn(session, case.question)
        record.latency_ms = turn.latency_ms
        record.generated_script = turn.final_script or (
            turn.script_attempts[-1].script if turn.script_attempts else None
        )
        if turn.final_script is None:
            last_issues = turn.script_attempts[-1].issues if turn.script_attempts else ()
            if any(i.kind == IssueKind.SYNTAX for i in last_issues):
                record.failure_kind = "parse"
                offsets = [i.offset for i in last_issues if i.offset is not None]
                record.failure_detail = f"offset {offsets[0]}" if offsets else "no script"
            elif last_issues:
                record.failure_kind = f"validation:{last_issues[0].kind.value}"
                record.failure_detail = last_issues[0].message
            else:
                record.failure_kind = "no-script"
                record.failure_detail = turn.error or "pipeline declined"
            return record
        record.syntax_ok = True
        if turn.error is not None:  # validated but failed at runtime
            record.failure_kind = "runtime"
            record.failure_detail = turn.error
            return record
        record.executed = True
        record.result = turn.result
        return record

    def run(
        self, cases: list[EvalCase], configs: list[PipelineConfig], policy: str = "auto"
    ) -> tuple[list[EvalRecord], MetricsReport]:
        records: list[EvalRecord] = []
        report = MetricsReport(scoring_policy=policy)
        for config in configs:
            strategy, k = cell_label(config)
            run_config = replace(config, auto_resolve=True)  # single-shot: no clarifications
            pipeline = Pipeline(
                self.graph,
                self.pairs,
                self.backend,
                catalog=self.catalog,
                config=run_config,
            )
            cell_records = [self.run_case(pipeline, case, strategy, k) for case in cases]
            records.extend(cell_records)
            report.cells.append(aggregate_cell(cell_records, policy))
        with_gold = [c for c in cases if c.gold_script is not None]
        if with_gold:
            report.difficulty_histogram = profile_difficulty(with_gold)
        return records, report


# -- post-run annotation ----------------------------------------------------------


def _empty_result(record: EvalRecord) -> bool:
    return record.executed and not record.result


def export_failures(records: list[EvalRecord], path: str, policy: str = "auto") -> int:
    """JSON-lines of failed records annotated with a failure kind."""
    from askgraph.evalrun.metrics import score_case

    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            score = score_case(record, policy) if record.gold_result is not None else None
            failed = (not record.syntax_ok) or score == 0.0
            if not failed:
                continue
            kind = record.failure_kind
            if kind is None:
                kind = "empty-result" if _empty_result(record) else "wrong-result"
            row = {
                "case_id": record.case_id,
                "strategy": record.strategy,
                "k": record.k,
                "script": record.generated_script,
                "failure_kind": kind,
                "detail": record.failure_detail,
            }
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
            count += 1
    return count


def write_reports(report: MetricsReport, out_dir: str) -> dict[str, str]:
    """report.json + report.csv (+ difficulty.json); percentages at 2 decimals."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / "report.json"
    csv_path = out / "report.csv"
    difficulty_path = out / "difficulty.json"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["strategy", "k", "backend", "n", "syntax_error_rate", "execution_correctness"]
        )
        for cell in report.cells:
            writer.writerow(
                [
                    cell.strategy,
                    cell.k,
                    cell.backend_id,
                    cell.n,
                    f"{cell.syntax_error_rate * 100:.2f}%",
                    f"{cell.execution_correctness * 100:.2f}%",
                ]
            )
    with open(difficulty_path, "w", encoding="utf-8") as fh:
        json.dump(dict(sorted(report.difficulty_histogram.items())), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {
        "report_json": str(json_path),
        "report_csv": str(csv_path),
        "difficulty_json": str(difficulty_path),
    }
