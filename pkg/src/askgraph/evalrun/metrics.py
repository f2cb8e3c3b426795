"""Per-case records and aggregate metrics.

Syntax error rate follows the execution-success indicator: the rate is
1 - (1/N) * sum(executed_i). Execution correctness is the mean of graded
scores in {0, 0.5, 1}: human-judged when available, otherwise the declared
automatic proxy (exact multiset match = 1, any row overlap = 0.5, else 0).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from askgraph.errors import MissingGold, MissingHumanScore
from askgraph.evalrun.dataset import EvalCase
from askgraph.gremlin.complexity import complexity
from askgraph.gremlin.interpreter import freeze_value
from askgraph.gremlin.parser import parse


@dataclass
class EvalRecord:
    case_id: str
    strategy: str
    k: int
    backend_id: str
    generated_script: str | None = None
    executed: bool = False  # the success indicator
    syntax_ok: bool = False
    result: list | None = None
    gold_result: list | None = None
    human_score: float | None = None
    auto_score: float = 0.0
    failure_kind: str | None = None
    failure_detail: str = ""
    latency_ms: float = 0.0

    def to_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "strategy": self.strategy,
            "k": self.k,
            "backend_id": self.backend_id,
            "generated_script": self.generated_script,
            "executed": self.executed,
            "syntax_ok": self.syntax_ok,
            "result": self.result,
            "gold_result": self.gold_result,
            "auto_score": self.auto_score,
            "failure_kind": self.failure_kind,
            "failure_detail": self.failure_detail,
        }


def _multiset(rows: list) -> Counter:
    return Counter(freeze_value(row) for row in rows)


def score_case(record: EvalRecord, policy: str = "auto") -> float:
    """Grade one record: 1 / 0.5 / 0 per the stated policy."""
    if policy == "human":
        if record.human_score is None:
            raise MissingHumanScore(f"case {record.case_id} has no human score")
        return record.human_score
    if policy != "auto":
        raise ValueError(f"unknown scoring policy {policy!r}")
    if record.gold_result is None:
        raise MissingGold(f"case {record.case_id} has no gold result")
    if not record.executed or record.result is None:
        return 0.0
    got = _multiset(record.result)
    gold = _multiset(record.gold_result)
    if got == gold:
        return 1.0
    overlap = got & gold
    if overlap:
        return 0.5
    if sum(got.values()) == sum(gold.values()) and sum(gold.values()) > 0:
        shared = sum(overlap.values()) / sum(gold.values())
        if shared >= 0.5:
            return 0.5
    return 0.0


@dataclass(frozen=True)
class CellMetrics:
    strategy: str
    k: int
    backend_id: str
    n: int
    syntax_error_rate: float
    execution_correctness: float

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "k": self.k,
            "backend": self.backend_id,
            "n": self.n,
            "syntax_error_rate": self.syntax_error_rate,
            "execution_correctness": self.execution_correctness,
        }


@dataclass
class MetricsReport:
    cells: list[CellMetrics] = field(default_factory=list)
    difficulty_histogram: dict[str, int] = field(default_factory=dict)
    scoring_policy: str = "auto"

    @property
    def n(self) -> int:
        return sum(cell.n for cell in self.cells)

    def cell(self, strategy: str, k: int) -> CellMetrics:
        for c in self.cells:
            if c.strategy == strategy and c.k == k:
                return c
        raise KeyError((strategy, k))

    def to_dict(self) -> dict:
        return {
            "scoring_policy": self.scoring_policy,
            "note": "execution correctness uses the automatic proxy, not expert judgment"
            if self.scoring_policy == "auto"
            else "",
            "cells": [c.to_dict() for c in self.cells],
            "difficulty_histogram": dict(sorted(self.difficulty_histogram.items())),
        }


def aggregate_cell(records: list[EvalRecord], policy: str = "auto") -> CellMetrics:
    n = len(records)
    executed = sum(1 for r in records if r.executed)
    rate = 1.0 - (executed / n) if n else 0.0
    scores = [score_case(r, policy) for r in records]
    correctness = sum(scores) / n if n else 0.0
    head = records[0]
    return CellMetrics(
        strategy=head.strategy,
        k=head.k,
        backend_id=head.backend_id,
        n=n,
        syntax_error_rate=rate,
        execution_correctness=correctness,
    )


def profile_difficulty(cases: list[EvalCase]) -> dict[str, int]:
    """Complexity-tier histogram over gold scripts."""
    histogram: dict[str, int] = {"Simple": 0, "Moderate": 0, "Complex": 0}
    for case in cases:
        if case.gold_script is None:
            raise MissingGold(f"case {case.id} has no gold script")
        report = complexity(parse(case.gold_script))
        histogram[report.tier] += 1
    return histogram
