"""Evaluation cases: a question, optionally a gold script and a human score."""

from __future__ import annotations

import json
from dataclasses import dataclass

from askgraph.gremlin.parser import parse


@dataclass(frozen=True)
class EvalCase:
    id: str
    question: str
    gold_script: str | None = None
    human_score: float | None = None  # 0, 0.5, or 1

    def to_dict(self) -> dict:
        out: dict = {"id": self.id, "question": self.question}
        if self.gold_script is not None:
            out["gold_script"] = self.gold_script
        if self.human_score is not None:
            out["human_score"] = self.human_score
        return out


def load_dataset(path: str) -> list[EvalCase]:
    """Load JSON-lines cases; gold scripts must parse."""
    cases: list[EvalCase] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            raw = json.loads(line)
            gold = raw.get("gold_script")
            if gold is not None:
                parse(gold)  # raises GremlinSyntaxError on a bad gold script
            cases.append(
                EvalCase(
                    id=str(raw["id"]),
                    question=raw["question"],
                    gold_script=gold,
                    human_score=raw.get("human_score"),
                )
            )
    return cases
