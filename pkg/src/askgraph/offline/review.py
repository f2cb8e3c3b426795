"""Failed-query regeneration and the file-based human-review queue.

Regenerated scripts never reach the vector store without an explicit
approval recorded in the review file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from askgraph.errors import AskGraphError
from askgraph.graphstore.graph import PropertyGraph
from askgraph.gremlin.issues import GremlinSyntaxError
from askgraph.gremlin.parser import parse
from askgraph.gremlin.validator import validate
from askgraph.pipeline.engine import Pipeline
from askgraph.retrieval.store import ExamplePair

STATUS_PENDING = "pending"
STATUS_APPROVED = "approved"
STATUS_REJECTED = "rejected"


@dataclass
class ReviewItem:
    id: str
    question: str
    failed_script: str | None
    failure_kind: str
    regenerated_script: str | None = None
    regenerated_issues: list[str] = field(default_factory=list)
    status: str = STATUS_PENDING
    reviewer_note: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "question": self.question,
            "failed_script": self.failed_script,
            "failure_kind": self.failure_kind,
            "regenerated_script": self.regenerated_script,
            "regenerated_issues": self.regenerated_issues,
            "status": self.status,
            "reviewer_note": self.reviewer_note,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ReviewItem":
        return cls(
            id=str(raw["id"]),
            question=raw["question"],
            failed_script=raw.get("failed_script"),
            failure_kind=raw.get("failure_kind", "unknown"),
            regenerated_script=raw.get("regenerated_script"),
            regenerated_issues=list(raw.get("regenerated_issues", [])),
            status=raw.get("status", STATUS_PENDING),
            reviewer_note=raw.get("reviewer_note", ""),
        )


def load_review_file(path: str) -> list[ReviewItem]:
    items = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                items.append(ReviewItem.from_dict(json.loads(line)))
    return items


def save_review_file(path: str, items: list[ReviewItem]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for item in items:
            fh.write(json.dumps(item.to_dict(), ensure_ascii=False) + "\n")


def _load_failures(path: str) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rows.append(json.loads(line))
    return rows


def regenerate_failures(
    failure_file: str,
    pipeline: Pipeline,
    questions_by_case: dict[str, str],
    k_boost: int = 2,
) -> list[ReviewItem]:
    """Re-run generation per failure with a wider example set; emit pending items."""
    wider_k = max(1, pipeline.config.k) + k_boost
    items: list[ReviewItem] = []
    for i, row in enumerate(_load_failures(failure_file), start=1):
        case_id = str(row.get("case_id", f"row{i}"))
        question = row.get("question") or questions_by_case.get(case_id, "")
        item = ReviewItem(
            id=f"regen-{case_id}",
            question=question,
            failed_script=row.get("script"),
            failure_kind=row.get("failure_kind", "unknown"),
        )
        if not question:
            item.regenerated_issues.append("original question unavailable")
            items.append(item)
            continue
        try:
            session = pipeline.new_session()
            turn = pipeline.handle_turn(
                session, question, overrides={"k": wider_k, "auto_resolve": True}
            )
            script = turn.final_script or (
                turn.script_attempts[-1].script if turn.script_attempts else None
            )
            item.regenerated_script = script
            if turn.final_script is None and turn.script_attempts:
                item.regenerated_issues.extend(
                    f"{i2.kind.value}: {i2.message}"
                    for i2 in turn.script_attempts[-1].issues
                )
        except AskGraphError as exc:
            item.regenerated_issues.append(str(exc))
        items.append(item)
    return items


def import_approved(
    review_file: str,
    pairs: list[ExamplePair],
    graph: PropertyGraph,
) -> tuple[list[ExamplePair], list[tuple[str, str]]]:
    """Fold approved review items into the seed set.

    Returns the new pair list (a fresh snapshot; input is unchanged) plus
    (item id, reason) for items that failed validation. Idempotent: an id
    that is already imported is skipped. Pending/rejected items are ignored.
    """
    existing = {pair.id for pair in pairs}
    out = list(pairs)
    errors: list[tuple[str, str]] = []
    for item in load_review_file(review_file):
        if item.status != STATUS_APPROVED:
            continue
        if item.id in existing:
            continue
        script = item.regenerated_script
        if not script:
            errors.append((item.id, "approved item has no regenerated script"))
            continue
        try:
            issues = validate(parse(script), graph.schema)
        except GremlinSyntaxError as exc:
            errors.append((item.id, f"syntax: {exc.issue.message}"))
            continue
        if issues:
            errors.append((item.id, f"validation: {issues[0].message}"))
            continue
        out.append(
            ExamplePair(id=item.id, question=item.question, script=script, provenance="feedback")
        )
        existing.add(item.id)
    return out, errors
