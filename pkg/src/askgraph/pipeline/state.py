"""Session and turn records; the turn trace is the stable contract shared
with the evaluation harness and the chat client."""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field, replace

from askgraph.gremlin.interpreter import ExecutionLimits
from askgraph.gremlin.issues import ValidationIssue
from askgraph.retrieval.masking import MaskedQuery
from askgraph.retrieval.store import MatchStrategy

DECISION_ANSWERABLE = "answerable"
DECISION_OFF_TOPIC = "off_topic"
DECISION_CLARIFY = "needs_clarification"
TEMPLATE_INTENT_PREFIX = "template_intent:"
TEMPLATE_INTENTS = ("procurement", "franchise", "complaint")


@dataclass(frozen=True)
class Candidate:
    vertex_id: str
    display_name: str
    score: float

    def to_dict(self) -> dict:
        return {"vertex_id": self.vertex_id, "display_name": self.display_name, "score": self.score}

    @classmethod
    def from_dict(cls, raw: dict) -> "Candidate":
        return cls(raw["vertex_id"], raw["display_name"], raw["score"])


@dataclass(frozen=True)
class PendingDisambiguation:
    surface: str
    candidates: tuple[Candidate, ...]  # always >= 2; singletons auto-resolve
    asked_at: int  # index of the clarification turn in the session

    def to_dict(self) -> dict:
        return {
            "surface": self.surface,
            "candidates": [c.to_dict() for c in self.candidates],
            "asked_at": self.asked_at,
        }


@dataclass(frozen=True)
class ScriptAttempt:
    script: str
    issues: tuple[ValidationIssue, ...] = ()

    def to_dict(self) -> dict:
        return {"script": self.script, "issues": [i.to_dict() for i in self.issues]}

    @classmethod
    def from_dict(cls, raw: dict) -> "ScriptAttempt":
        return cls(
            script=raw["script"],
            issues=tuple(ValidationIssue.from_dict(i) for i in raw.get("issues", ())),
        )


@dataclass
class AgentTurn:
    user_text: str
    answer_text: str = ""
    rewritten_text: str = ""
    decision: str = DECISION_ANSWERABLE
    masked: MaskedQuery | None = None
    examples_used: list[tuple[str, float]] = field(default_factory=list)
    script_attempts: list[ScriptAttempt] = field(default_factory=list)
    final_script: str | None = None
    result: list | None = None
    candidates: list[Candidate] = field(default_factory=list)
    error: str | None = None
    latency_ms: float = 0.0
    trace_id: str = field(default_factory=lambda: uuid.uuid4().hex)

    def to_dict(self) -> dict:
        return {
            "trace_id": self.trace_id,
            "user_text": self.user_text,
            "rewritten_text": self.rewritten_text,
            "decision": self.decision,
            "masked": self.masked.to_dict() if self.masked else None,
            "examples_used": [{"id": pid, "score": score} for pid, score in self.examples_used],
            "script_attempts": [a.to_dict() for a in self.script_attempts],
            "final_script": self.final_script,
            "result": self.result,
            "candidates": [c.to_dict() for c in self.candidates],
            "error": self.error,
            "answer_text": self.answer_text,
            "latency_ms": self.latency_ms,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "AgentTurn":
        return cls(
            user_text=raw["user_text"],
            answer_text=raw["answer_text"],
            rewritten_text=raw.get("rewritten_text", ""),
            decision=raw.get("decision", DECISION_ANSWERABLE),
            masked=MaskedQuery.from_dict(raw["masked"]) if raw.get("masked") else None,
            examples_used=[(e["id"], e["score"]) for e in raw.get("examples_used", ())],
            script_attempts=[ScriptAttempt.from_dict(a) for a in raw.get("script_attempts", ())],
            final_script=raw.get("final_script"),
            result=raw.get("result"),
            candidates=[Candidate.from_dict(c) for c in raw.get("candidates", ())],
            error=raw.get("error"),
            latency_ms=raw.get("latency_ms", 0.0),
            trace_id=raw.get("trace_id", uuid.uuid4().hex),
        )


@dataclass
class SessionState:
    session_id: str
    turns: list[AgentTurn] = field(default_factory=list)
    resolved_entities: dict[str, str] = field(default_factory=dict)  # surface -> vertex id
    pending: PendingDisambiguation | None = None


@dataclass(frozen=True)
class PipelineConfig:
    strategy: MatchStrategy = MatchStrategy.FULL_MASK
    k: int = 5  # 0 means zero-shot generation without examples
    max_reflections: int = 2
    fuzzy_threshold: float = 0.4
    fuzzy_limit: int = 10
    schema_top_m: int = 6
    auto_resolve: bool = False  # single-shot mode: pick the top candidate, never ask
    limits: ExecutionLimits = field(default_factory=ExecutionLimits)

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if self.max_reflections < 0:
            raise ValueError("max_reflections must be >= 0")

    def with_overrides(self, overrides: dict | None) -> "PipelineConfig":
        if not overrides:
            return self
        fields: dict = {}
        if "strategy" in overrides:
            fields["strategy"] = MatchStrategy(overrides["strategy"])
        for key in ("k", "max_reflections", "fuzzy_threshold", "fuzzy_limit", "schema_top_m", "auto_resolve"):
            if key in overrides:
                fields[key] = overrides[key]
        return replace(self, **fields)

    @classmethod
    def from_dict(cls, raw: dict) -> "PipelineConfig":
        base = cls()
        return base.with_overrides(raw)
