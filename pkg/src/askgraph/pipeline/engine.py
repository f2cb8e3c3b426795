"""The turn pipeline: a question goes decision -> anaphora -> disambiguation
-> schema linking -> masked retrieval -> generation -> validate/reflect ->
execute -> respond, with the whole trace recorded on the turn.

Every stage degrades to an explanatory answer instead of raising; a session
never ends up in an inconsistent state because of a backend failure.
"""

from __future__ import annotations

import json
import re
import time
import uuid
from importlib import resources

from askgraph.errors import AskGraphError, LimitExceeded, NoScriptFound, RuntimeTypeError
from askgraph.graphstore.graph import PropertyGraph
from askgraph.graphstore.names import normalize_name
from askgraph.graphstore.schema import schema_card
from askgraph.gremlin.issues import GremlinSyntaxError, IssueKind, ValidationIssue
from askgraph.gremlin.parser import parse
from askgraph.gremlin.validator import validate
from askgraph.gremlin.interpreter import execute
from askgraph.llm.backends import LlmRequest, complete, extract_script
from askgraph.llm.templates import PromptCatalog, load_catalog
from askgraph.retrieval.embedding import cosine, default_embedder
from askgraph.retrieval.masking import COMPANY_PLACEHOLDER, MaskedQuery, Mention, mask
from askgraph.retrieval.store import ExamplePair, MatchStrategy, VectorIndex, build_index, top_k
from askgraph.pipeline.state import (
    AgentTurn,
    Candidate,
    DECISION_ANSWERABLE,
    DECISION_CLARIFY,
    DECISION_OFF_TOPIC,
    PendingDisambiguation,
    PipelineConfig,
    ScriptAttempt,
    SessionState,
    TEMPLATE_INTENT_PREFIX,
    TEMPLATE_INTENTS,
)

_PRONOUN_RE = re.compile(
    r"\b(their|its|they|it|them|he|she|his|her|the company|that company|this company)\b",
    re.IGNORECASE,
)
_CJK_PRONOUNS = ("他们", "它", "他", "她", "该公司", "这家公司")

_ORDINALS = {
    "first": 1, "1st": 1, "second": 2, "2nd": 2, "third": 3, "3rd": 3,
    "fourth": 4, "4th": 4, "fifth": 5, "5th": 5,
}

_TEMPLATE_ANSWERS = {
    "procurement": "For procurement needs, please submit your requirements through the procurement portal; a specialist will follow up.",
    "franchise": "For franchise inquiries, please contact the brand's franchise department through the official channel listed on its profile page.",
    "complaint": "For complaints, please open a ticket with the customer service center so the case can be tracked.",
}

_REFUSAL = "I can only help with questions about the companies and people in the enterprise knowledge graph."
_CLARIFY = "Could you rephrase the question? I could not work out what to look up."
_FAILED = "I could not produce a working query for that question, sorry."
_EMPTY_RESULT = "No matching records were found."

MAX_CANDIDATES = 5
_SUMMARY_ROW_CAP = 20

# detects company-shaped spans for fuzzy lookup of unindexed names
_CAP_RUN_RE = re.compile(
    r"\b[A-Z][\w'&.-]*(?:[ ,]+(?:[A-Z][\w'&.-]*|\([A-Z][\w]*\)|Co\.?|Ltd\.?|Inc\.?|Corp\.?|Group|Company))*"
)
_QUESTION_WORDS = {
    "who", "what", "when", "where", "which", "whose", "how", "is", "are", "does",
    "do", "list", "tell", "show", "could", "can", "please", "the",
}


def _load_default_lexicon() -> dict[str, str]:
    data = resources.files("askgraph.pipeline") / "data" / "lexicon.json"
    return json.loads(data.read_text(encoding="utf-8"))


class Pipeline:
    def __init__(
        self,
        graph: PropertyGraph,
        pairs: list[ExamplePair],
        backend,
        catalog: PromptCatalog | None = None,
        config: PipelineConfig | None = None,
        embedder=default_embedder,
        lexicon: dict[str, str] | None = None,
    ):
        self.graph = graph
        self.pairs = list(pairs)
        self.backend = backend
        self.catalog = catalog or load_catalog()
        self.config = config or PipelineConfig()
        self.embedder = embedder
        self.lexicon = lexicon if lexicon is not None else _load_default_lexicon()
        self._indexes: dict[MatchStrategy, VectorIndex] = {}
        self._label_vectors = None

    # -- shared plumbing ------------------------------------------------------

    def new_session(self) -> SessionState:
        return SessionState(session_id=uuid.uuid4().hex)

    def index_for(self, strategy: MatchStrategy) -> VectorIndex:
        if strategy not in self._indexes:
            self._indexes[strategy] = build_index(self.pairs, strategy, self.graph, self.embedder)
        return self._indexes[strategy]

    def replace_pairs(self, pairs: list[ExamplePair]) -> None:
        """Swap in a new immutable seed snapshot; indexes rebuild lazily."""
        self.pairs = list(pairs)
        self._indexes = {}

    def _ask(self, template: str, slots: dict[str, str]) -> str:
        prompt = self.catalog.render(template, slots)
        return complete(LlmRequest(prompt=prompt, tag=template), self.backend).text

    def _history_text(self, session: SessionState) -> str:
        lines = []
        for turn in session.turns[-6:]:
            lines.append(f"user: {turn.user_text}")
            lines.append(f"assistant: {turn.answer_text}")
        return "\n".join(lines)

    # -- stages ----------------------------------------------------------------

    def decide(self, user_text: str, history: str) -> str:
        try:
            response = self._ask("decision", {"question": user_text, "history": history})
        except AskGraphError:
            return DECISION_CLARIFY
        lowered = response.lower()
        for intent in TEMPLATE_INTENTS:
            if f"{TEMPLATE_INTENT_PREFIX}{intent}" in lowered:
                return f"{TEMPLATE_INTENT_PREFIX}{intent}"
        for label in (DECISION_ANSWERABLE, DECISION_OFF_TOPIC, DECISION_CLARIFY):
            if label in lowered or label.replace("_", "-") in lowered:
                return label
        return DECISION_CLARIFY

    def resolve_anaphora(self, user_text: str, history: str) -> str:
        if not history:
            return user_text
        has_pronoun = bool(_PRONOUN_RE.search(user_text)) or any(
            p in user_text for p in _CJK_PRONOUNS
        )
        if not has_pronoun:
            return user_text
        try:
            response = self._ask("anaphora", {"question": user_text, "history": history})
        except AskGraphError:
            return user_text
        for line in response.splitlines():
            if line.strip():
                return line.strip()
        return user_text

    def disambiguate(
        self, rewritten: str, session: SessionState, config: PipelineConfig
    ) -> tuple[MaskedQuery, PendingDisambiguation | None]:
        """Resolve company mentions; may produce a pending clarification."""
        masked = mask(rewritten, self.graph)
        mentions: list[Mention] = []
        pending: PendingDisambiguation | None = None

        for mention in masked.mentions:
            if mention.resolved_vertex is not None:
                session.resolved_entities[mention.surface] = mention.resolved_vertex
                mentions.append(mention)
                continue
            if mention.surface in session.resolved_entities:
                mentions.append(
                    Mention(mention.surface, mention.span, session.resolved_entities[mention.surface])
                )
                continue
            ids = [
                vid
                for vid in self.graph.lookup_exact(mention.surface)
                if self.graph.vertices[vid].label == "company"
            ]
            if len(ids) > 1 and pending is None:
                candidates = tuple(
                    Candidate(vid, self.graph.display_name(vid), 1.0)
                    for vid in ids[:MAX_CANDIDATES]
                )
                pending = PendingDisambiguation(
                    surface=mention.surface, candidates=candidates, asked_at=len(session.turns)
                )
            mentions.append(mention)

        if pending is None:
            masked, fuzzy_pending = self._fuzzy_mentions(
                rewritten, MaskedQuery(masked.masked_text, tuple(mentions)), session, config
            )
            return masked, fuzzy_pending
        return MaskedQuery(masked.masked_text, tuple(mentions)), pending

    def _fuzzy_mentions(
        self,
        rewritten: str,
        masked: MaskedQuery,
        session: SessionState,
        config: PipelineConfig,
    ) -> tuple[MaskedQuery, PendingDisambiguation | None]:
        covered = [m.span for m in masked.mentions]
        for match in _CAP_RUN_RE.finditer(rewritten):
            span = (match.start(), match.end())
            if any(span[0] < end and start < span[1] for start, end in covered):
                continue
            surface = match.group(0).rstrip(" ,")
            words = [w.strip(".,").lower() for w in surface.split()]
            if all(w in _QUESTION_WORDS for w in words):
                continue
            if len(words) == 1 and span[0] == 0:
                continue  # sentence-initial single word is usually not a name
            if surface in session.resolved_entities:
                vid = session.resolved_entities[surface]
                return self._mask_span(rewritten, masked, span, surface, vid), None
            hits = [
                (vid, score)
                for vid, score in self.graph.lookup_fuzzy(
                    surface, threshold=config.fuzzy_threshold, limit=config.fuzzy_limit
                )
                if self.graph.vertices[vid].label == "company"
            ]
            if len(hits) == 1:
                vid = hits[0][0]
                session.resolved_entities[surface] = vid
                return self._mask_span(rewritten, masked, span, surface, vid), None
            if len(hits) >= 2:
                candidates = tuple(
                    Candidate(vid, self.graph.display_name(vid), score)
                    for vid, score in hits[:MAX_CANDIDATES]
                )
                pending = PendingDisambiguation(
                    surface=surface, candidates=candidates, asked_at=len(session.turns)
                )
                return masked, pending
            # no hits: mention stays unresolved, the pipeline may still answer
        return masked, None

    def _mask_span(
        self, rewritten: str, masked: MaskedQuery, span: tuple[int, int], surface: str, vid: str
    ) -> MaskedQuery:
        """Re-mask after a fuzzy resolution so retrieval sees the placeholder."""
        mentions = sorted(
            list(masked.mentions) + [Mention(surface, span, vid)], key=lambda m: m.span
        )
        pieces = []
        cursor = 0
        for mention in mentions:
            pieces.append(rewritten[cursor : mention.span[0]])
            pieces.append(COMPANY_PLACEHOLDER)
            cursor = mention.span[1]
        pieces.append(rewritten[cursor:])
        return MaskedQuery(masked_text="".join(pieces), mentions=tuple(mentions))

    def _label_texts(self) -> list[tuple[str, str]]:
        out = []
        for label in self.graph.schema.labels:
            prop_bits = ", ".join(
                f"{p.name} {p.description}".strip() for p in label.properties
            )
            out.append((label.name, f"{label.name}: {prop_bits}" if prop_bits else label.name))
        for edge in self.graph.schema.edges:
            if self.graph.schema.label(edge.name) is None:
                out.append((edge.name, f"{edge.name}: {edge.description}"))
        return out

    def link_schema(self, rewritten: str, config: PipelineConfig) -> tuple[list[str], str]:
        """Two stages: embedding recall of candidate labels, then LLM selection."""
        if not self.graph.schema.labels and not self.graph.schema.edges:
            return [], ""
        if self._label_vectors is None:
            self._label_vectors = [
                (name, self.embedder(text)) for name, text in self._label_texts()
            ]
        query_vec = self.embedder(rewritten)
        scored = sorted(
            ((cosine(query_vec, vec), name) for name, vec in self._label_vectors),
            key=lambda item: (-item[0], item[1]),
        )
        recalled = [name for _, name in scored[: config.schema_top_m]]
        selected = recalled
        try:
            response = self._ask(
                "schema_link",
                {"question": rewritten, "candidates": "\n".join(recalled)},
            )
            declared = {name for name, _ in self._label_texts()}
            picked = [
                token.strip()
                for token in re.split(r"[,\n]", response)
                if token.strip() in declared
            ]
            if picked:
                selected = list(dict.fromkeys(picked))
        except AskGraphError:
            pass
        return selected, schema_card(self.graph.schema, selected)

    def retrieve_examples(
        self, rewritten: str, config: PipelineConfig
    ) -> list[tuple[ExamplePair, float]]:
        if config.k < 1 or not self.pairs:
            return []
        index = self.index_for(config.strategy)
        return top_k(rewritten, config.k, config.strategy, index, self.graph, self.embedder)

    def _examples_block(self, examples: list[tuple[ExamplePair, float]]) -> str:
        lines = []
        for pair, _ in examples:
            lines.append(f"Question: {pair.question}")
            lines.append(f"Script: {pair.script}")
            lines.append("")
        return "\n".join(lines).strip()

    def _lexicon_block(self) -> str:
        return "\n".join(f"{term} -> {canonical}" for term, canonical in sorted(self.lexicon.items()))

    def generate_script(
        self,
        masked: MaskedQuery,
        examples: list[tuple[ExamplePair, float]],
        card: str,
    ) -> str:
        response = self._ask(
            "gremlin_gen",
            {
                "question": masked.masked_text,
                "schema_card": card,
                "examples": self._examples_block(examples),
                "lexicon": self._lexicon_block(),
            },
        )
        return extract_script(response)

    def reflect_and_repair(
        self, masked: MaskedQuery, script: str, issues: list[ValidationIssue], card: str
    ) -> str:
        issue_lines = "\n".join(
            f"- {i.kind.value} at step {i.location}: {i.message}" for i in issues
        )
        response = self._ask(
            "reflection",
            {
                "question": masked.masked_text,
                "script": script,
                "issues": issue_lines,
                "schema_card": card,
            },
        )
        return extract_script(response)

    def _example_entity_surfaces(self, examples: list[tuple[ExamplePair, float]]) -> list[str]:
        surfaces = []
        for pair, _ in examples:
            for mention in mask(pair.question, self.graph).mentions:
                if mention.surface not in surfaces:
                    surfaces.append(mention.surface)
        return surfaces

    def substitute_entities(
        self,
        script: str,
        masked: MaskedQuery,
        examples: list[tuple[ExamplePair, float]],
    ) -> str:
        """Replace placeholder/example-entity literals with resolved stored names."""
        resolved_names = [
            self.graph.vertices[m.resolved_vertex].props.get("name", "")
            for m in masked.mentions
            if m.resolved_vertex is not None
        ]
        if not resolved_names:
            return script

        def quoted(name: str) -> str:
            return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"

        out = script
        placeholder = f"'{COMPANY_PLACEHOLDER}'"
        i = 0
        while placeholder in out:
            name = resolved_names[min(i, len(resolved_names) - 1)]
            out = out.replace(placeholder, quoted(name), 1)
            i += 1
        primary = quoted(resolved_names[0])
        for surface in self._example_entity_surfaces(examples):
            for form in (f"'{surface}'", quoted(surface)):
                if form != primary and form in out:
                    out = out.replace(form, primary)
        return out

    def respond(self, turn: AgentTurn, masked: MaskedQuery | None) -> str:
        if turn.result is None:
            return turn.answer_text or _FAILED
        rows = turn.result
        if not rows:
            return _EMPTY_RESULT
        scalars = all(isinstance(r, (str, int, float, bool)) for r in rows)
        if scalars and len(rows) <= 3:
            entity = self._primary_entity_name(masked)
            prop = self._answer_property(turn.final_script)
            values = ", ".join(_render_scalar(r) for r in rows)
            if entity and prop:
                return f"The {prop} of {entity} is {values}."
            return f"Result: {values}."
        try:
            response = self._ask(
                "summarize",
                {
                    "question": turn.rewritten_text or turn.user_text,
                    "rows": json.dumps(rows[:_SUMMARY_ROW_CAP], ensure_ascii=False),
                },
            )
            return response.strip()
        except AskGraphError:
            return f"Found {len(rows)} matching records."

    def _primary_entity_name(self, masked: MaskedQuery | None) -> str | None:
        if masked is None:
            return None
        for mention in masked.mentions:
            if mention.resolved_vertex is not None:
                return str(
                    self.graph.vertices[mention.resolved_vertex].props.get("name", mention.surface)
                )
        return None

    def _answer_property(self, script: str | None) -> str | None:
        if not script:
            return None
        try:
            traversal = parse(script)
        except GremlinSyntaxError:
            return None
        for step in reversed(traversal.steps):
            if step.op == "values" and len(step.args) == 1:
                key = step.args[0].value
                if isinstance(key, str):
                    return _humanize(key)
            if step.op in ("count", "fold", "sum", "min", "max", "mean", "dedup", "order", "limit"):
                continue
            break
        return None

    # -- turn orchestration ------------------------------------------------------

    def handle_turn(
        self, session: SessionState, user_text: str, overrides: dict | None = None
    ) -> AgentTurn:
        config = self.config.with_overrides(overrides)
        started = time.monotonic()
        turn = self._handle_turn_inner(session, user_text, config)
        turn.latency_ms = (time.monotonic() - started) * 1000.0
        session.turns.append(turn)
        return turn

    def _handle_turn_inner(
        self, session: SessionState, user_text: str, config: PipelineConfig
    ) -> AgentTurn:
        # a pending clarification may be answered by this turn
        if session.pending is not None:
            choice = self._parse_selection(user_text, session.pending)
            if choice is not None:
                return self._resume(session, choice, user_text, config)
            session.pending = None  # user moved on

        history = self._history_text(session)
        decision = self.decide(user_text, history)

        if decision == DECISION_OFF_TOPIC:
            return AgentTurn(user_text=user_text, decision=decision, answer_text=_REFUSAL)
        if decision.startswith(TEMPLATE_INTENT_PREFIX):
            intent = decision[len(TEMPLATE_INTENT_PREFIX):]
            return AgentTurn(
                user_text=user_text,
                decision=decision,
                answer_text=_TEMPLATE_ANSWERS.get(intent, _CLARIFY),
            )
        if decision == DECISION_CLARIFY:
            return AgentTurn(user_text=user_text, decision=decision, answer_text=_CLARIFY)

        rewritten = self.resolve_anaphora(user_text, history)
        masked, pending = self.disambiguate(rewritten, session, config)

        if pending is not None:
            if config.auto_resolve:
                top = pending.candidates[0]
                session.resolved_entities[pending.surface] = top.vertex_id
                masked = self._apply_choice(rewritten, masked, pending.surface, top.vertex_id)
            else:
                session.pending = pending
                listing = "; ".join(
                    f"{i + 1}. {c.display_name}" for i, c in enumerate(pending.candidates)
                )
                return AgentTurn(
                    user_text=user_text,
                    rewritten_text=rewritten,
                    decision=DECISION_CLARIFY,
                    masked=masked,
                    candidates=list(pending.candidates),
                    answer_text=f"Which one do you mean: {listing}?",
                )

        return self._run_generation(session, user_text, rewritten, masked, config)

    def _apply_choice(
        self, rewritten: str, masked: MaskedQuery, surface: str, vertex_id: str
    ) -> MaskedQuery:
        mentions = []
        replaced = False
        for mention in masked.mentions:
            if not replaced and mention.surface == surface and mention.resolved_vertex is None:
                mentions.append(Mention(mention.surface, mention.span, vertex_id))
                replaced = True
            else:
                mentions.append(mention)
        if not replaced:
            start = rewritten.find(surface)
            if start >= 0:
                return self._mask_span(
                    rewritten, masked, (start, start + len(surface)), surface, vertex_id
                )
        return MaskedQuery(masked.masked_text, tuple(mentions))

    def _parse_selection(self, text: str, pending: PendingDisambiguation) -> str | None:
        stripped = text.strip().lower()
        digit = re.search(r"\b(\d{1,2})\b", stripped)
        if digit:
            idx = int(digit.group(1))
            if 1 <= idx <= len(pending.candidates):
                return pending.candidates[idx - 1].vertex_id
        for word, idx in _ORDINALS.items():
            if re.search(rf"\b{word}\b", stripped) and idx <= len(pending.candidates):
                return pending.candidates[idx - 1].vertex_id
        normalized = normalize_name(text)
        matches = [
            c
            for c in pending.candidates
            if normalized
            and (
                normalized in normalize_name(c.display_name)
                or normalize_name(c.display_name) in normalized
            )
        ]
        if len(matches) == 1:
            return matches[0].vertex_id
        # token overlap: "the Shanghai one" picks the candidate mentioning Shanghai
        stop = {"the", "one", "that", "this", "option", "number", "please", "pick", "choose", "i", "mean"}
        tokens = [t for t in normalized.split() if t not in stop]
        if tokens:
            hits = [
                c
                for c in pending.candidates
                if any(t in normalize_name(c.display_name).split() for t in tokens)
            ]
            if len(hits) == 1:
                return hits[0].vertex_id
        return None

    def _resume(
        self, session: SessionState, vertex_id: str, user_text: str, config: PipelineConfig
    ) -> AgentTurn:
        pending = session.pending
        session.pending = None
        assert pending is not None
        origin = session.turns[pending.asked_at]
        rewritten = origin.rewritten_text or origin.user_text
        session.resolved_entities[pending.surface] = vertex_id
        base_masked = origin.masked or mask(rewritten, self.graph)
        masked = self._apply_choice(rewritten, base_masked, pending.surface, vertex_id)
        return self._run_generation(session, user_text, rewritten, masked, config)

    def resume_with_candidate(
        self, session: SessionState, vertex_id: str, overrides: dict | None = None
    ) -> AgentTurn:
        """Service entry point: confirm a pending candidate by vertex id."""
        config = self.config.with_overrides(overrides)
        if session.pending is None:
            raise KeyError("no pending disambiguation")
        if vertex_id not in {c.vertex_id for c in session.pending.candidates}:
            raise ValueError(f"unknown candidate {vertex_id!r}")
        display = self.graph.display_name(vertex_id)
        started = time.monotonic()
        turn = self._resume(session, vertex_id, f"(selected: {display})", config)
        turn.latency_ms = (time.monotonic() - started) * 1000.0
        session.turns.append(turn)
        return turn

    def _run_generation(
        self,
        session: SessionState,
        user_text: str,
        rewritten: str,
        masked: MaskedQuery,
        config: PipelineConfig,
    ) -> AgentTurn:
        turn = AgentTurn(
            user_text=user_text,
            rewritten_text=rewritten,
            decision=DECISION_ANSWERABLE,
            masked=masked,
        )
        _, card = self.link_schema(rewritten, config)
        try:
            examples = self.retrieve_examples(rewritten, config)
        except AskGraphError:
            examples = []
        turn.examples_used = [(pair.id, score) for pair, score in examples]

        issues: list[ValidationIssue] = []
        script: str | None = None
        for attempt in range(1 + config.max_reflections):
            try:
                if attempt == 0:
                    raw = self.generate_script(masked, examples, card)
                else:
                    raw = self.reflect_and_repair(masked, script or "", issues, card)
            except NoScriptFound:
                issues = [
                    ValidationIssue(kind=IssueKind.SYNTAX, message="backend produced no script")
                ]
                turn.script_attempts.append(ScriptAttempt(script="", issues=tuple(issues)))
                continue
            except AskGraphError as exc:
                turn.answer_text = _FAILED
                turn.error = f"backend failure: {exc}"
                return turn
            candidate = self.substitute_entities(raw, masked, examples)
            try:
                traversal = parse(candidate)
            except GremlinSyntaxError as exc:
                issues = [exc.issue]
                turn.script_attempts.append(ScriptAttempt(script=candidate, issues=tuple(issues)))
                script = candidate
                continue
            issues = validate(traversal, self.graph.schema)
            turn.script_attempts.append(ScriptAttempt(script=candidate, issues=tuple(issues)))
            script = candidate
            if not issues:
                break
        if issues or script is None:
            turn.answer_text = _FAILED
            turn.error = "validation failed after reflection"
            return turn

        turn.final_script = script
        try:
            result = execute(parse(script), self.graph, config.limits)
        except (LimitExceeded, RuntimeTypeError) as exc:
            turn.final_script = script
            turn.answer_text = "The query was valid but failed while running, sorry."
            turn.error = f"runtime failure: {exc}"
            return turn
        turn.result = result.to_rows()
        turn.answer_text = self.respond(turn, masked)
        return turn


def _render_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def _humanize(prop: str) -> str:
    return re.sub(r"(?<!^)(?=[A-Z])", " ", prop).lower()
