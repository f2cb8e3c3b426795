"""FastAPI application: chat sessions over the turn pipeline.

Shared state is an immutable snapshot (graph + seed pairs + pipeline)
swapped atomically on reload; per-session locks give each session strict
turn ordering while distinct sessions proceed concurrently. Pipeline errors
surface as structured answer turns, never a 500.
"""

from __future__ import annotations

import concurrent.futures
import secrets
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pathlib import Path

from askgraph.graphstore.graph import load_graph
from askgraph.gremlin.issues import IssueKind
from askgraph.llm.templates import load_catalog
from askgraph.pipeline.engine import Pipeline
from askgraph.pipeline.state import AgentTurn, SessionState
from askgraph.retrieval.store import load_seed_pairs
from askgraph.service.config import ServiceConfig, build_backend

RESULT_ROW_CAP = 50

_LATENCY_BUCKETS_MS = (50, 100, 200, 500, 1000, 2000, 5000)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class Snapshot:
    pipeline: Pipeline
    vertex_count: int
    edge_count: int
    seed_pair_count: int


@dataclass
class SessionEntry:
    state: SessionState
    lock: threading.Lock = field(default_factory=threading.Lock)


class Metrics:
    def __init__(self) -> None:
        self.lock = threading.Lock()
        self.turns_total = 0
        self.reflections_total = 0
        self.syntax_failures_total = 0
        self.latency_buckets = {str(b): 0 for b in _LATENCY_BUCKETS_MS}
        self.latency_buckets["inf"] = 0

    def observe_turn(self, turn: AgentTurn) -> None:
        with self.lock:
            self.turns_total += 1
            self.reflections_total += max(0, len(turn.script_attempts) - 1)
            if any(
                any(i.kind == IssueKind.SYNTAX for i in attempt.issues)
                for attempt in turn.script_attempts
            ):
                self.syntax_failures_total += 1
            for bucket in _LATENCY_BUCKETS_MS:
                if turn.latency_ms <= bucket:
                    self.latency_buckets[str(bucket)] += 1
                    break
            else:
                self.latency_buckets["inf"] += 1

    def to_dict(self) -> dict:
        with self.lock:
            return {
                "turns_total": self.turns_total,
                "reflections_total": self.reflections_total,
                "syntax_failures_total": self.syntax_failures_total,
                "latency_ms_buckets": dict(self.latency_buckets),
            }


def _load_snapshot(config: ServiceConfig, backend) -> Snapshot:
    graph = load_graph(config.schema_file, config.nodes_file, config.edges_file)
    pairs = load_seed_pairs(config.seed_pairs_file)
    catalog = load_catalog(config.prompt_catalog_dir) if config.prompt_catalog_dir else load_catalog()
    pipeline = Pipeline(graph, pairs, backend, catalog=catalog, config=config.pipeline)
    return Snapshot(
        pipeline=pipeline,
        vertex_count=len(graph.vertices),
        edge_count=len(graph.edges),
        seed_pair_count=len(pairs),
    )


def _turn_payload(turn: AgentTurn) -> dict:
    payload = turn.to_dict()
    rows = payload.get("result")
    payload["truncated"] = False
    if rows is not None and len(rows) > RESULT_ROW_CAP:
        payload["result"] = rows[:RESULT_ROW_CAP]
        payload["truncated"] = True
    return payload


def create_app(config: ServiceConfig, backend=None, defer_load: bool = False) -> FastAPI:
    app = FastAPI(title="askgraph", docs_url=None, redoc_url=None)
    state = app.state
    state.config = config
    state.backend = backend if backend is not None else build_backend(config.backend)
    state.snapshot = None
    state.snapshot_lock = threading.Lock()
    state.sessions = {}
    state.sessions_lock = threading.Lock()
    state.metrics = Metrics()
    state.executor = concurrent.futures.ThreadPoolExecutor(max_workers=16)

    def load_now() -> None:
        snapshot = _load_snapshot(config, state.backend)
        with state.snapshot_lock:
            state.snapshot = snapshot

    state.load_now = load_now
    if not defer_load:
        load_now()

    @app.exception_handler(ApiError)
    async def on_api_error(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"error": {"code": exc.code, "message": exc.message}}
        )

    def current_snapshot() -> Snapshot:
        snapshot = state.snapshot
        if snapshot is None:
            raise ApiError(503, "loading", "graph and index are still loading")
        return snapshot

    def session_entry(session_id: str) -> SessionEntry:
        with state.sessions_lock:
            entry = state.sessions.get(session_id)
        if entry is None:
            raise ApiError(404, "unknown_session", f"no session {session_id!r}")
        return entry

    def run_with_deadline(entry: SessionEntry, fn) -> dict:
        if not entry.lock.acquire(blocking=False):
            raise ApiError(409, "turn_in_flight", "a turn is already running for this session")

        def work():
            try:
                return fn()
            finally:
                entry.lock.release()

        future = state.executor.submit(work)
        try:
            turn = future.result(timeout=config.request_deadline_ms / 1000.0)
        except concurrent.futures.TimeoutError:
            raise ApiError(504, "deadline", "the turn exceeded the request deadline")
        state.metrics.observe_turn(turn)
        return _turn_payload(turn)

    # -- endpoints ---------------------------------------------------------

    @app.post("/sessions", status_code=201)
    def create_session():
        snapshot = current_snapshot()
        session_id = secrets.token_hex(16)
        entry = SessionEntry(state=snapshot.pipeline.new_session())
        entry.state.session_id = session_id
        with state.sessions_lock:
            state.sessions[session_id] = entry
        return {"session_id": session_id}

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: dict):
        snapshot = current_snapshot()
        entry = session_entry(session_id)
        text = body.get("text")
        if not isinstance(text, str) or not text.strip():
            raise ApiError(400, "bad_request", "body must carry a non-empty 'text'")
        overrides = body.get("overrides") or None
        if overrides is not None and not isinstance(overrides, dict):
            raise ApiError(400, "bad_request", "'overrides' must be an object")

        def work():
            try:
                return snapshot.pipeline.handle_turn(entry.state, text, overrides)
            except Exception as exc:  # degrade, never 500
                turn = AgentTurn(
                    user_text=text,
                    decision="needs_clarification",
                    answer_text="Something went wrong while handling that question, sorry.",
                    error=f"{type(exc).__name__}: {exc}",
                )
                entry.state.turns.append(turn)
                return turn

        return run_with_deadline(entry, work)

    @app.post("/sessions/{session_id}/disambiguate")
    def post_disambiguate(session_id: str, body: dict):
        snapshot = current_snapshot()
        entry = session_entry(session_id)
        if entry.state.pending is None:
            raise ApiError(404, "no_pending", "this session has no pending disambiguation")
        candidate_id = body.get("candidate_id")
        known = {c.vertex_id for c in entry.state.pending.candidates}
        if candidate_id not in known:
            raise ApiError(400, "unknown_candidate", f"candidate must be one of {sorted(known)}")
        overrides = body.get("overrides") or None

        def work():
            return snapshot.pipeline.resume_with_candidate(entry.state, candidate_id, overrides)

        return run_with_deadline(entry, work)

    @app.get("/health")
    def health():
        snapshot = state.snapshot
        if snapshot is None:
            return {"status": "loading"}
        return {
            "status": "ready",
            "vertices": snapshot.vertex_count,
            "edges": snapshot.edge_count,
            "seed_pairs": snapshot.seed_pair_count,
        }

    @app.get("/metrics")
    def metrics():
        return state.metrics.to_dict()

    @app.post("/admin/reload")
    def reload():
        try:
            load_now()
        except Exception as exc:
            raise ApiError(503, "reload_failed", f"keeping previous snapshot: {exc}")
        snapshot = current_snapshot()
        return {
            "status": "reloaded",
            "vertices": snapshot.vertex_count,
            "edges": snapshot.edge_count,
            "seed_pairs": snapshot.seed_pair_count,
        }

    if config.ui_dir and Path(config.ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app
