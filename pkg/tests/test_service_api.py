from __future__ import annotations

import json
import random
import threading
import time

import pytest
from fastapi.testclient import TestClient

from askgraph.llm import MockRule, ScriptedMock
from askgraph.service import ServiceConfig, create_app

CONFIG_PATH = "fixtures/service_config.json"


@pytest.fixture(scope="module")
def config():
    return ServiceConfig.from_file(CONFIG_PATH)


@pytest.fixture()
def client(config):
    app = create_app(config)
    with TestClient(app) as c:
        yield c


def _new_session(client) -> str:
    resp = client.post("/sessions")
    assert resp.status_code == 201
    return resp.json()["session_id"]


def test_create_session_distinct_unguessable_ids(client):
    a = _new_session(client)
    b = _new_session(client)
    assert a != b
    assert len(a) == 32


def test_sessions_rejected_while_loading(config):
    app = create_app(config, defer_load=True)
    with TestClient(app) as c:
        resp = c.post("/sessions")
        assert resp.status_code == 503
        assert resp.json()["error"]["code"] == "loading"
        assert c.get("/health").json() == {"status": "loading"}
        app.state.load_now()
        assert c.post("/sessions").status_code == 201


def test_happy_path_message(client):
    sid = _new_session(client)
    resp = client.post(
        f"/sessions/{sid}/messages",
        json={"text": "What is the postal code of Guizhou Zhixun Tongchuang Technology Co.?"},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["final_script"].endswith(".values('postalCode')")
    assert body["result"] == ["550081"]
    assert body["answer_text"].endswith("is 550081.")
    assert body["decision"] == "answerable"
    assert body["trace_id"]
    assert body["truncated"] is False


def test_unknown_session_404(client):
    resp = client.post("/sessions/nope/messages", json={"text": "hi"})
    assert resp.status_code == 404
    assert resp.json()["error"]["code"] == "unknown_session"


def test_empty_text_400(client):
    sid = _new_session(client)
    resp = client.post(f"/sessions/{sid}/messages", json={"text": "   "})
    assert resp.status_code == 400


def test_disambiguation_round_trip(client):
    sid = _new_session(client)
    first = client.post(
        f"/sessions/{sid}/messages", json={"text": "What is the postal code of Acme?"}
    )
    assert first.status_code == 200
    body = first.json()
    assert body["decision"] == "needs_clarification"
    candidates = body["candidates"]
    assert [c["vertex_id"] for c in candidates] == ["c06", "c07"]

    second = client.post(
        f"/sessions/{sid}/disambiguate", json={"candidate_id": candidates[0]["vertex_id"]}
    )
    assert second.status_code == 200
    resumed = second.json()
    assert resumed["result"] == ["100080"]
    assert resumed["answer_text"] == "The postal code of Acme is 100080."


def test_disambiguate_without_pending_404(client):
    sid = _new_session(client)
    resp = client.post(f"/sessions/{sid}/disambiguate", json={"candidate_id": "c06"})
    assert resp.status_code == 404
    assert resp.json()["error"]["code"] == "no_pending"


def test_disambiguate_unknown_candidate_400(client):
    sid = _new_session(client)
    client.post(f"/sessions/{sid}/messages", json={"text": "What is the postal code of Acme?"})
    resp = client.post(f"/sessions/{sid}/disambiguate", json={"candidate_id": "c99"})
    assert resp.status_code == 400
    assert resp.json()["error"]["code"] == "unknown_candidate"


def test_concurrent_message_to_same_session_409(config):
    slow_rules = [
        MockRule(tag="decision", contains=["SLOWCASE"], delay_s=0.6, response="answerable"),
        MockRule(tag="decision", response="answerable"),
        MockRule(tag="schema_link", response="company"),
        MockRule(tag="gremlin_gen", response="g.V().count()"),
        MockRule(tag="summarize", response="done"),
    ]
    app = create_app(config, backend=ScriptedMock(slow_rules))
    with TestClient(app) as client:
        sid = _new_session(client)
        statuses: dict[str, int] = {}

        def slow():
            statuses["slow"] = client.post(
                f"/sessions/{sid}/messages", json={"text": "SLOWCASE question"}
            ).status_code

        thread = threading.Thread(target=slow)
        thread.start()
        time.sleep(0.2)
        statuses["second"] = client.post(
            f"/sessions/{sid}/messages", json={"text": "quick question"}
        ).status_code
        thread.join()
    assert statuses["slow"] == 200
    assert statuses["second"] == 409


def test_deadline_returns_504(config):
    from dataclasses import replace

    slow_rules = [
        MockRule(tag="decision", delay_s=1.6, response="answerable"),
        MockRule(tag="schema_link", response="company"),
        MockRule(tag="gremlin_gen", response="g.V().count()"),
    ]
    tight = replace(config, request_deadline_ms=1000)
    app = create_app(tight, backend=ScriptedMock(slow_rules))
    with TestClient(app) as client:
        sid = _new_session(client)
        resp = client.post(f"/sessions/{sid}/messages", json={"text": "anything"})
        assert resp.status_code == 504
        assert resp.json()["error"]["code"] == "deadline"


def test_health_and_metrics(client):
    health = client.get("/health").json()
    assert health["status"] == "ready"
    assert health["vertices"] > 0
    before = client.get("/metrics").json()["turns_total"]
    sid = _new_session(client)
    client.post(f"/sessions/{sid}/messages", json={"text": "What is the postal code of Baidu?"})
    after = client.get("/metrics").json()["turns_total"]
    assert after == before + 1


def test_reload_swaps_snapshot(client):
    resp = client.post("/admin/reload")
    assert resp.status_code == 200
    assert resp.json()["status"] == "reloaded"


def test_failed_reload_keeps_serving(tmp_path, monkeypatch):
    own_config = ServiceConfig.from_file(CONFIG_PATH)  # private copy, safe to mutate
    app = create_app(own_config)
    with TestClient(app) as client:
        sid = _new_session(client)
        # point the config at a broken schema file and attempt a reload
        broken = tmp_path / "broken_schema.json"
        broken.write_text("{not json")
        object.__setattr__(app.state.config, "schema_file", str(broken))
        resp = client.post("/admin/reload")
        assert resp.status_code == 503
        assert resp.json()["error"]["code"] == "reload_failed"
        # the old snapshot still answers
        ok = client.post(
            f"/sessions/{sid}/messages",
            json={"text": "What is the postal code of Baidu?"},
        )
        assert ok.status_code == 200
        assert ok.json()["result"] == ["100085"]


def test_fuzzed_bodies_never_500(config):
    rules = [
        MockRule(tag="decision", response="answerable"),
        MockRule(tag="schema_link", response="company"),
        MockRule(tag="gremlin_gen", response="g.V().has('company','name','[COMPANY]').valueMap()"),
        MockRule(tag="summarize", response="summary"),
        MockRule(tag="anaphora", response="same"),
    ]
    app = create_app(config, backend=ScriptedMock(rules))
    rng = random.Random(13)
    alphabet = "abcXYZ ?!.'\"()[]{}\\/:;,0123456789企业\U0001f600\n\t"
    with TestClient(app) as client:
        sid = _new_session(client)
        for _ in range(25):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 60)))
            resp = client.post(f"/sessions/{sid}/messages", json={"text": text})
            assert resp.status_code in (200, 400), text
            if resp.status_code == 200:
                assert resp.json()["answer_text"]


def test_degraded_backend_still_structured_answer(config):
    app = create_app(config, backend=ScriptedMock([]))  # every LLM call fails
    with TestClient(app) as client:
        sid = _new_session(client)
        resp = client.post(f"/sessions/{sid}/messages", json={"text": "Who runs Baidu?"})
        assert resp.status_code == 200
        body = resp.json()
        assert body["decision"] == "needs_clarification"
        assert body["answer_text"]


def test_result_rows_capped_with_flag(config, monkeypatch):
    import askgraph.service.app as service_app

    monkeypatch.setattr(service_app, "RESULT_ROW_CAP", 2)
    rules = [
        MockRule(tag="decision", response="answerable"),
        MockRule(tag="schema_link", response="company"),
        MockRule(tag="gremlin_gen", response="g.V().hasLabel('company').values('name')"),
        MockRule(tag="summarize", response="many companies"),
    ]
    app = create_app(config, backend=ScriptedMock(rules))
    with TestClient(app) as client:
        sid = _new_session(client)
        resp = client.post(f"/sessions/{sid}/messages", json={"text": "List every company name"})
        body = resp.json()
        assert body["truncated"] is True
        assert len(body["result"]) == 2


def test_ui_served_statically_when_built(client, config):
    import os

    if not (config.ui_dir and os.path.isdir(config.ui_dir)):
        pytest.skip("frontend not built")
    resp = client.get("/ui/")
    assert resp.status_code == 200
    assert "<html" in resp.text


def test_turn_order_preserved_within_session(client):
    sid = _new_session(client)
    answers = []
    for text in (
        "What is the postal code of Baidu?",
        "What is the website of Baidu?",
        "What is the phone number of Baidu?",
    ):
        answers.append(client.post(f"/sessions/{sid}/messages", json={"text": text}).json())
    assert answers[0]["result"] == ["100085"]
    assert answers[1]["result"] == ["https://www.baidu.example"]
    assert answers[2]["result"] == ["010-59928888"]
