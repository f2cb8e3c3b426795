"""Text-generation backends: a scripted mock for tests and evaluation, and
an OpenAI-compatible HTTP chat client for real deployments."""

from __future__ import annotations

import json
import os
import re
import time
from dataclasses import dataclass, field

import requests

from askgraph.errors import BackendUnreachable, NoScriptFound, TimedOut, UnmatchedPrompt


@dataclass(frozen=True)
class LlmRequest:
    prompt: str
    tag: str = ""  # prompt template name
    temperature: float = 0.0
    max_tokens: int = 1024


@dataclass(frozen=True)
class LlmResponse:
    text: str
    backend_id: str
    latency_ms: float


@dataclass
class MockRule:
    """One canned behavior: matches on tag and/or prompt substrings.

    `responses` is consumed front-to-back on repeated matches; a rule with a
    single `response` matches any number of times. `delay_s` simulates
    backend latency for timeout tests.
    """

    response: str | None = None
    responses: list[str] = field(default_factory=list)
    tag: str | None = None
    contains: list[str] = field(default_factory=list)
    delay_s: float = 0.0

    def matches(self, req: LlmRequest) -> bool:
        if self.tag is not None and req.tag != self.tag:
            return False
        if any(needle not in req.prompt for needle in self.contains):
            return False
        if self.response is None and not self.responses:
            return False
        return True

    def consume(self) -> str:
        if self.responses:
            return self.responses.pop(0)
        return self.response  # type: ignore[return-value]

    @classmethod
    def from_dict(cls, raw: dict) -> "MockRule":
        contains = raw.get("contains", [])
        if isinstance(contains, str):
            contains = [contains]
        return cls(
            response=raw.get("response"),
            responses=list(raw.get("responses", [])),
            tag=raw.get("tag"),
            contains=list(contains),
            delay_s=float(raw.get("delay_s", 0.0)),
        )


class ScriptedMock:
    """Deterministic backend: first matching rule wins, unmatched prompts fail loudly."""

    backend_id = "mock"

    def __init__(self, rules: list[MockRule]):
        self.rules = list(rules)
        self.calls: list[LlmRequest] = []

    @classmethod
    def from_file(cls, path: str) -> "ScriptedMock":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls([MockRule.from_dict(r) for r in raw])

    def generate(self, req: LlmRequest) -> str:
        self.calls.append(req)
        for rule in self.rules:
            if rule.matches(req):
                if rule.delay_s:
                    time.sleep(rule.delay_s)
                return rule.consume()
        raise UnmatchedPrompt(
            f"no mock rule matches tag={req.tag!r}; prompt starts: {req.prompt[:120]!r}"
        )

    def calls_tagged(self, tag: str) -> list[LlmRequest]:
        return [c for c in self.calls if c.tag == tag]


@dataclass
class HttpChat:
    """OpenAI-compatible chat completion endpoint; bearer auth from an env var."""

    endpoint: str
    model: str
    auth_env_var: str = ""
    timeout_s: float = 60.0
    backend_id: str = "http"

    def generate(self, req: LlmRequest) -> str:
        headers = {"Content-Type": "application/json"}
        if self.auth_env_var:
            token = os.environ.get(self.auth_env_var, "")
            if token:
                headers["Authorization"] = f"Bearer {token}"
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": req.prompt}],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        try:
            resp = requests.post(self.endpoint, json=body, headers=headers, timeout=self.timeout_s)
        except requests.Timeout as exc:
            raise TimedOut(f"backend timed out after {self.timeout_s}s") from exc
        except requests.RequestException as exc:
            raise BackendUnreachable(str(exc)) from exc
        if resp.status_code != 200:
            raise BackendUnreachable(f"backend returned HTTP {resp.status_code}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise BackendUnreachable(f"malformed backend response: {exc}") from exc


def complete(req: LlmRequest, backend) -> LlmResponse:
    """Run one completion; records latency, response text is non-empty."""
    started = time.monotonic()
    text = backend.generate(req)
    latency_ms = (time.monotonic() - started) * 1000.0
    if not text or not text.strip():
        raise BackendUnreachable("backend returned empty text")
    return LlmResponse(text=text, backend_id=backend.backend_id, latency_ms=latency_ms)


_FENCE_RE = re.compile(r"```[a-zA-Z]*\n(.*?)```", re.DOTALL)
_INLINE_RE = re.compile(r"(?:^|[\s:;,>])(g\..*)$")


def extract_script(response_text: str) -> str:
    """Pull the script out of LLM prose.

    Prefers the first code-fenced block; otherwise takes the first line
    carrying a `g.` chain, from `g.` to the end of the line. The result is
    not guaranteed to parse; downstream validation decides.
    """
    fence = _FENCE_RE.search(response_text)
    if fence:
        block = fence.group(1).strip()
        if block:
            return block.splitlines()[0].strip() if "\n" not in block else block.strip()
    for line in response_text.splitlines():
        stripped = line.strip()
        if stripped.startswith("g."):
            return stripped
        inline = _INLINE_RE.search(line)
        if inline:
            return inline.group(1).strip()
    raise NoScriptFound("no fenced block or g. line in backend response")
