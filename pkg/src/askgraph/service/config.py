"""Service configuration: one TOML or JSON file, env vars for secrets only."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from askgraph.llm.backends import HttpChat, ScriptedMock
from askgraph.pipeline.state import PipelineConfig


def load_config_file(path: str) -> dict:
    text = Path(path).read_bytes()
    if str(path).endswith(".toml"):
        try:
            import tomllib  # Python >= 3.11
        except ModuleNotFoundError:
            import tomli as tomllib
        return tomllib.loads(text.decode("utf-8"))
    return json.loads(text)


@dataclass(frozen=True)
class ServiceConfig:
    schema_file: str
    nodes_file: str
    edges_file: str
    seed_pairs_file: str
    host: str = "127.0.0.1"
    port: int = 8080
    prompt_catalog_dir: str | None = None
    backend: dict = field(default_factory=lambda: {"kind": "mock", "rules": None})
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    request_deadline_ms: int = 30_000
    ui_dir: str | None = None

    def __post_init__(self) -> None:
        if self.request_deadline_ms < 1000:
            raise ValueError("request_deadline_ms must be >= 1000")
        for path in (self.schema_file, self.nodes_file, self.edges_file, self.seed_pairs_file):
            if not os.path.exists(path):
                raise FileNotFoundError(path)
        if self.prompt_catalog_dir and not os.path.isdir(self.prompt_catalog_dir):
            raise FileNotFoundError(self.prompt_catalog_dir)

    @classmethod
    def from_dict(cls, raw: dict) -> "ServiceConfig":
        graph = raw.get("graph", {})
        listen = raw.get("listen", {})
        return cls(
            schema_file=graph["schema"],
            nodes_file=graph["nodes"],
            edges_file=graph["edges"],
            seed_pairs_file=raw["seed_pairs"],
            host=listen.get("host", "127.0.0.1"),
            port=int(listen.get("port", 8080)),
            prompt_catalog_dir=raw.get("prompt_catalog"),
            backend=raw.get("backend", {"kind": "mock", "rules": None}),
            pipeline=PipelineConfig.from_dict(raw.get("pipeline", {})),
            request_deadline_ms=int(raw.get("request_deadline_ms", 30_000)),
            ui_dir=raw.get("ui_dir"),
        )

    @classmethod
    def from_file(cls, path: str) -> "ServiceConfig":
        return cls.from_dict(load_config_file(path))


def build_backend(spec: dict):
    kind = spec.get("kind", "mock")
    if kind == "mock":
        rules = spec.get("rules")
        if rules:
            return ScriptedMock.from_file(rules)
        return ScriptedMock([])
    if kind == "http":
        return HttpChat(
            endpoint=spec["endpoint"],
            model=spec["model"],
            auth_env_var=spec.get("auth_env_var", ""),
            timeout_s=float(spec.get("timeout_s", 60.0)),
        )
    raise ValueError(f"unknown backend kind {kind!r}")
