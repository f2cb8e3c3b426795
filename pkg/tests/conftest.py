from __future__ import annotations

import json
from pathlib import Path

import pytest

from askgraph.graphstore import load_graph

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def graph():
    return load_graph(
        str(FIXTURES / "schema.json"),
        str(FIXTURES / "nodes.jsonl"),
        str(FIXTURES / "edges.jsonl"),
    )


@pytest.fixture(scope="session")
def schema(graph):
    return graph.schema


@pytest.fixture(scope="session")
def seed_pairs_path() -> Path:
    return FIXTURES / "seed_pairs.jsonl"


def load_jsonl(path: Path) -> list[dict]:
    rows = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            rows.append(json.loads(line))
    return rows
