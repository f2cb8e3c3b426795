"""Seed-pair repository, the four matching strategies, and the vector index.

The index stores one embedding per pair, computed from the raw or masked
question per the strategy's stored-side rule. Lookup masks the incoming
query per the strategy's query-side rule. Exhaustive cosine scan: at desk
scale (<= 10^4 pairs) exactness beats approximate search and keeps the
brute-force oracle property meaningful.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from askgraph.errors import StrategyMismatch
from askgraph.graphstore.graph import PropertyGraph
from askgraph.retrieval.embedding import EmbeddingVector, default_embedder
from askgraph.retrieval.masking import mask


class MatchStrategy(str, enum.Enum):
    RAW_MATCH = "raw_match"
    EVAL_MASK = "eval_mask"
    REP_MASK = "rep_mask"
    FULL_MASK = "full_mask"

    @property
    def masks_query(self) -> bool:
        return self in (MatchStrategy.EVAL_MASK, MatchStrategy.FULL_MASK)

    @property
    def masks_stored(self) -> bool:
        return self in (MatchStrategy.REP_MASK, MatchStrategy.FULL_MASK)


@dataclass(frozen=True)
class ExamplePair:
    id: str
    question: str
    script: str
    provenance: str = "manual"  # manual | graph2nl | feedback
    created_at: str = ""

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "question": self.question,
            "script": self.script,
            "provenance": self.provenance,
        }
        if self.created_at:
            out["created_at"] = self.created_at
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "ExamplePair":
        return cls(
            id=str(raw["id"]),
            question=raw["question"],
            script=raw["script"],
            provenance=raw.get("provenance", "manual"),
            created_at=raw.get("created_at", ""),
        )


@dataclass(frozen=True)
class VectorIndex:
    strategy: MatchStrategy
    dims: int
    pairs: tuple[ExamplePair, ...]
    vectors: dict[str, EmbeddingVector]  # pair id -> stored-side embedding


def _stored_text(pair: ExamplePair, strategy: MatchStrategy, graph: PropertyGraph) -> str:
    return mask(pair.question, graph).masked_text if strategy.masks_stored else pair.question


def _query_text(query: str, strategy: MatchStrategy, graph: PropertyGraph) -> str:
    return mask(query, graph).masked_text if strategy.masks_query else query


def build_index(
    pairs: list[ExamplePair],
    strategy: MatchStrategy,
    graph: PropertyGraph,
    embedder=default_embedder,
) -> VectorIndex:
    """Embed the stored side of every pair. Order-insensitive and rebuildable."""
    vectors = {
        pair.id: embedder(_stored_text(pair, strategy, graph))
        for pair in sorted(pairs, key=lambda p: p.id)
    }
    return VectorIndex(
        strategy=strategy,
        dims=embedder.dims,
        pairs=tuple(sorted(pairs, key=lambda p: p.id)),
        vectors=vectors,
    )


def top_k(
    query: str,
    k: int,
    strategy: MatchStrategy,
    index: VectorIndex,
    graph: PropertyGraph,
    embedder=default_embedder,
) -> list[tuple[ExamplePair, float]]:
    """The k best-matching pairs by cosine, ties broken by pair id ascending."""
    if k < 1:
        return []
    if index.strategy != strategy:
        raise StrategyMismatch(
            f"index was built with {index.strategy.value}, queried with {strategy.value}"
        )
    query_vec = embedder(_query_text(query, strategy, graph))
    scored = []
    for pair in index.pairs:
        score = 0.0
        for x, y in zip(query_vec.values, index.vectors[pair.id].values):
            score += x * y
        scored.append((pair, score))
    scored.sort(key=lambda item: (-item[1], item[0].id))
    return scored[:k]


def brute_force_top_k(
    query: str,
    k: int,
    strategy: MatchStrategy,
    pairs: list[ExamplePair],
    graph: PropertyGraph,
    embedder=default_embedder,
) -> list[tuple[ExamplePair, float]]:
    """Test oracle: exhaustive cosine directly over the pairs, no index.

    Recomputes every stored-side embedding from scratch; must equal top_k
    exactly.
    """
    if k < 1:
        return []
    query_vec = embedder(_query_text(query, strategy, graph))
    results: list[tuple[ExamplePair, float]] = []
    for pair in pairs:
        stored_vec = embedder(_stored_text(pair, strategy, graph))
        dot = 0.0
        for i in range(len(query_vec.values)):
            dot += query_vec.values[i] * stored_vec.values[i]
        results.append((pair, dot))
    results.sort(key=lambda item: (-item[1], item[0].id))
    return results[:k]


# -- files --------------------------------------------------------------------


def load_seed_pairs(path: str) -> list[ExamplePair]:
    pairs: list[ExamplePair] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                pairs.append(ExamplePair.from_dict(json.loads(line)))
    return pairs


def save_seed_pairs(path: str, pairs: list[ExamplePair]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair.to_dict(), ensure_ascii=False) + "\n")


def dump_index(index: VectorIndex, path: str) -> None:
    payload = {
        "strategy": index.strategy.value,
        "dims": index.dims,
        "entries": [
            {"id": pair.id, "vector": index.vectors[pair.id].to_list()}
            for pair in index.pairs
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_index(path: str, pairs: list[ExamplePair]) -> VectorIndex:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    by_id = {pair.id: pair for pair in pairs}
    vectors = {}
    kept = []
    for entry in payload["entries"]:
        pair = by_id.get(entry["id"])
        if pair is None:
            continue
        vectors[pair.id] = EmbeddingVector(
            dims=payload["dims"], values=tuple(entry["vector"])
        )
        kept.append(pair)
    return VectorIndex(
        strategy=MatchStrategy(payload["strategy"]),
        dims=payload["dims"],
        pairs=tuple(sorted(kept, key=lambda p: p.id)),
        vectors=vectors,
    )
