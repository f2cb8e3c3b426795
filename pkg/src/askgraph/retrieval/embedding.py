"""Deterministic builtin text embeddings: hashed character-trigram bags.

The builtin backend needs no network and is bit-reproducible across runs and
platforms (FNV-1a hashing, no interpreter hash randomization). A production
deployment can swap in an external embedding endpoint: anything callable as
`embed(text) -> EmbeddingVector` with a fixed dimension plugs in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from askgraph.errors import EmptyText

DEFAULT_DIMS = 256

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK = 0xFFFFFFFFFFFFFFFF


def _fnv1a(data: bytes, seed: int) -> int:
    h = (_FNV_OFFSET ^ seed) & _MASK
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK
    return h


@dataclass(frozen=True)
class EmbeddingVector:
    dims: int
    values: tuple[float, ...]

    def to_list(self) -> list[float]:
        return list(self.values)


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity; vectors are unit-norm so this is the dot product."""
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch: {a.dims} vs {b.dims}")
    total = 0.0
    for x, y in zip(a.values, b.values):
        total += x * y
    return total


class HashedTrigramEmbedder:
    """Bag of character trigrams hashed into a fixed number of buckets."""

    def __init__(self, dims: int = DEFAULT_DIMS, seed: int = 41):
        self.dims = dims
        self.seed = seed

    def __call__(self, text: str) -> EmbeddingVector:
        if not text or not text.strip():
            raise EmptyText("cannot embed empty text")
        normalized = " ".join(text.casefold().split())
        padded = f" {normalized} "
        grams = (
            [padded[i : i + 3] for i in range(len(padded) - 2)]
            if len(padded) >= 3
            else [padded]
        )
        buckets = [0.0] * self.dims
        for gram in grams:
            h = _fnv1a(gram.encode("utf-8"), self.seed)
            sign = 1.0 if (h >> 63) & 1 == 0 else -1.0
            buckets[h % self.dims] += sign
        norm = math.sqrt(sum(v * v for v in buckets))
        if norm == 0.0:
            # all grams cancelled; fall back to a stable one-hot
            h = _fnv1a(normalized.encode("utf-8"), self.seed)
            buckets[h % self.dims] = 1.0
            norm = 1.0
        return EmbeddingVector(dims=self.dims, values=tuple(v / norm for v in buckets))


default_embedder = HashedTrigramEmbedder()
