"""Seed-example repository: entity masking, embeddings, and top-k matching."""

from askgraph.retrieval.masking import COMPANY_PLACEHOLDER, MaskedQuery, Mention, mask
from askgraph.retrieval.embedding import (
    DEFAULT_DIMS,
    EmbeddingVector,
    HashedTrigramEmbedder,
    cosine,
    default_embedder,
)
from askgraph.retrieval.store import (
    ExamplePair,
    MatchStrategy,
    VectorIndex,
    brute_force_top_k,
    build_index,
    dump_index,
    load_index,
    load_seed_pairs,
    save_seed_pairs,
    top_k,
)

__all__ = [
    "COMPANY_PLACEHOLDER",
    "MaskedQuery",
    "Mention",
    "mask",
    "DEFAULT_DIMS",
    "EmbeddingVector",
    "HashedTrigramEmbedder",
    "cosine",
    "default_embedder",
    "ExamplePair",
    "MatchStrategy",
    "VectorIndex",
    "brute_force_top_k",
    "build_index",
    "dump_index",
    "load_index",
    "load_seed_pairs",
    "save_seed_pairs",
    "top_k",
]
