from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from askgraph.errors import EmptyText
from askgraph.retrieval import HashedTrigramEmbedder, cosine, default_embedder


def test_embedding_is_deterministic():
    a = default_embedder("who is the boss of [COMPANY]")
    b = default_embedder("who is the boss of [COMPANY]")
    assert a == b


@given(st.text(min_size=1).filter(lambda s: s.strip()))
def test_unit_norm(text):
    vec = default_embedder(text)
    norm = math.sqrt(sum(v * v for v in vec.values))
    assert abs(norm - 1.0) <= 1e-6


def test_empty_text_rejected():
    with pytest.raises(EmptyText):
        default_embedder("")
    with pytest.raises(EmptyText):
        default_embedder("   \t ")


def test_dimension_default():
    assert default_embedder("hello").dims == 256


def test_similar_intent_scores_higher():
    anchor = default_embedder("who is the boss of [COMPANY]")
    close = default_embedder("boss of [COMPANY]")
    far = default_embedder("registered capital of [COMPANY]")
    assert cosine(anchor, close) > cosine(anchor, far)


def test_self_similarity_is_one():
    vec = default_embedder("any text at all")
    assert cosine(vec, vec) == pytest.approx(1.0, abs=1e-6)


def test_case_and_spacing_insensitive():
    a = default_embedder("Who is  the BOSS")
    b = default_embedder("who is the boss")
    assert a == b


def test_custom_dims():
    small = HashedTrigramEmbedder(dims=16)
    vec = small("short text")
    assert vec.dims == 16
    assert len(vec.values) == 16


def test_dimension_mismatch_rejected():
    a = HashedTrigramEmbedder(dims=16)("x y z")
    b = default_embedder("x y z")
    with pytest.raises(ValueError):
        cosine(a, b)
