from __future__ import annotations

import random

import pytest

from askgraph.errors import StrategyMismatch
from askgraph.retrieval import (
    ExamplePair,
    MatchStrategy,
    brute_force_top_k,
    build_index,
    dump_index,
    load_index,
    load_seed_pairs,
    top_k,
)


@pytest.fixture(scope="module")
def pairs(seed_pairs_path):
    return load_seed_pairs(seed_pairs_path)


@pytest.fixture(scope="module")
def case_study_pairs(pairs):
    return [p for p in pairs if p.id <= "s10"]


def test_shipped_seed_scripts_validate_against_schema(graph, schema, pairs):
    from askgraph.gremlin import parse, validate

    for pair in pairs:
        traversal = parse(pair.script)
        assert validate(traversal, schema) == [], pair.id


def test_empty_index_returns_nothing(graph):
    idx = build_index([], MatchStrategy.FULL_MASK, graph)
    assert top_k("anything at all", 5, MatchStrategy.FULL_MASK, idx, graph) == []


def test_rep_mask_stores_masked_side(graph, pairs):
    idx = build_index(pairs, MatchStrategy.REP_MASK, graph)
    raw_idx = build_index(pairs, MatchStrategy.RAW_MATCH, graph)
    # stored vectors differ because the stored questions were masked
    assert idx.vectors["s01"] != raw_idx.vectors["s01"]


def test_self_query_ranks_first_with_unit_score(graph, pairs):
    # exact round trip holds when the strategy masks both sides or neither
    for strategy in (MatchStrategy.RAW_MATCH, MatchStrategy.FULL_MASK):
        for pair in pairs:
            idx = build_index(pairs, strategy, graph)
            best, score = top_k(pair.question, 1, strategy, idx, graph)[0]
            assert score == pytest.approx(1.0, abs=1e-6)
            assert best.question == pair.question or best.id == pair.id


def test_k_larger_than_store(graph, pairs):
    idx = build_index(pairs, MatchStrategy.FULL_MASK, graph)
    hits = top_k("Who is the boss of Baidu?", 999, MatchStrategy.FULL_MASK, idx, graph)
    assert len(hits) == len(pairs)
    scores = [s for _, s in hits]
    assert scores == sorted(scores, reverse=True)


def test_strategy_mismatch_rejected(graph, pairs):
    idx = build_index(pairs, MatchStrategy.FULL_MASK, graph)
    with pytest.raises(StrategyMismatch):
        top_k("anything", 3, MatchStrategy.RAW_MATCH, idx, graph)


def test_reindex_after_append_keeps_previous_entries(graph, pairs):
    idx = build_index(pairs, MatchStrategy.FULL_MASK, graph)
    extended = pairs + [ExamplePair("zz-new", "Brand new question?", "g.V().count()")]
    idx2 = build_index(extended, MatchStrategy.FULL_MASK, graph)
    assert set(idx.vectors) <= set(idx2.vectors)
    for pair_id in idx.vectors:
        assert idx.vectors[pair_id] == idx2.vectors[pair_id]


def test_index_build_is_order_insensitive(graph, pairs):
    shuffled = list(pairs)
    random.Random(3).shuffle(shuffled)
    a = build_index(pairs, MatchStrategy.FULL_MASK, graph)
    b = build_index(shuffled, MatchStrategy.FULL_MASK, graph)
    assert a == b


def test_index_dump_restore_round_trip(graph, pairs, tmp_path):
    idx = build_index(pairs, MatchStrategy.FULL_MASK, graph)
    path = tmp_path / "index.json"
    dump_index(idx, str(path))
    restored = load_index(str(path), list(pairs))
    query = "Who are the executives of Baidu?"
    assert [p.id for p, _ in top_k(query, 5, MatchStrategy.FULL_MASK, restored, graph)] == [
        p.id for p, _ in top_k(query, 5, MatchStrategy.FULL_MASK, idx, graph)
    ]


# -- oracle equivalence --------------------------------------------------------


def _random_pairs(rng: random.Random, count: int) -> list[ExamplePair]:
    subjects = ["boss", "postal code", "website", "executives", "phone number", "capital"]
    entities = ["Baidu", "Acme", "World Kitchen (Shanghai) Co., Ltd.", "an unknown startup"]
    templates = [
        "Who is the {s} of {e}?",
        "What is the {s} of {e}?",
        "{e} {s} details",
        "Tell me about the {s} of {e} please",
    ]
    out = []
    for i in range(count):
        template = rng.choice(templates)
        text = template.format(s=rng.choice(subjects), e=rng.choice(entities))
        out.append(ExamplePair(f"r{i:04d}", text, "g.V().count()"))
    return out


def test_top_k_equals_brute_force_oracle(graph):
    rng = random.Random(99)
    for trial in range(100):
        store = _random_pairs(rng, rng.randint(1, 30))
        strategy = rng.choice(list(MatchStrategy))
        idx = build_index(store, strategy, graph)
        for _ in range(20):
            query = rng.choice(_random_pairs(rng, 1)).question
            for k in (3, 5):
                fast = top_k(query, k, strategy, idx, graph)
                slow = brute_force_top_k(query, k, strategy, store, graph)
                assert [p.id for p, _ in fast] == [p.id for p, _ in slow]
                assert [s for _, s in fast] == [s for _, s in slow]


def test_brute_force_empty_store(graph):
    assert brute_force_top_k("anything", 3, MatchStrategy.RAW_MATCH, [], graph) == []


def test_brute_force_singleton(graph):
    store = [ExamplePair("only", "Who is the boss of Baidu?", "g.V().count()")]
    hits = brute_force_top_k("unrelated words entirely", 1, MatchStrategy.RAW_MATCH, store, graph)
    assert [p.id for p, _ in hits] == ["only"]


# -- masking invariance ----------------------------------------------------------


COMPANY_NAMES = [
    "Baidu",
    "Acme",
    "Guizhou Zhixun Tongchuang Technology Co.",
    "Linyi Juyun Trading Co., Ltd.",
    "Binzhou Binxin Entertainment Network Technology Co., Ltd.",
    "World Kitchen (Shanghai) Co., Ltd.",
    "Huajing Entertainment Technology Co., Ltd.",
]

QUERY_TEMPLATES = [
    "Who is the boss of {e}?",
    "What is the postal code of {e}?",
    "Who are the executives of {e}?",
    "When was {e} established?",
    "What is the website of {e}?",
    "Contact details for {e}",
    "Is {e} still operating?",
    "List the investors of {e}",
]


def test_full_mask_entity_substitution_invariance(graph, case_study_pairs):
    from askgraph.retrieval import default_embedder, mask

    idx = build_index(case_study_pairs, MatchStrategy.FULL_MASK, graph)
    rng = random.Random(7)
    checked = 0
    while checked < 200:
        template = rng.choice(QUERY_TEMPLATES)
        base_entity, other_entity = rng.sample(COMPANY_NAMES, 2)
        query_a = template.format(e=base_entity)
        query_b = template.format(e=other_entity)
        masked_a = mask(query_a, graph).masked_text
        masked_b = mask(query_b, graph).masked_text
        assert masked_a == masked_b
        assert default_embedder(masked_a) == default_embedder(masked_b)
        ids_a = [p.id for p, _ in top_k(query_a, 5, MatchStrategy.FULL_MASK, idx, graph)]
        ids_b = [p.id for p, _ in top_k(query_b, 5, MatchStrategy.FULL_MASK, idx, graph)]
        assert ids_a == ids_b
        checked += 1


def test_raw_match_lacks_substitution_invariance(graph, case_study_pairs):
    idx = build_index(case_study_pairs, MatchStrategy.RAW_MATCH, graph)
    query_a = "Who are the executives of Binzhou Binxin Entertainment Network Technology Co., Ltd.?"
    query_b = "Who are the executives of Baidu?"
    top_a = top_k(query_a, 1, MatchStrategy.RAW_MATCH, idx, graph)[0][0].id
    top_b = top_k(query_b, 1, MatchStrategy.RAW_MATCH, idx, graph)[0][0].id
    assert top_a != top_b  # entity text drags retrieval toward entity-similar pairs


def test_case_study_full_mask_retrieves_intent_matched_five(graph, case_study_pairs):
    idx = build_index(case_study_pairs, MatchStrategy.FULL_MASK, graph)
    query = "Who are the executives of Binzhou Binxin Entertainment Network Technology Co., Ltd.?"
    ids = [p.id for p, _ in top_k(query, 5, MatchStrategy.FULL_MASK, idx, graph)]
    assert sorted(ids) == ["s01", "s02", "s03", "s04", "s05"]


def test_case_study_raw_match_fails_to(graph, case_study_pairs):
    idx = build_index(case_study_pairs, MatchStrategy.RAW_MATCH, graph)
    query = "Who are the executives of Binzhou Binxin Entertainment Network Technology Co., Ltd.?"
    ids = [p.id for p, _ in top_k(query, 5, MatchStrategy.RAW_MATCH, idx, graph)]
    assert sorted(ids) != ["s01", "s02", "s03", "s04", "s05"]
    # the entity-similar but intent-unrelated question wins under raw matching
    assert ids[0] == "s06"
