from __future__ import annotations

import json

import pytest

from askgraph.errors import TemplateExhausted
from askgraph.gremlin import execute, parse, validate
from askgraph.llm import MockRule, ScriptedMock
from askgraph.offline import (
    DEFAULT_TEMPLATES,
    Graph2NlTemplate,
    ReviewItem,
    import_approved,
    load_review_file,
    regenerate_failures,
    save_review_file,
    synthesize_pairs,
)
from askgraph.pipeline import Pipeline, PipelineConfig
from askgraph.retrieval import load_seed_pairs


def test_default_template_catalog_size():
    assert len(DEFAULT_TEMPLATES) == 21
    assert {t.intent for t in DEFAULT_TEMPLATES} >= {
        "postal_code",
        "legal_rep",
        "executives",
        "investments",
        "beneficiaries",
        "website",
    }


def test_template_holes_must_match():
    with pytest.raises(ValueError):
        Graph2NlTemplate(
            intent="bad",
            question="What is the {property} of {entity}?",
            script="g.V().has('company','name','{entity}').count()",
        )


def test_postal_template_fill(graph):
    template = DEFAULT_TEMPLATES[0]
    pairs = synthesize_pairs(graph, (template,), n=1)
    assert pairs[0].question == "What is the postal code of Baidu?"
    assert pairs[0].script == "g.V().has('company','name','Baidu').values('postalCode')"
    assert pairs[0].provenance == "graph2nl"


def test_synthesize_zero_returns_empty(graph):
    assert synthesize_pairs(graph, n=0) == []


def test_synthesized_scripts_validate_and_return_rows(graph, schema):
    pairs = synthesize_pairs(graph, n=25)
    assert len(pairs) == 25
    for pair in pairs:
        traversal = parse(pair.script)
        assert validate(traversal, schema) == []
        assert execute(traversal, graph).rows


def test_template_without_instances_exhausts(graph):
    lonely = Graph2NlTemplate(
        intent="impossible",
        question="Who knows the people of {entity}?",
        script="g.V().has('company','name','{entity}').in('personInvest').out('knows').values('name')",
    )
    # only one personInvest edge exists and its investor knows someone, so
    # requesting more pairs than instances must exhaust
    with pytest.raises(TemplateExhausted):
        synthesize_pairs(graph, (lonely,), n=5)


def test_escaped_entity_names_round_trip(graph):
    # "World Kitchen (Shanghai) Co., Ltd." carries parens; the filled script must parse
    website = next(t for t in DEFAULT_TEMPLATES if t.intent == "website")
    pairs = synthesize_pairs(graph, (website,), n=5)
    targets = [p for p in pairs if "World Kitchen" in p.question]
    assert targets
    for pair in targets:
        parse(pair.script)


# -- regeneration -------------------------------------------------------------------


REGEN_RULES = [
    MockRule(tag="decision", response="answerable"),
    MockRule(tag="schema_link", response="company, person, legalPerson"),
    MockRule(
        tag="gremlin_gen",
        contains=["legal representative of [COMPANY]?"],
        response="g.V().has('company','name','[COMPANY]').in('legalPerson').values('name')",
    ),
    MockRule(tag="gremlin_gen", response="g.V().has('company','name','[COMPANY]').valueMap()"),
]


def _failure_file(tmp_path, rows):
    path = tmp_path / "failures.jsonl"
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))
    return str(path)


def test_regenerate_produces_pending_items(graph, seed_pairs_path, tmp_path):
    pipeline = Pipeline(graph, load_seed_pairs(seed_pairs_path), ScriptedMock(REGEN_RULES))
    path = _failure_file(
        tmp_path,
        [
            {
                "case_id": "q23",
                "strategy": "raw_match",
                "k": 3,
                "script": "g.V().has('company','name','Baidu'",
                "failure_kind": "parse",
            }
        ],
    )
    items = regenerate_failures(path, pipeline, {"q23": "Who is the legal representative of Baidu?"})
    assert len(items) == 1
    item = items[0]
    assert item.status == "pending"
    assert item.regenerated_script == (
        "g.V().has('company','name','Baidu').in('legalPerson').values('name')"
    )
    assert validate(parse(item.regenerated_script), graph.schema) == []


def test_regenerate_empty_failure_file(graph, seed_pairs_path, tmp_path):
    pipeline = Pipeline(graph, load_seed_pairs(seed_pairs_path), ScriptedMock(REGEN_RULES))
    path = _failure_file(tmp_path, [])
    assert regenerate_failures(path, pipeline, {}) == []


def test_regenerate_still_failing_carries_both_kinds(graph, seed_pairs_path, tmp_path):
    broken_rules = [
        MockRule(tag="decision", response="answerable"),
        MockRule(tag="schema_link", response="company"),
        MockRule(tag="gremlin_gen", response="g.V().values('noSuchProp')"),
        MockRule(tag="reflection", response="g.V().values('noSuchProp')"),
    ]
    pipeline = Pipeline(graph, load_seed_pairs(seed_pairs_path), ScriptedMock(broken_rules))
    path = _failure_file(
        tmp_path,
        [{"case_id": "c1", "script": "g.V(", "failure_kind": "parse"}],
    )
    items = regenerate_failures(path, pipeline, {"c1": "What is the postal code of Baidu?"})
    assert items[0].failure_kind == "parse"
    assert items[0].regenerated_issues  # still failing validation
    assert any("UnknownProperty" in issue for issue in items[0].regenerated_issues)


# -- review import -------------------------------------------------------------------


def _review_items():
    good = "g.V().has('company','name','Baidu').values('website')"
    return [
        ReviewItem(
            id="fb-1", question="Website of Baidu?", failed_script=None,
            failure_kind="parse", regenerated_script=good, status="approved",
        ),
        ReviewItem(
            id="fb-2", question="Phone of Baidu?", failed_script=None,
            failure_kind="parse",
            regenerated_script="g.V().has('company','name','Baidu').values('phone')",
            status="approved",
        ),
        ReviewItem(
            id="fb-3", question="Pending question", failed_script=None,
            failure_kind="parse", regenerated_script=good, status="pending",
        ),
    ]


def test_import_approved_grows_store_by_approved_only(graph, seed_pairs_path, tmp_path):
    pairs = load_seed_pairs(seed_pairs_path)
    review = tmp_path / "review.jsonl"
    save_review_file(str(review), _review_items())
    updated, errors = import_approved(str(review), pairs, graph)
    assert len(updated) == len(pairs) + 2
    assert errors == []
    imported = {p.id: p for p in updated if p.provenance == "feedback"}
    assert set(imported) == {"fb-1", "fb-2"}


def test_import_is_idempotent(graph, seed_pairs_path, tmp_path):
    pairs = load_seed_pairs(seed_pairs_path)
    review = tmp_path / "review.jsonl"
    save_review_file(str(review), _review_items())
    once, _ = import_approved(str(review), pairs, graph)
    twice, _ = import_approved(str(review), once, graph)
    assert [p.id for p in twice] == [p.id for p in once]


def test_invalid_approved_item_blocks_only_itself(graph, seed_pairs_path, tmp_path):
    items = _review_items()
    items[0].regenerated_script = "g.V().values('noSuchProp')"
    review = tmp_path / "review.jsonl"
    save_review_file(str(review), items)
    updated, errors = import_approved(str(review), load_seed_pairs(seed_pairs_path), graph)
    assert [e[0] for e in errors] == ["fb-1"]
    assert any(p.id == "fb-2" for p in updated)
    assert not any(p.id == "fb-1" for p in updated)


def test_review_file_round_trip(tmp_path):
    items = _review_items()
    path = tmp_path / "review.jsonl"
    save_review_file(str(path), items)
    loaded = load_review_file(str(path))
    assert [i.to_dict() for i in loaded] == [i.to_dict() for i in items]


def test_feedback_provenance_traces_to_approved_items(graph, seed_pairs_path, tmp_path):
    pairs = load_seed_pairs(seed_pairs_path)
    review = tmp_path / "review.jsonl"
    items = _review_items()
    save_review_file(str(review), items)
    updated, _ = import_approved(str(review), pairs, graph)
    approved_ids = {i.id for i in items if i.status == "approved"}
    for pair in updated:
        if pair.provenance == "feedback":
            assert pair.id in approved_ids
