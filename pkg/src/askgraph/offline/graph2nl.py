"""Question synthesis from script templates and live graph data.

Cold-start path: fill typed holes (entity, property, label) from the graph,
keep only instantiations whose script validates and returns a non-empty
result on the source graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from askgraph.errors import TemplateExhausted
from askgraph.graphstore.graph import PropertyGraph
from askgraph.gremlin.interpreter import execute
from askgraph.gremlin.parser import parse
from askgraph.gremlin.validator import validate
from askgraph.retrieval.store import ExamplePair


@dataclass(frozen=True)
class Graph2NlTemplate:
    intent: str
    question: str  # holes: {entity}, {property}, {label}
    script: str  # same hole set as question
    entity_label: str = "company"

    def holes(self) -> set[str]:
        import string

        names = set()
        for text in (self.question, self.script):
            for _, hole, _, _ in string.Formatter().parse(text):
                if hole:
                    names.add(hole)
        return names

    def __post_init__(self) -> None:
        import string

        q_holes = {h for _, h, _, _ in string.Formatter().parse(self.question) if h}
        s_holes = {h for _, h, _, _ in string.Formatter().parse(self.script) if h}
        if q_holes != s_holes:
            raise ValueError(
                f"template {self.intent!r}: question holes {q_holes} != script holes {s_holes}"
            )


def _prop_template(intent: str, question: str, prop: str) -> Graph2NlTemplate:
    return Graph2NlTemplate(
        intent=intent,
        question=question,
        script="g.V().has('company','name','{entity}').values('" + prop + "')",
    )


DEFAULT_TEMPLATES: tuple[Graph2NlTemplate, ...] = (
    _prop_template("postal_code", "What is the postal code of {entity}?", "postalCode"),
    _prop_template("website", "What is the website of {entity}?", "website"),
    _prop_template("phone", "What is the phone number of {entity}?", "phone"),
    _prop_template("email", "What is the email address of {entity}?", "email"),
    _prop_template("address", "What is the registered address of {entity}?", "registrationAddress"),
    _prop_template("established", "When was {entity} established?", "establishmentDate"),
    _prop_template("capital", "What is the registered capital of {entity}?", "registeredCapital"),
    _prop_template("status", "What is the operating status of {entity}?", "operatingStatus"),
    _prop_template("industry", "Which industry does {entity} belong to?", "industry"),
    _prop_template("city", "Which city is {entity} located in?", "city"),
    _prop_template("province", "Which province is {entity} located in?", "province"),
    Graph2NlTemplate(
        intent="profile",
        question="What is {entity}?",
        script=(
            "g.V().has('company','name','{entity}').valueMap('name','description','industry',"
            "'city','province','establishmentDate','listingDate','listingStatus',"
            "'operatingStatus','email','phone','registrationAddress','website')"
        ),
    ),
    Graph2NlTemplate(
        intent="legal_rep",
        question="Who is the legal representative of {entity}?",
        script="g.V().has('company','name','{entity}').in('legalPerson').values('name')",
    ),
    Graph2NlTemplate(
        intent="legal_rep_identity",
        question="Could you provide the identity information of the legal representative of {entity}?",
        script="g.V().has('company','name','{entity}').in('legalPerson').valueMap()",
    ),
    Graph2NlTemplate(
        intent="executives",
        question="Who are the executives of {entity}?",
        script=(
            "g.V().has('company','name','{entity}').inE('serve').as('a').outV().as('b')"
            ".project('name','position').by(select('b').values('name'))"
            ".by(select('a').values('position'))"
        ),
    ),
    Graph2NlTemplate(
        intent="executive_count",
        question="How many executives does {entity} have?",
        script="g.V().has('company','name','{entity}').in('serve').count()",
    ),
    Graph2NlTemplate(
        intent="person_investors",
        question="Which individuals have invested in {entity}?",
        script="g.V().has('company','name','{entity}').in('personInvest').values('name').fold()",
    ),
    Graph2NlTemplate(
        intent="investment_count",
        question="How many companies has {entity} invested in?",
        script="g.V().has('company','name','{entity}').out('companyInvest').count()",
    ),
    Graph2NlTemplate(
        intent="investments",
        question="Which companies has {entity} invested in?",
        script="g.V().has('company','name','{entity}').out('companyInvest').values('name').fold()",
    ),
    Graph2NlTemplate(
        intent="beneficiaries",
        question="Who are the ultimate beneficiaries of {entity}?",
        script="g.V().has('company','name','{entity}').in('finalBeneficiaryPerson').values('name').fold()",
    ),
    Graph2NlTemplate(
        intent="property_lookup",
        question="What is the {property} of {entity}?",
        script="g.V().has('company','name','{entity}').values('{property}')",
    ),
)

# scalar value lookups used by the {property} hole
_PROPERTY_HOLE_VALUES = ("postalCode", "website", "phone", "industry")


def _escape(value: str) -> str:
    return value.replace("\\", "\\\\").replace("'", "\\'")


def _instantiations(template: Graph2NlTemplate, graph: PropertyGraph):
    entities = [
        str(graph.vertices[vid].props["name"])
        for vid in graph.vertex_ids()
        if graph.vertices[vid].label == template.entity_label
        and "name" in graph.vertices[vid].props
    ]
    holes = template.holes()
    for entity in entities:
        if "property" in holes:
            for prop in _PROPERTY_HOLE_VALUES:
                yield {"entity": entity, "property": prop}
        elif holes == {"entity"}:
            yield {"entity": entity}


def _meaningful(rows: list) -> bool:
    if not rows:
        return False
    # a lone zero count or an empty fold result answers nothing
    if rows == [0] or rows == [[]]:
        return False
    return True


def synthesize_pairs(
    graph: PropertyGraph,
    templates: tuple[Graph2NlTemplate, ...] = DEFAULT_TEMPLATES,
    n: int = 20,
    id_prefix: str = "g2nl",
) -> list[ExamplePair]:
    """Round-robin over templates, keeping instantiations that execute to a
    non-empty result; raises TemplateExhausted when n cannot be met."""
    if n <= 0:
        return []
    queues = []
    for template in templates:
        queues.append((template, list(_instantiations(template, graph))))
    pairs: list[ExamplePair] = []
    serial = 0
    progressed = True
    while len(pairs) < n and progressed:
        progressed = False
        for template, queue in queues:
            if len(pairs) >= n:
                break
            while queue:
                binding = queue.pop(0)
                safe = {k: _escape(v) for k, v in binding.items()}
                script = template.script.format(**safe)
                traversal = parse(script)
                if validate(traversal, graph.schema):
                    continue
                rows = execute(traversal, graph).to_rows()
                if not _meaningful(rows):
                    continue
                question = template.question.format(**binding)
                serial += 1
                pairs.append(
                    ExamplePair(
                        id=f"{id_prefix}-{serial:04d}",
                        question=question,
                        script=script,
                        provenance="graph2nl",
                    )
                )
                progressed = True
                break
    if len(pairs) < n:
        raise TemplateExhausted(
            f"only {len(pairs)} of {n} pairs could be synthesized from the graph"
        )
    return pairs
