"""The loaded property graph: vertices, edges, adjacency, and ingestion.

A PropertyGraph is strictly immutable after load; reload and swap to mutate.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from askgraph.errors import IngestParseError, SchemaViolation
from askgraph.graphstore.names import NameIndex
from askgraph.graphstore.schema import GraphSchema, LabelDef, load_schema

_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}([T ].*)?$")


@dataclass(frozen=True)
class Vertex:
    id: str
    label: str
    props: dict

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Vertex)
            and (self.id, self.label, self.props) == (other.id, other.label, other.props)
        )

    def __hash__(self) -> int:
        return hash(("vertex", self.id))


@dataclass(frozen=True)
class Edge:
    id: str
    label: str
    src: str
    dst: str
    props: dict

    def __eq__(self, other) -> bool:
        return isinstance(other, Edge) and (
            self.id,
            self.label,
            self.src,
            self.dst,
            self.props,
        ) == (other.id, other.label, other.src, other.dst, other.props)

    def __hash__(self) -> int:
        return hash(("edge", self.id))


def _check_prop_value(owner_id: str, label_def: LabelDef, name: str, value) -> None:
    prop = label_def.property(name)
    if prop is None:
        raise SchemaViolation(owner_id, f"property {name!r} not declared for label {label_def.name!r}")
    kind = prop.value_kind
    if kind == "string":
        ok = isinstance(value, str)
    elif kind == "integer":
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif kind == "decimal":
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif kind == "date":
        ok = isinstance(value, str) and bool(_DATE_RE.match(value))
    else:  # list-of-string
        ok = isinstance(value, list) and all(isinstance(v, str) for v in value)
    if not ok:
        raise SchemaViolation(owner_id, f"property {name!r} does not match kind {kind!r}: {value!r}")
    if prop.enum_values is not None:
        allowed = {stored for stored, _ in prop.enum_values}
        if value not in allowed:
            raise SchemaViolation(owner_id, f"property {name!r} value {value!r} not in enum {sorted(allowed)}")


@dataclass
class PropertyGraph:
    schema: GraphSchema
    vertices: dict[str, Vertex] = field(default_factory=dict)
    edges: dict[str, Edge] = field(default_factory=dict)
    out_adj: dict[str, tuple[str, ...]] = field(default_factory=dict)
    in_adj: dict[str, tuple[str, ...]] = field(default_factory=dict)
    name_index: NameIndex = field(default_factory=NameIndex)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PropertyGraph)
            and self.schema == other.schema
            and self.vertices == other.vertices
            and self.edges == other.edges
        )

    # -- reads --------------------------------------------------------------

    def vertex_ids(self) -> list[str]:
        return sorted(self.vertices)

    def edge_ids(self) -> list[str]:
        return sorted(self.edges)

    def out_edges(self, vertex_id: str, labels: tuple[str, ...] = ()) -> list[Edge]:
        edges = [self.edges[eid] for eid in self.out_adj.get(vertex_id, ())]
        if labels:
            edges = [e for e in edges if e.label in labels]
        return edges

    def in_edges(self, vertex_id: str, labels: tuple[str, ...] = ()) -> list[Edge]:
        edges = [self.edges[eid] for eid in self.in_adj.get(vertex_id, ())]
        if labels:
            edges = [e for e in edges if e.label in labels]
        return edges

    def lookup_exact(self, name: str) -> list[str]:
        return self.name_index.lookup_exact(name)

    def lookup_fuzzy(self, fragment: str, threshold: float = 0.4, limit: int = 10):
        return self.name_index.lookup_fuzzy(fragment, threshold, limit)

    def display_name(self, vertex_id: str) -> str:
        v = self.vertices[vertex_id]
        name = v.props.get("name", vertex_id)
        city = v.props.get("city")
        return f"{name} ({city})" if city else str(name)


def _read_jsonl(path: str) -> list[tuple[int, dict]]:
    rows: list[tuple[int, dict]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestParseError(path, lineno, str(exc)) from exc
            if not isinstance(obj, dict):
                raise IngestParseError(path, lineno, "expected a JSON object")
            rows.append((lineno, obj))
    return rows


def load_graph(schema_file: str, nodes_file: str, edges_file: str) -> PropertyGraph:
    """Ingest schema + JSON-lines node/edge files into an immutable graph.

    Every vertex and edge is checked against the schema; referential
    integrity is verified exhaustively after load. Raises SchemaViolation or
    IngestParseError on bad input. Line order of the input files does not
    affect the result.
    """
    schema = load_schema(schema_file)
    graph = PropertyGraph(schema=schema)

    for lineno, obj in _read_jsonl(nodes_file):
        try:
            vid = str(obj["id"])
            label = str(obj["label"])
            props = obj.get("props", {})
        except KeyError as exc:
            raise IngestParseError(nodes_file, lineno, f"missing field {exc}") from exc
        label_def = schema.label(label)
        if label_def is None or label_def.kind != "vertex":
            raise SchemaViolation(vid, f"unknown vertex label {label!r}")
        if vid in graph.vertices:
            raise SchemaViolation(vid, "duplicate vertex id")
        for name, value in props.items():
            _check_prop_value(vid, label_def, name, value)
        graph.vertices[vid] = Vertex(id=vid, label=label, props=dict(props))

    out_adj: dict[str, list[str]] = {}
    in_adj: dict[str, list[str]] = {}
    for lineno, obj in _read_jsonl(edges_file):
        try:
            eid = str(obj["id"])
            label = str(obj["label"])
            src = str(obj["src"])
            dst = str(obj["dst"])
            props = obj.get("props", {})
        except KeyError as exc:
            raise IngestParseError(edges_file, lineno, f"missing field {exc}") from exc
        defs = schema.edge_defs(label)
        if not defs:
            raise SchemaViolation(eid, f"unknown edge label {label!r}")
        if eid in graph.edges:
            raise SchemaViolation(eid, "duplicate edge id")
        if src not in graph.vertices:
            raise SchemaViolation(eid, f"src vertex {src!r} does not exist")
        if dst not in graph.vertices:
            raise SchemaViolation(eid, f"dst vertex {dst!r} does not exist")
        src_label = graph.vertices[src].label
        dst_label = graph.vertices[dst].label
        if not any(d.src_label == src_label and d.dst_label == dst_label for d in defs):
            raise SchemaViolation(
                eid,
                f"edge {label!r} connects {src_label} -> {dst_label}, "
                f"schema declares {[(d.src_label, d.dst_label) for d in defs]}",
            )
        label_def = schema.label(label)
        if props:
            if label_def is None or label_def.kind != "edge":
                raise SchemaViolation(eid, f"edge label {label!r} declares no properties")
            for name, value in props.items():
                _check_prop_value(eid, label_def, name, value)
        graph.edges[eid] = Edge(id=eid, label=label, src=src, dst=dst, props=dict(props))
        out_adj.setdefault(src, []).append(eid)
        in_adj.setdefault(dst, []).append(eid)

    # adjacency sorted by edge id for deterministic traversal order
    graph.out_adj = {vid: tuple(sorted(eids)) for vid, eids in out_adj.items()}
    graph.in_adj = {vid: tuple(sorted(eids)) for vid, eids in in_adj.items()}

    # exhaustive referential integrity pass
    for edge in graph.edges.values():
        if edge.src not in graph.vertices or edge.dst not in graph.vertices:
            raise SchemaViolation(edge.id, "dangling edge endpoint")

    for vid in sorted(graph.vertices):
        name = graph.vertices[vid].props.get("name")
        if isinstance(name, str):
            graph.name_index.add(name, vid)
    return graph
