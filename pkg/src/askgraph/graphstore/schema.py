"""Schema registry: governed label, property, and edge definitions.

The schema carries human-readable descriptions and enum value meanings so
that prompt construction can show the model what is actually stored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from askgraph.errors import SchemaViolation, UnknownLabelError

VALUE_KINDS = {"string", "integer", "decimal", "date", "list-of-string"}


@dataclass(frozen=True)
class PropertyDef:
    name: str
    value_kind: str
    description: str = ""
    # (stored_value, human_meaning) pairs for enumerated fields
    enum_values: tuple[tuple[str, str], ...] | None = None


@dataclass(frozen=True)
class LabelDef:
    name: str
    kind: str  # "vertex" or "edge"
    properties: tuple[PropertyDef, ...] = ()

    def property(self, name: str) -> PropertyDef | None:
        for p in self.properties:
            if p.name == name:
                return p
        return None


@dataclass(frozen=True)
class EdgeDef:
    name: str
    src_label: str
    dst_label: str
    description: str = ""


@dataclass(frozen=True)
class GraphSchema:
    labels: tuple[LabelDef, ...] = ()
    edges: tuple[EdgeDef, ...] = ()

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for label in self.labels:
            if label.kind not in ("vertex", "edge"):
                raise SchemaViolation(label.name, f"bad label kind {label.kind!r}")
            if label.name in seen:
                raise SchemaViolation(label.name, "duplicate label name")
            seen.add(label.name)
            prop_names: set[str] = set()
            for prop in label.properties:
                if prop.value_kind not in VALUE_KINDS:
                    raise SchemaViolation(
                        label.name, f"property {prop.name!r} has bad kind {prop.value_kind!r}"
                    )
                if prop.name in prop_names:
                    raise SchemaViolation(label.name, f"duplicate property {prop.name!r}")
                prop_names.add(prop.name)
                if prop.enum_values is not None and not prop.enum_values:
                    raise SchemaViolation(
                        label.name, f"property {prop.name!r} has an empty enum list"
                    )
        vertex_names = {l.name for l in self.labels if l.kind == "vertex"}
        for edge in self.edges:
            if edge.src_label not in vertex_names:
                raise SchemaViolation(edge.name, f"src label {edge.src_label!r} not declared")
            if edge.dst_label not in vertex_names:
                raise SchemaViolation(edge.name, f"dst label {edge.dst_label!r} not declared")

    # -- lookups ------------------------------------------------------------

    def label(self, name: str) -> LabelDef | None:
        for l in self.labels:
            if l.name == name:
                return l
        return None

    def vertex_label_names(self) -> set[str]:
        return {l.name for l in self.labels if l.kind == "vertex"}

    def edge_label_names(self) -> set[str]:
        return {e.name for e in self.edges}

    def edge_defs(self, name: str) -> tuple[EdgeDef, ...]:
        return tuple(e for e in self.edges if e.name == name)

    def edges_incident(self, label: str) -> tuple[EdgeDef, ...]:
        return tuple(e for e in self.edges if label in (e.src_label, e.dst_label))

    def property_declared_anywhere(self, name: str) -> bool:
        return any(l.property(name) is not None for l in self.labels)


def _parse_property(raw: dict) -> PropertyDef:
    enum = raw.get("enum_values")
    enum_t = tuple((str(v[0]), str(v[1])) for v in enum) if enum else None
    return PropertyDef(
        name=raw["name"],
        value_kind=raw["value_kind"],
        description=raw.get("description", ""),
        enum_values=enum_t,
    )


def load_schema(path: str) -> GraphSchema:
    """Load a schema file: JSON with top-level {"labels": [...], "edges": [...]}."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    labels = tuple(
        LabelDef(
            name=l["name"],
            kind=l["kind"],
            properties=tuple(_parse_property(p) for p in l.get("properties", [])),
        )
        for l in raw.get("labels", [])
    )
    edges = tuple(
        EdgeDef(
            name=e["name"],
            src_label=e["src_label"],
            dst_label=e["dst_label"],
            description=e.get("description", ""),
        )
        for e in raw.get("edges", [])
    )
    return GraphSchema(labels=labels, edges=edges)


def schema_card(schema: GraphSchema, labels: list[str]) -> str:
    """Render the selected schema slices as a deterministic text block.

    Accepts vertex labels, edge labels (with a kind=edge LabelDef), and edge
    names declared only through EdgeDefs. Pure function of (schema, labels):
    identical inputs yield byte-identical output.
    """
    lines: list[str] = []
    for name in labels:
        label_def = schema.label(name)
        defs = schema.edge_defs(name)
        if label_def is None and not defs:
            raise UnknownLabelError(name)
        if label_def is not None:
            lines.append(f"{label_def.kind} {label_def.name}:")
            if label_def.properties:
                lines.append("  properties:")
                for p in label_def.properties:
                    desc = f": {p.description}" if p.description else ""
                    lines.append(f"    {p.name} ({p.value_kind}){desc}")
                    if p.enum_values:
                        rendered = "; ".join(f"{v} = {m}" for v, m in p.enum_values)
                        lines.append(f"      values: {rendered}")
        else:
            lines.append(f"edge {name}:")
        incident = defs if defs else schema.edges_incident(name)
        if incident:
            lines.append("  edges:" if label_def is not None else "  connects:")
            for e in incident:
                desc = f"  ({e.description})" if e.description else ""
                lines.append(f"    {e.name}: {e.src_label} -> {e.dst_label}{desc}")
    return "\n".join(lines)
