"""Embedded single-node property graph with a governed schema registry.

Read-only at query time: a loaded graph is immutable and safe to share
across any number of concurrent readers. All mutation happens by reloading.
"""

from askgraph.graphstore.schema import (
    EdgeDef,
    GraphSchema,
    LabelDef,
    PropertyDef,
    load_schema,
    schema_card,
)
from askgraph.graphstore.names import NameIndex, normalize_name, trigrams
from askgraph.graphstore.graph import Edge, PropertyGraph, Vertex, load_graph

__all__ = [
    "EdgeDef",
    "GraphSchema",
    "LabelDef",
    "PropertyDef",
    "load_schema",
    "schema_card",
    "NameIndex",
    "normalize_name",
    "trigrams",
    "Edge",
    "PropertyGraph",
    "Vertex",
    "load_graph",
]
