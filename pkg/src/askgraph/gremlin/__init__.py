"""Lexer, parser, validator, interpreter, and complexity scorer for the
Gremlin subset used by the generation pipeline."""

from askgraph.gremlin.ast import (
    AnonTraversal,
    Ident,
    Literal,
    Predicate,
    Step,
    Traversal,
    pretty,
)
from askgraph.gremlin.issues import GremlinSyntaxError, IssueKind, ValidationIssue
from askgraph.gremlin.parser import parse
from askgraph.gremlin.catalog import (
    EXECUTABLE_STEPS,
    OPERATOR_POINTS,
    PARSE_ONLY_OPS,
    SUPPORTED_STEPS,
    UNSCORED_STEPS,
)
from askgraph.gremlin.complexity import ComplexityReport, complexity
from askgraph.gremlin.validator import validate
from askgraph.gremlin.interpreter import (
    ElementRef,
    ExecutionLimits,
    ResultSet,
    execute,
    freeze_value,
)

__all__ = [
    "AnonTraversal",
    "Ident",
    "Literal",
    "Predicate",
    "Step",
    "Traversal",
    "pretty",
    "GremlinSyntaxError",
    "IssueKind",
    "ValidationIssue",
    "parse",
    "EXECUTABLE_STEPS",
    "OPERATOR_POINTS",
    "PARSE_ONLY_OPS",
    "SUPPORTED_STEPS",
    "UNSCORED_STEPS",
    "ComplexityReport",
    "complexity",
    "validate",
    "ElementRef",
    "ExecutionLimits",
    "ResultSet",
    "execute",
    "freeze_value",
]
