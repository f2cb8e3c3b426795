"""Validation issue records shared by the parser and the validator."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from askgraph.errors import AskGraphError


class IssueKind(str, enum.Enum):
    SYNTAX = "Syntax"
    UNKNOWN_LABEL = "UnknownLabel"
    UNKNOWN_PROPERTY = "UnknownProperty"
    WRONG_EDGE_DIRECTION = "WrongEdgeDirection"
    UNSUPPORTED_OPERATOR = "UnsupportedOperator"
    ARITY_ERROR = "ArityError"


@dataclass(frozen=True)
class ValidationIssue:
    kind: IssueKind
    message: str
    location: int | None = None  # step index, source V()/E() is -1
    offset: int | None = None  # source character offset, syntax issues only

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "message": self.message,
            "location": self.location,
            "offset": self.offset,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ValidationIssue":
        return cls(
            kind=IssueKind(raw["kind"]),
            message=raw["message"],
            location=raw.get("location"),
            offset=raw.get("offset"),
        )


class GremlinSyntaxError(AskGraphError):
    """Raised by the parser; carries a Syntax ValidationIssue with the offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.issue = ValidationIssue(kind=IssueKind.SYNTAX, message=message, offset=offset)
        self.offset = offset
