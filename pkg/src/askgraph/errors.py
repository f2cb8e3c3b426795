"""Exception types shared across the package."""

from __future__ import annotations


class AskGraphError(Exception):
    """Base class for all package-specific errors."""


# --- graph store ---

class SchemaViolation(AskGraphError):
    def __init__(self, entity_id: str, reason: str):
        super().__init__(f"{entity_id}: {reason}")
        self.entity_id = entity_id
        self.reason = reason


class IngestParseError(AskGraphError):
    """A graph input file could not be parsed."""

    def __init__(self, file: str, line: int, reason: str):
        super().__init__(f"{file}:{line}: {reason}")
        self.file = file
        self.line = line
        self.reason = reason


class InvalidThreshold(AskGraphError):
    pass


class UnknownLabelError(AskGraphError):
    def __init__(self, label: str):
        super().__init__(f"unknown label: {label!r}")
        self.label = label


# --- gremlin engine ---

class LimitExceeded(AskGraphError):
    """An execution limit (visited elements, repeat depth, wall time) was hit."""


class RuntimeTypeError(AskGraphError):
    """A traversal step was applied to a value it cannot handle."""


# --- example store ---

class EmptyText(AskGraphError):
    pass


class StrategyMismatch(AskGraphError):
    pass


# --- llm gateway ---

class MissingSlot(AskGraphError):
    def __init__(self, slot: str, template: str):
        super().__init__(f"template {template!r} is missing required slot {slot!r}")
        self.slot = slot
        self.template = template


class BackendUnreachable(AskGraphError):
    pass


class UnmatchedPrompt(AskGraphError):
    pass


class TimedOut(AskGraphError):
    pass


class NoScriptFound(AskGraphError):
    pass


# --- offline analysis / eval ---

class TemplateExhausted(AskGraphError):
    pass


class ValidationFailed(AskGraphError):
    pass


class MissingGold(AskGraphError):
    pass


class MissingHumanScore(AskGraphError):
    pass
