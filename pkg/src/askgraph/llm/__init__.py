"""Uniform interface to text-generation backends plus the prompt catalog."""

from askgraph.llm.templates import PromptCatalog, PromptTemplate, load_catalog
from askgraph.llm.backends import (
    HttpChat,
    LlmRequest,
    LlmResponse,
    MockRule,
    ScriptedMock,
    complete,
    extract_script,
)

__all__ = [
    "PromptCatalog",
    "PromptTemplate",
    "load_catalog",
    "HttpChat",
    "LlmRequest",
    "LlmResponse",
    "MockRule",
    "ScriptedMock",
    "complete",
    "extract_script",
]
