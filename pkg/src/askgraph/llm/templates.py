"""Prompt catalog: one text file per template with front-matter slots.

Rendering is pure substitution of {{slot}} markers; a rendered prompt never
contains unbound markers, and empty slot values render as an explicit
"(none)" rather than an invisible hole.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from askgraph.errors import MissingSlot

TEMPLATE_NAMES = ("anaphora", "decision", "schema_link", "gremlin_gen", "reflection", "summarize")

_SLOT_RE = re.compile(r"\{\{([a-z_]+)\}\}")


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    template: str
    required_slots: tuple[str, ...]

    def render(self, slots: dict[str, str]) -> str:
        for slot in self.required_slots:
            if slot not in slots or slots[slot] is None:
                raise MissingSlot(slot, self.name)

        def substitute(match: re.Match) -> str:
            value = str(slots.get(match.group(1), ""))
            return value if value.strip() else "(none)"

        rendered = _SLOT_RE.sub(substitute, self.template)
        leftover = _SLOT_RE.search(rendered)
        if leftover:  # a slot value smuggled in a marker
            raise MissingSlot(leftover.group(1), self.name)
        return rendered


def _parse_template(name: str, text: str) -> PromptTemplate:
    body = text
    slots: tuple[str, ...] = ()
    if text.startswith("---"):
        _, header, body = text.split("---", 2)
        for line in header.strip().splitlines():
            key, _, value = line.partition(":")
            if key.strip() == "required_slots":
                slots = tuple(s.strip() for s in value.split(",") if s.strip())
        body = body.lstrip("\n")
    return PromptTemplate(name=name, template=body, required_slots=slots)


class PromptCatalog:
    def __init__(self, templates: dict[str, PromptTemplate]):
        self._templates = dict(templates)

    def get(self, name: str) -> PromptTemplate:
        if name not in self._templates:
            raise KeyError(f"no prompt template named {name!r}")
        return self._templates[name]

    def render(self, name: str, slots: dict[str, str]) -> str:
        return self.get(name).render(slots)

    def names(self) -> list[str]:
        return sorted(self._templates)


def load_catalog(directory: str | Path | None = None) -> PromptCatalog:
    """Load templates from a directory, or the packaged defaults."""
    templates: dict[str, PromptTemplate] = {}
    if directory is not None:
        for path in sorted(Path(directory).glob("*.txt")):
            templates[path.stem] = _parse_template(path.stem, path.read_text(encoding="utf-8"))
    else:
        package = resources.files("askgraph.llm") / "prompts"
        for entry in sorted(package.iterdir(), key=lambda e: e.name):
            if entry.name.endswith(".txt"):
                name = entry.name[: -len(".txt")]
                templates[name] = _parse_template(name, entry.read_text(encoding="utf-8"))
    return PromptCatalog(templates)
