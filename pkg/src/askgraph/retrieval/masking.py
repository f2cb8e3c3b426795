"""Company-mention masking: replace indexed entity names with a placeholder.

Masking makes retrieval match question intent instead of entity names:
questions that differ only in which company they mention produce identical
masked text. Matching is longest-match, left-to-right, non-overlapping,
against the graph's name index after normalization. Person names are never
masked.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from askgraph.graphstore.graph import PropertyGraph
from askgraph.graphstore.names import normalize_name

COMPANY_PLACEHOLDER = "[COMPANY]"

COMPANY_LABEL = "company"


@dataclass(frozen=True)
class Mention:
    surface: str
    span: tuple[int, int]  # character range in the original text
    resolved_vertex: str | None = None

    def to_dict(self) -> dict:
        return {
            "surface": self.surface,
            "span": list(self.span),
            "resolved_vertex": self.resolved_vertex,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "Mention":
        return cls(
            surface=raw["surface"],
            span=tuple(raw["span"]),
            resolved_vertex=raw.get("resolved_vertex"),
        )


@dataclass(frozen=True)
class MaskedQuery:
    masked_text: str
    mentions: tuple[Mention, ...] = ()

    def to_dict(self) -> dict:
        return {
            "masked_text": self.masked_text,
            "mentions": [m.to_dict() for m in self.mentions],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "MaskedQuery":
        return cls(
            masked_text=raw["masked_text"],
            mentions=tuple(Mention.from_dict(m) for m in raw.get("mentions", ())),
        )


def _is_word_char(ch: str) -> bool:
    # ASCII alphanumerics split words; CJK text carries no such boundaries
    return ch.isascii() and ch.isalnum()


def _company_names(graph: PropertyGraph) -> set[str]:
    names = set()
    for norm, ids in graph.name_index.exact.items():
        if any(graph.vertices[vid].label == COMPANY_LABEL for vid in ids):
            names.add(norm)
    return names


def mask(question: str, graph: PropertyGraph) -> MaskedQuery:
    """Replace every indexed company-name occurrence with the placeholder."""
    names = _company_names(graph)
    if not names:
        return MaskedQuery(masked_text=question)
    max_len = max(len(n) for n in names) + 16  # slack for punctuation/whitespace

    n = len(question)
    mentions: list[Mention] = []
    pieces: list[str] = []
    cursor = 0
    i = 0
    while i < n:
        ch = question[i]
        if ch.isspace() or not (i == 0 or not _is_word_char(question[i - 1])):
            i += 1
            continue
        match_end = None
        resolved = None
        upper = min(n, i + max_len)
        for j in range(upper, i, -1):
            if j < n and _is_word_char(question[j]):
                continue  # would split a word
            window = question[i:j]
            if window != window.strip():
                continue
            if normalize_name(window) in names:
                match_end = j
                break
        if match_end is None:
            i += 1
            continue
        surface = question[i:match_end]
        ids = graph.lookup_exact(surface)
        company_ids = [vid for vid in ids if graph.vertices[vid].label == COMPANY_LABEL]
        resolved = company_ids[0] if len(company_ids) == 1 else None
        mentions.append(Mention(surface=surface, span=(i, match_end), resolved_vertex=resolved))
        pieces.append(question[cursor:i])
        pieces.append(COMPANY_PLACEHOLDER)
        cursor = match_end
        i = match_end
    pieces.append(question[cursor:])
    return MaskedQuery(masked_text="".join(pieces), mentions=tuple(mentions))
