"""Entity-name normalization, trigram fuzzy matching, and the name index.

Replaces the external recall service with a deterministic in-process index:
an exact map over normalized names plus a character-trigram index scored by
Jaccard similarity. Adequate for CJK and Latin names at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from askgraph.errors import InvalidThreshold

# Punctuation that company names commonly vary on ("Co., Ltd." vs "Co Ltd").
_STRIP_CHARS = ".,()（）·'\""

_PUNCT_TABLE = {ord(c): " " for c in _STRIP_CHARS}

DEFAULT_FUZZY_THRESHOLD = 0.4
DEFAULT_FUZZY_LIMIT = 10


def normalize_name(text: str) -> str:
    """Casefold, replace listed punctuation with spaces, collapse whitespace.

    Idempotent: normalize(normalize(x)) == normalize(x).
    """
    folded = text.casefold().translate(_PUNCT_TABLE)
    return " ".join(folded.split())


def trigrams(text: str) -> frozenset[str]:
    """Character trigrams of a string; short strings yield themselves."""
    if len(text) < 3:
        return frozenset({text}) if text else frozenset()
    return frozenset(text[i : i + 3] for i in range(len(text) - 2))


def jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    if not a or not b:
        return 0.0
    inter = len(a & b)
    if inter == 0:
        return 0.0
    return inter / len(a | b)


@dataclass
class NameIndex:
    """Exact and trigram lookup over vertex names."""

    exact: dict[str, list[str]] = field(default_factory=dict)
    trigram_names: dict[str, set[str]] = field(default_factory=dict)

    def add(self, name: str, vertex_id: str) -> None:
        norm = normalize_name(name)
        if not norm:
            return
        ids = self.exact.setdefault(norm, [])
        if vertex_id not in ids:
            ids.append(vertex_id)
            ids.sort()
        for gram in trigrams(norm):
            self.trigram_names.setdefault(gram, set()).add(norm)

    def lookup_exact(self, name: str) -> list[str]:
        """All vertex ids whose normalized name equals the normalized input, id-ascending."""
        return list(self.exact.get(normalize_name(name), ()))

    def lookup_fuzzy(
        self,
        fragment: str,
        threshold: float = DEFAULT_FUZZY_THRESHOLD,
        limit: int = DEFAULT_FUZZY_LIMIT,
    ) -> list[tuple[str, float]]:
        """(vertex id, score) pairs with trigram-Jaccard score >= threshold.

        Sorted by (score descending, id ascending), at most `limit` entries.
        """
        if not 0 < threshold <= 1:
            raise InvalidThreshold(f"threshold must be in (0, 1], got {threshold}")
        frag_grams = trigrams(normalize_name(fragment))
        candidates: set[str] = set()
        for gram in frag_grams:
            candidates |= self.trigram_names.get(gram, set())
        scored: list[tuple[str, float]] = []
        for norm in candidates:
            score = jaccard(frag_grams, trigrams(norm))
            if score >= threshold:
                for vid in self.exact[norm]:
                    scored.append((vid, score))
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
        return scored[:limit]

    def normalized_names(self) -> set[str]:
        return set(self.exact)
