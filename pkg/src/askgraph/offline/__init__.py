"""Offline loop: seed-pair synthesis from graph templates, failed-query
regeneration, and the file-based human-review workflow."""

from askgraph.offline.graph2nl import (
    DEFAULT_TEMPLATES,
    Graph2NlTemplate,
    synthesize_pairs,
)
from askgraph.offline.review import (
    ReviewItem,
    import_approved,
    load_review_file,
    regenerate_failures,
    save_review_file,
)

__all__ = [
    "DEFAULT_TEMPLATES",
    "Graph2NlTemplate",
    "synthesize_pairs",
    "ReviewItem",
    "import_approved",
    "load_review_file",
    "regenerate_failures",
    "save_review_file",
]
