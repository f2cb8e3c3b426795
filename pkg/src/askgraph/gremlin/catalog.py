"""Operator catalog: complexity points and execution class per operator.

Three point classes: basic operations (1), simple aggregation (2), advanced
operations (3). `hasLabel` is scored with the `has` family. Steps outside
the catalog (`as`, `limit`, `valueMap`, edge-hop variants) score 0 points
and make the scorer emit a warning.
"""

from __future__ import annotations

OPERATOR_POINTS: dict[str, int] = {
    # basic operations
    "has": 1,
    "out": 1,
    "in": 1,
    "values": 1,
    "by": 1,
    "label": 1,
    "id": 1,
    "V()": 1,
    "E()": 1,
    "hasLabel": 1,
    # simple aggregation
    "groupCount": 2,
    "fold": 2,
    "select": 2,
    "order": 2,
    "dedup": 2,
    "count": 2,
    "sum": 2,
    "min": 2,
    "max": 2,
    "mean": 2,
    # advanced operations
    "repeat": 3,
    "times": 3,
    "where": 3,
    "path": 3,
    "choose": 3,
    "coalesce": 3,
    "union": 3,
    "project": 3,
    "branch": 3,
    "match": 3,
}

# Operators that parse and score but have no interpreter support.
PARSE_ONLY_OPS: frozenset[str] = frozenset({"choose", "branch", "match"})

# Executable steps required by the script corpus that the catalog does not price.
UNSCORED_STEPS: frozenset[str] = frozenset(
    {"outE", "inE", "outV", "inV", "valueMap", "as", "limit"}
)

SUPPORTED_STEPS: frozenset[str] = (
    frozenset(OPERATOR_POINTS) - {"V()", "E()"}
) | UNSCORED_STEPS

EXECUTABLE_STEPS: frozenset[str] = SUPPORTED_STEPS - PARSE_ONLY_OPS

PREDICATE_NAMES: frozenset[str] = frozenset(
    {"eq", "neq", "gt", "gte", "lt", "lte", "within", "without"}
)

SORT_ORDER_NAMES: frozenset[str] = frozenset({"asc", "desc"})
