"""Complexity scoring: traversal length plus per-operator points.

The step count follows period-splitting of the script: the `g` receiver and
the V()/E() source each count one segment, chained steps one each. Steps
nested in anonymous traversals contribute operator points but not length.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from askgraph.gremlin.ast import Traversal, walk_steps
from askgraph.gremlin.catalog import OPERATOR_POINTS

TIER_SIMPLE = "Simple"
TIER_MODERATE = "Moderate"
TIER_COMPLEX = "Complex"


@dataclass(frozen=True)
class ComplexityReport:
    step_count: int
    length_score: int  # 1, 2, or 3
    operator_points: int
    total: int
    tier: str
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "step_count": self.step_count,
            "length_score": self.length_score,
            "operator_points": self.operator_points,
            "total": self.total,
            "tier": self.tier,
        }


def length_score_for(step_count: int) -> int:
    if step_count < 5:
        return 1
    if step_count <= 7:
        return 2
    return 3


def tier_for(total: int) -> str:
    if total <= 4:
        return TIER_SIMPLE
    if total <= 7:
        return TIER_MODERATE
    return TIER_COMPLEX


def complexity(t: Traversal) -> ComplexityReport:
    """Score a parsed traversal. Pure function of the AST."""
    step_count = 2 + len(t.steps)  # g + source + chained steps
    length = length_score_for(step_count)
    points = OPERATOR_POINTS[f"{t.source}()"]
    warnings: list[str] = []
    for step in walk_steps(t.steps):
        op_points = OPERATOR_POINTS.get(step.op)
        if op_points is None:
            warnings.append(f"operator {step.op!r} is not in the catalog; scored 0")
        else:
            points += op_points
    total = length + points
    return ComplexityReport(
        step_count=step_count,
        length_score=length,
        operator_points=points,
        total=total,
        tier=tier_for(total),
        warnings=tuple(warnings),
    )
