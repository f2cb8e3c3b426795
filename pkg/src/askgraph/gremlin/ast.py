"""Traversal AST and its canonical single-line rendering.

A traversal is `g` followed by a V()/E() source and a chain of steps. Step
arguments are literals, bare order tokens, predicates, or nested anonymous
traversals. `parse(pretty(t))` is structurally equal to `t`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

Scalar = Union[str, int, float, bool]


@dataclass(frozen=True)
class Literal:
    value: Scalar


@dataclass(frozen=True)
class Ident:
    """Bare identifier argument, e.g. the sort tokens asc / desc."""

    name: str


@dataclass(frozen=True)
class Predicate:
    op: str  # eq | neq | gt | gte | lt | lte | within | without
    args: tuple[Scalar, ...]


@dataclass(frozen=True)
class AnonTraversal:
    steps: tuple["Step", ...]


Arg = Union[Literal, Ident, Predicate, AnonTraversal]


@dataclass(frozen=True)
class Step:
    op: str
    args: tuple[Arg, ...] = ()


@dataclass(frozen=True)
class Traversal:
    source: str  # "V" or "E"
    source_args: tuple[Literal, ...] = ()
    steps: tuple[Step, ...] = ()


_ESCAPES = {"\\": "\\\\", "'": "\\'", "\n": "\\n", "\t": "\\t", "\r": "\\r"}


def _quote(text: str) -> str:
    return "'" + "".join(_ESCAPES.get(ch, ch) for ch in text) + "'"


def _render_scalar(value: Scalar) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return _quote(value)
    return repr(value)


def _render_arg(arg: Arg) -> str:
    if isinstance(arg, Literal):
        return _render_scalar(arg.value)
    if isinstance(arg, Ident):
        return arg.name
    if isinstance(arg, Predicate):
        inner = ",".join(_render_scalar(v) for v in arg.args)
        return f"{arg.op}({inner})"
    return ".".join(_render_step(s) for s in arg.steps)


def _render_step(step: Step) -> str:
    return f"{step.op}({','.join(_render_arg(a) for a in step.args)})"


def pretty(t: Traversal) -> str:
    """Canonical single-line rendering: no spaces, single-quoted strings."""
    source_args = ",".join(_render_scalar(a.value) for a in t.source_args)
    parts = [f"g.{t.source}({source_args})"]
    parts.extend(_render_step(s) for s in t.steps)
    return ".".join(parts)


def walk_steps(steps: tuple[Step, ...]):
    """Yield every step, depth-first, including those inside anonymous traversals."""
    for step in steps:
        yield step
        for arg in step.args:
            if isinstance(arg, AnonTraversal):
                yield from walk_steps(arg.steps)
