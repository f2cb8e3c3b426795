"""Schema-aware static validation of parsed traversals.

Tracks the set of labels a traverser may carry through the chain and flags
unknown labels/properties, edge hops that contradict declared directions,
operators without interpreter support, and malformed argument lists. An
empty issue list is the precondition for execution.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from askgraph.graphstore.schema import GraphSchema
from askgraph.gremlin.ast import AnonTraversal, Ident, Literal, Predicate, Step, Traversal
from askgraph.gremlin.catalog import PARSE_ONLY_OPS
from askgraph.gremlin.issues import IssueKind, ValidationIssue

# value kinds a traverser can carry between steps
_VERTEX = "vertex"
_EDGE = "edge"
_VALUE = "value"
_MAP = "map"


@dataclass(frozen=True)
class _State:
    kind: str
    labels: frozenset[str] | None  # None = unknown / any


def _merge(a: _State, b: _State) -> _State:
    if a.kind != b.kind:
        return _State(_VALUE, None)
    if a.labels is None or b.labels is None:
        return _State(a.kind, None)
    return _State(a.kind, a.labels | b.labels)


class _Checker:
    def __init__(self, schema: GraphSchema):
        self.schema = schema
        self.issues: list[ValidationIssue] = []
        self.aliases: dict[str, _State] = {}
        self.vertex_labels = frozenset(schema.vertex_label_names())
        self.edge_labels = frozenset(schema.edge_label_names())

    def issue(self, kind: IssueKind, loc: int, message: str) -> None:
        self.issues.append(ValidationIssue(kind=kind, message=message, location=loc))

    # -- helpers ------------------------------------------------------------

    def _string_args(self, step: Step, loc: int, minimum: int = 0) -> list[str] | None:
        values: list[str] = []
        for arg in step.args:
            if not (isinstance(arg, Literal) and isinstance(arg.value, str)):
                self.issue(IssueKind.ARITY_ERROR, loc, f"{step.op}() takes string arguments")
                return None
            values.append(arg.value)
        if len(values) < minimum:
            self.issue(
                IssueKind.ARITY_ERROR, loc, f"{step.op}() needs at least {minimum} argument(s)"
            )
            return None
        return values

    def _check_property(self, name: str, state: _State, loc: int) -> None:
        if state.kind == _VERTEX or state.kind == _EDGE:
            if state.labels is None:
                if not self.schema.property_declared_anywhere(name):
                    self.issue(IssueKind.UNKNOWN_PROPERTY, loc, f"property {name!r} is not declared")
                return
            for label in state.labels:
                label_def = self.schema.label(label)
                if label_def is not None and label_def.property(name) is not None:
                    return
            self.issue(
                IssueKind.UNKNOWN_PROPERTY,
                loc,
                f"property {name!r} is not declared for label(s) {sorted(state.labels)}",
            )

    def _hop(self, step: Step, state: _State, loc: int) -> _State:
        """out/in/outE/inE direction checking against EdgeDefs."""
        labels = self._string_args(step, loc)
        if labels is None:
            return _State(_VALUE, None)
        if state.kind == _EDGE:
            self.issue(IssueKind.ARITY_ERROR, loc, f"{step.op}() requires vertex input")
            return _State(_VALUE, None)
        if state.kind != _VERTEX:
            state = _State(_VERTEX, None)  # unknown input, skip direction narrowing
        outgoing = step.op in ("out", "outE")
        to_edge = step.op in ("outE", "inE")
        defs = []
        for name in labels or sorted(self.edge_labels):
            edge_defs = self.schema.edge_defs(name)
            if not edge_defs:
                self.issue(IssueKind.UNKNOWN_LABEL, loc, f"unknown edge label {name!r}")
                continue
            if state.labels is not None:
                matching = [
                    d
                    for d in edge_defs
                    if (d.src_label in state.labels if outgoing else d.dst_label in state.labels)
                ]
                if labels and not matching:
                    declared = [(d.src_label, d.dst_label) for d in edge_defs]
                    self.issue(
                        IssueKind.WRONG_EDGE_DIRECTION,
                        loc,
                        f"{step.op}({name!r}) from label(s) {sorted(state.labels)} "
                        f"contradicts declared direction(s) {declared}",
                    )
                defs.extend(matching)
            else:
                defs.extend(edge_defs)
        if to_edge:
            out_labels = frozenset(d.name for d in defs) or None
            return _State(_EDGE, out_labels if defs else None)
        out_labels = frozenset(d.dst_label if outgoing else d.src_label for d in defs)
        return _State(_VERTEX, out_labels or None)

    # -- walk ---------------------------------------------------------------

    def walk(self, steps: tuple[Step, ...], state: _State) -> _State:
        modulator_base: _State | None = None
        previous_op: str | None = None
        for loc, step in enumerate(steps):
            op = step.op
            if op in PARSE_ONLY_OPS:
                self.issue(
                    IssueKind.UNSUPPORTED_OPERATOR, loc, f"{op}() parses but cannot be executed"
                )
                previous_op = op
                state = _State(_VALUE, None)
                continue
            if op != "by":
                next_base = state if op in ("order", "groupCount", "project", "path") else None
            state = self._apply(step, state, loc, modulator_base, previous_op)
            if op != "by":
                modulator_base = next_base
            previous_op = op
        return state

    def _apply(
        self,
        step: Step,
        state: _State,
        loc: int,
        modulator_base: _State | None,
        previous_op: str | None,
    ) -> _State:
        op = step.op

        if op in ("out", "in", "outE", "inE"):
            return self._hop(step, state, loc)

        if op in ("outV", "inV"):
            if step.args:
                self.issue(IssueKind.ARITY_ERROR, loc, f"{op}() takes no arguments")
            if state.kind == _VERTEX:
                self.issue(IssueKind.ARITY_ERROR, loc, f"{op}() requires edge input")
                return _State(_VALUE, None)
            if state.kind == _EDGE and state.labels is not None:
                defs = [d for name in state.labels for d in self.schema.edge_defs(name)]
                labels = frozenset(d.src_label if op == "outV" else d.dst_label for d in defs)
                return _State(_VERTEX, labels or None)
            return _State(_VERTEX, None)

        if op == "hasLabel":
            labels = self._string_args(step, loc, minimum=1)
            if labels is None:
                return state
            known = self.vertex_labels | self.edge_labels
            for name in labels:
                if name not in known:
                    self.issue(IssueKind.UNKNOWN_LABEL, loc, f"unknown label {name!r}")
            requested = frozenset(labels) & known
            if state.labels is not None and state.labels & requested:
                return replace(state, labels=state.labels & requested)
            return replace(state, labels=requested or None)

        if op == "has":
            return self._check_has(step, state, loc)

        if op in ("values", "valueMap"):
            keys = self._string_args(step, loc)
            if keys:
                for key in keys:
                    self._check_property(key, state, loc)
            return _State(_MAP if op == "valueMap" else _VALUE, None)

        if op in ("label", "id"):
            if step.args:
                self.issue(IssueKind.ARITY_ERROR, loc, f"{op}() takes no arguments")
            return _State(_VALUE, None)

        if op == "as":
            names = self._string_args(step, loc, minimum=1)
            if names:
                for name in names:
                    self.aliases[name] = state
            return state

        if op == "select":
            names = self._string_args(step, loc, minimum=1)
            if not names:
                return _State(_VALUE, None)
            resolved: list[_State] = []
            for name in names:
                if name not in self.aliases:
                    self.issue(
                        IssueKind.UNKNOWN_LABEL, loc, f"alias {name!r} is not bound by as()"
                    )
                else:
                    resolved.append(self.aliases[name])
            if len(names) > 1:
                return _State(_MAP, None)
            return resolved[0] if resolved else _State(_VALUE, None)

        if op == "project":
            self._string_args(step, loc, minimum=1)
            return _State(_MAP, None)

        if op == "by":
            if modulator_base is None:
                self.issue(
                    IssueKind.ARITY_ERROR,
                    loc,
                    "by() must follow order(), groupCount(), project(), or path()",
                )
                return state
            if len(step.args) > 2:
                self.issue(IssueKind.ARITY_ERROR, loc, "by() takes at most 2 arguments")
            for arg in step.args:
                if isinstance(arg, Literal) and isinstance(arg.value, str):
                    self._check_property(arg.value, modulator_base, loc)
                elif isinstance(arg, AnonTraversal):
                    self.walk(arg.steps, modulator_base)
                elif isinstance(arg, Ident):
                    pass  # asc / desc
                else:
                    self.issue(IssueKind.ARITY_ERROR, loc, "bad by() argument")
            return state

        if op == "limit":
            if len(step.args) != 1 or not (
                isinstance(step.args[0], Literal)
                and isinstance(step.args[0].value, int)
                and not isinstance(step.args[0].value, bool)
                and step.args[0].value >= 0
            ):
                self.issue(IssueKind.ARITY_ERROR, loc, "limit() takes one non-negative integer")
            return state

        if op == "times":
            if previous_op != "repeat":
                self.issue(IssueKind.ARITY_ERROR, loc, "times() must directly follow repeat()")
            if len(step.args) != 1 or not (
                isinstance(step.args[0], Literal)
                and isinstance(step.args[0].value, int)
                and not isinstance(step.args[0].value, bool)
                and step.args[0].value >= 1
            ):
                self.issue(IssueKind.ARITY_ERROR, loc, "times() takes one positive integer")
            return state

        if op == "repeat":
            if len(step.args) != 1 or not isinstance(step.args[0], AnonTraversal):
                self.issue(IssueKind.ARITY_ERROR, loc, "repeat() takes one traversal argument")
                return state
            body_end = self.walk(step.args[0].steps, state)
            return _merge(state, body_end)

        if op in ("union", "coalesce"):
            if not step.args or not all(isinstance(a, AnonTraversal) for a in step.args):
                self.issue(IssueKind.ARITY_ERROR, loc, f"{op}() takes traversal arguments")
                return _State(_VALUE, None)
            ends = [self.walk(a.steps, state) for a in step.args]
            merged = ends[0]
            for end in ends[1:]:
                merged = _merge(merged, end)
            return merged

        if op == "where":
            if len(step.args) != 1:
                self.issue(IssueKind.ARITY_ERROR, loc, "where() takes one argument")
                return state
            arg = step.args[0]
            if isinstance(arg, AnonTraversal):
                self.walk(arg.steps, state)
            elif not isinstance(arg, Predicate):
                self.issue(IssueKind.ARITY_ERROR, loc, "where() takes a predicate or traversal")
            return state

        if op in ("count", "sum", "min", "max", "mean"):
            if step.args:
                self.issue(IssueKind.ARITY_ERROR, loc, f"{op}() takes no arguments")
            return _State(_VALUE, None)

        if op == "fold":
            if step.args:
                self.issue(IssueKind.ARITY_ERROR, loc, "fold() takes no arguments")
            return _State(_VALUE, None)

        if op == "groupCount":
            if step.args:
                self.issue(IssueKind.ARITY_ERROR, loc, "groupCount() takes no arguments")
            return _State(_MAP, None)

        if op in ("order", "dedup", "path"):
            if step.args:
                self.issue(IssueKind.ARITY_ERROR, loc, f"{op}() takes no arguments")
            return _State(_VALUE, None) if op == "path" else state

        return state

    def _check_has(self, step: Step, state: _State, loc: int) -> _State:
        args = step.args
        if not 1 <= len(args) <= 3:
            self.issue(IssueKind.ARITY_ERROR, loc, "has() takes 1 to 3 arguments")
            return state
        head = args[0]
        if not (isinstance(head, Literal) and isinstance(head.value, str)):
            self.issue(IssueKind.ARITY_ERROR, loc, "has() first argument must be a string")
            return state
        if len(args) == 3:
            label = head.value
            known = self.vertex_labels | self.edge_labels
            if label not in known:
                self.issue(IssueKind.UNKNOWN_LABEL, loc, f"unknown label {label!r}")
                narrowed_state = state
            else:
                narrowed = (
                    state.labels & {label} if state.labels is not None else frozenset({label})
                )
                narrowed_state = replace(state, labels=narrowed or frozenset({label}))
            key = args[1]
            if not (isinstance(key, Literal) and isinstance(key.value, str)):
                self.issue(IssueKind.ARITY_ERROR, loc, "has() property key must be a string")
                return narrowed_state
            self._check_property(key.value, narrowed_state, loc)
            self._check_value_arg(args[2], loc)
            return narrowed_state
        self._check_property(head.value, state, loc)
        if len(args) == 2:
            self._check_value_arg(args[1], loc)
        return state

    def _check_value_arg(self, arg, loc: int) -> None:
        if isinstance(arg, (Literal, Predicate)):
            return
        self.issue(IssueKind.ARITY_ERROR, loc, "expected literal or predicate value")


def validate(t: Traversal, schema: GraphSchema) -> list[ValidationIssue]:
    """Check a parsed traversal against the schema.

    Returns an empty list iff every label/property/edge usage is consistent
    with the schema and every operator has interpreter support.
    """
    checker = _Checker(schema)
    initial = _State(
        _VERTEX if t.source == "V" else _EDGE,
        checker.vertex_labels if t.source == "V" else checker.edge_labels,
    )
    checker.walk(t.steps, initial)
    return checker.issues
