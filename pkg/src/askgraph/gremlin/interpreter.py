"""Bounded interpreter for the executable traversal subset.

Deterministic ordering: source elements are visited id-ascending, hop
expansions follow edge-id order, and unordered aggregates render with
sorted keys. Executions are bounded by ExecutionLimits and always either
return a ResultSet or raise LimitExceeded.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from askgraph.errors import LimitExceeded, RuntimeTypeError
from askgraph.graphstore.graph import Edge, PropertyGraph, Vertex
from askgraph.gremlin.ast import AnonTraversal, Ident, Literal, Predicate, Step, Traversal
from askgraph.gremlin.catalog import PARSE_ONLY_OPS


@dataclass(frozen=True)
class ExecutionLimits:
    max_visited_elements: int = 1_000_000
    max_repeat_depth: int = 16
    wall_time_s: float = 5.0


@dataclass(frozen=True)
class ElementRef:
    id: str
    label: str

    def to_dict(self) -> dict:
        return {"id": self.id, "label": self.label}


@dataclass
class ResultSet:
    rows: list

    def to_rows(self) -> list:
        return [render_value(row) for row in self.rows]


def render_value(value):
    """JSON-ready rendering of a result value."""
    if isinstance(value, ElementRef):
        return value.to_dict()
    if isinstance(value, list):
        return [render_value(v) for v in value]
    if isinstance(value, dict):
        return {k: render_value(v) for k, v in value.items()}
    return value


def freeze_value(value):
    """Hashable canonical form, used for multiset comparison of results."""
    if isinstance(value, ElementRef):
        return ("elem", value.id, value.label)
    if isinstance(value, list):
        return ("list", tuple(freeze_value(v) for v in value))
    if isinstance(value, dict):
        return ("map", tuple(sorted((k, freeze_value(v)) for k, v in value.items())))
    if isinstance(value, bool):
        return ("bool", value)
    if isinstance(value, (int, float)):
        return ("num", float(value))
    return ("scalar", value)


class _Traverser:
    __slots__ = ("value", "path")

    def __init__(self, value, path):
        self.value = value
        self.path = path  # tuple of (value, frozenset(labels))

    def step_to(self, value) -> "_Traverser":
        return _Traverser(value, self.path + ((value, frozenset()),))

    def relabel(self, labels: frozenset[str]) -> "_Traverser":
        head_value, head_labels = self.path[-1]
        return _Traverser(self.value, self.path[:-1] + ((head_value, head_labels | labels),))

    def lookup(self, label: str):
        for value, labels in reversed(self.path):
            if label in labels:
                return value
        raise RuntimeTypeError(f"alias {label!r} is not bound on the current path")


def _fresh(value) -> _Traverser:
    return _Traverser(value, ((value, frozenset()),))


class _Ctx:
    def __init__(self, graph: PropertyGraph, limits: ExecutionLimits):
        self.graph = graph
        self.limits = limits
        self.visited = 0
        self.started = time.monotonic()

    def charge(self, n: int = 1) -> None:
        self.visited += n
        if self.visited > self.limits.max_visited_elements:
            raise LimitExceeded(
                f"visited {self.visited} elements, limit {self.limits.max_visited_elements}"
            )
        if self.visited % 1024 == 0 and (
            time.monotonic() - self.started > self.limits.wall_time_s
        ):
            raise LimitExceeded(f"wall time limit {self.limits.wall_time_s}s exceeded")


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _values_equal(a, b) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return a is b if isinstance(a, bool) and isinstance(b, bool) else False
    if _is_number(a) and _is_number(b):
        return float(a) == float(b)
    if isinstance(a, (Vertex, Edge)) and isinstance(b, (Vertex, Edge)):
        return type(a) is type(b) and a.id == b.id
    return type(a) is type(b) and a == b


def _compare(a, b):
    """Ordering comparison; returns None when the values are not comparable."""
    if _is_number(a) and _is_number(b):
        fa, fb = float(a), float(b)
        return (fa > fb) - (fa < fb)
    if isinstance(a, str) and isinstance(b, str):
        return (a > b) - (a < b)
    return None


_PREDICATE_FNS = {
    "eq": lambda cmp, match: match,
    "neq": lambda cmp, match: not match,
    "gt": lambda cmp, match: cmp is not None and cmp > 0,
    "gte": lambda cmp, match: cmp is not None and cmp >= 0,
    "lt": lambda cmp, match: cmp is not None and cmp < 0,
    "lte": lambda cmp, match: cmp is not None and cmp <= 0,
}


def _eval_predicate(pred: Predicate, actual, resolver=None) -> bool:
    def operand(raw):
        if resolver is not None and isinstance(raw, str):
            resolved = resolver(raw)
            if resolved is not _UNRESOLVED:
                return resolved
        return raw

    if pred.op == "within":
        return any(_values_equal(actual, operand(v)) for v in pred.args)
    if pred.op == "without":
        return not any(_values_equal(actual, operand(v)) for v in pred.args)
    if len(pred.args) != 1:
        raise RuntimeTypeError(f"predicate {pred.op}() takes one argument")
    target = operand(pred.args[0])
    return _PREDICATE_FNS[pred.op](_compare(actual, target), _values_equal(actual, target))


_UNRESOLVED = object()


# ---------------------------------------------------------------------------
# step application
# ---------------------------------------------------------------------------


@dataclass
class _Effective:
    """A step with its trailing by()/times() modulators attached."""

    step: Step
    modulators: list[Step] = field(default_factory=list)
    times: int | None = None


_MODULATABLE = {"order", "groupCount", "project", "path", "select"}


def _attach_modulators(steps: tuple[Step, ...]) -> list[_Effective]:
    effective: list[_Effective] = []
    for step in steps:
        if step.op == "by":
            if not effective or effective[-1].step.op not in _MODULATABLE:
                raise RuntimeTypeError("by() must follow a modulatable step")
            effective[-1].modulators.append(step)
        elif step.op == "times":
            if not effective or effective[-1].step.op != "repeat":
                raise RuntimeTypeError("times() must directly follow repeat()")
            effective[-1].times = step.args[0].value  # validated positive int
        else:
            effective.append(_Effective(step))
    return effective


def _element_props(value) -> dict:
    if isinstance(value, (Vertex, Edge)):
        return value.props
    raise RuntimeTypeError(f"expected a graph element, got {type(value).__name__}")


def _apply_modulator(mod_args: tuple, tr: _Traverser, ctx: _Ctx):
    """Evaluate one by() modulator against a single traverser; None-able."""
    if not mod_args:
        return tr.value
    head = mod_args[0]
    if isinstance(head, Literal) and isinstance(head.value, str):
        props = _element_props(tr.value)
        return props.get(head.value)
    if isinstance(head, AnonTraversal):
        results = _run_sub(head, tr, ctx)
        if not results:
            raise RuntimeTypeError("by() traversal produced no value")
        return results[0].value
    if isinstance(head, Ident):
        return tr.value
    raise RuntimeTypeError("unsupported by() argument")


def _modulator_direction(mod_args: tuple) -> int:
    for arg in mod_args:
        if isinstance(arg, Ident) and arg.name == "desc":
            return -1
    return 1


def _run_sub(anon: AnonTraversal, tr: _Traverser, ctx: _Ctx) -> list[_Traverser]:
    """Run an anonymous traversal from a single traverser."""
    current = [tr]
    for eff in _attach_modulators(anon.steps):
        current = _apply_effective(eff, current, ctx)
    return current


def _run_body(anon: AnonTraversal, traversers: list[_Traverser], ctx: _Ctx) -> list[_Traverser]:
    """Run a repeat() body over the whole traverser set once."""
    current = traversers
    for eff in _attach_modulators(anon.steps):
        current = _apply_effective(eff, current, ctx)
    return current


def _sort_key(value):
    # total across mixed types: group by type name first
    if _is_number(value):
        return (0, "", float(value))
    if isinstance(value, str):
        return (1, value, 0.0)
    if isinstance(value, (Vertex, Edge)):
        return (2, value.id, 0.0)
    return (3, str(value), 0.0)


def _group_key(value) -> str:
    if isinstance(value, (Vertex, Edge)):
        return value.id
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return str(value)
    if isinstance(value, str):
        return value
    return str(render_value(_to_result(value)))


def _to_result(value):
    if isinstance(value, (Vertex, Edge)):
        return ElementRef(id=value.id, label=value.label)
    if isinstance(value, list):
        return [_to_result(v) for v in value]
    if isinstance(value, dict):
        return {k: _to_result(v) for k, v in value.items()}
    return value


def _apply_effective(eff: _Effective, traversers: list[_Traverser], ctx: _Ctx) -> list[_Traverser]:
    step = eff.step
    op = step.op
    if op in PARSE_ONLY_OPS:
        raise RuntimeTypeError(f"{op}() has no interpreter support")
    fn = _STEP_FNS.get(op)
    if fn is None:
        raise RuntimeTypeError(f"unknown step {op!r}")
    return fn(eff, traversers, ctx)


def _arg_values(step: Step) -> tuple:
    return tuple(a.value for a in step.args if isinstance(a, Literal))


# -- navigation --------------------------------------------------------------


def _step_out(eff, traversers, ctx):
    labels = _arg_values(eff.step)
    out = []
    for tr in traversers:
        vertex = tr.value
        if not isinstance(vertex, Vertex):
            raise RuntimeTypeError("out() requires vertex input")
        for edge in ctx.graph.out_edges(vertex.id, labels):
            ctx.charge()
            out.append(tr.step_to(ctx.graph.vertices[edge.dst]))
    return out


def _step_in(eff, traversers, ctx):
    labels = _arg_values(eff.step)
    out = []
    for tr in traversers:
        vertex = tr.value
        if not isinstance(vertex, Vertex):
            raise RuntimeTypeError("in() requires vertex input")
        for edge in ctx.graph.in_edges(vertex.id, labels):
            ctx.charge()
            out.append(tr.step_to(ctx.graph.vertices[edge.src]))
    return out


def _step_out_e(eff, traversers, ctx):
    labels = _arg_values(eff.step)
    out = []
    for tr in traversers:
        vertex = tr.value
        if not isinstance(vertex, Vertex):
            raise RuntimeTypeError("outE() requires vertex input")
        for edge in ctx.graph.out_edges(vertex.id, labels):
            ctx.charge()
            out.append(tr.step_to(edge))
    return out


def _step_in_e(eff, traversers, ctx):
    labels = _arg_values(eff.step)
    out = []
    for tr in traversers:
        vertex = tr.value
        if not isinstance(vertex, Vertex):
            raise RuntimeTypeError("inE() requires vertex input")
        for edge in ctx.graph.in_edges(vertex.id, labels):
            ctx.charge()
            out.append(tr.step_to(edge))
    return out


def _step_out_v(eff, traversers, ctx):
    out = []
    for tr in traversers:
        edge = tr.value
        if not isinstance(edge, Edge):
            raise RuntimeTypeError("outV() requires edge input")
        ctx.charge()
        out.append(tr.step_to(ctx.graph.vertices[edge.src]))
    return out


def _step_in_v(eff, traversers, ctx):
    out = []
    for tr in traversers:
        edge = tr.value
        if not isinstance(edge, Edge):
            raise RuntimeTypeError("inV() requires edge input")
        ctx.charge()
        out.append(tr.step_to(ctx.graph.vertices[edge.dst]))
    return out


# -- filters -----------------------------------------------------------------


def _match_value(arg, actual, tr: _Traverser) -> bool:
    if actual is None:
        return False
    if isinstance(arg, Predicate):
        # has() predicate operands are plain literals, unlike where()
        return _eval_predicate(arg, actual, resolver=None)
    if isinstance(arg, Literal):
        return _values_equal(actual, arg.value)
    raise RuntimeTypeError("unsupported has() value argument")


def _step_has(eff, traversers, ctx):
    args = eff.step.args
    out = []
    for tr in traversers:
        element = tr.value
        if not isinstance(element, (Vertex, Edge)):
            raise RuntimeTypeError("has() requires element input")
        if len(args) == 3:
            label = args[0].value
            if element.label != label:
                continue
            key = args[1].value
            if _match_value(args[2], element.props.get(key), tr):
                out.append(tr)
        elif len(args) == 2:
            key = args[0].value
            if _match_value(args[1], element.props.get(key), tr):
                out.append(tr)
        else:
            if args[0].value in element.props:
                out.append(tr)
    return out


def _step_has_label(eff, traversers, ctx):
    labels = set(_arg_values(eff.step))
    out = []
    for tr in traversers:
        element = tr.value
        if not isinstance(element, (Vertex, Edge)):
            raise RuntimeTypeError("hasLabel() requires element input")
        if element.label in labels:
            out.append(tr)
    return out


def _step_where(eff, traversers, ctx):
    arg = eff.step.args[0]
    out = []
    for tr in traversers:
        if isinstance(arg, AnonTraversal):
            if _run_sub(arg, tr, ctx):
                out.append(tr)
        elif isinstance(arg, Predicate):
            def resolver(name):
                try:
                    return tr.lookup(name)
                except RuntimeTypeError:
                    return _UNRESOLVED

            if _eval_predicate(arg, tr.value, resolver=resolver):
                out.append(tr)
        else:
            raise RuntimeTypeError("where() takes a predicate or traversal")
    return out


def _step_dedup(eff, traversers, ctx):
    seen = set()
    out = []
    for tr in traversers:
        key = freeze_value(_to_result(tr.value))
        if key not in seen:
            seen.add(key)
            out.append(tr)
    return out


def _step_limit(eff, traversers, ctx):
    n = eff.step.args[0].value
    return traversers[:n]


# -- projections ---------------------------------------------------------------


def _step_values(eff, traversers, ctx):
    keys = _arg_values(eff.step)
    out = []
    for tr in traversers:
        props = _element_props(tr.value)
        names = keys if keys else tuple(sorted(props))
        for name in names:
            if name in props:
                ctx.charge()
                out.append(tr.step_to(props[name]))
    return out


def _step_value_map(eff, traversers, ctx):
    keys = _arg_values(eff.step)
    out = []
    for tr in traversers:
        props = _element_props(tr.value)
        names = keys if keys else tuple(sorted(props))
        ctx.charge()
        out.append(tr.step_to({name: props[name] for name in names if name in props}))
    return out


def _step_label(eff, traversers, ctx):
    out = []
    for tr in traversers:
        element = tr.value
        if not isinstance(element, (Vertex, Edge)):
            raise RuntimeTypeError("label() requires element input")
        out.append(tr.step_to(element.label))
    return out


def _step_id(eff, traversers, ctx):
    out = []
    for tr in traversers:
        element = tr.value
        if not isinstance(element, (Vertex, Edge)):
            raise RuntimeTypeError("id() requires element input")
        out.append(tr.step_to(element.id))
    return out


def _step_as(eff, traversers, ctx):
    labels = frozenset(_arg_values(eff.step))
    return [tr.relabel(labels) for tr in traversers]


def _step_select(eff, traversers, ctx):
    keys = _arg_values(eff.step)
    out = []
    for tr in traversers:
        if len(keys) == 1:
            out.append(tr.step_to(tr.lookup(keys[0])))
        else:
            out.append(tr.step_to({k: tr.lookup(k) for k in keys}))
    return out


def _step_project(eff, traversers, ctx):
    keys = _arg_values(eff.step)
    mods = eff.modulators
    out = []
    for tr in traversers:
        row = {}
        for i, key in enumerate(keys):
            mod_args = mods[i % len(mods)].args if mods else ()
            row[key] = _apply_modulator(mod_args, tr, ctx)
        ctx.charge()
        out.append(tr.step_to({k: _to_result(v) for k, v in row.items()}))
    return out


def _step_path(eff, traversers, ctx):
    out = []
    for tr in traversers:
        out.append(tr.step_to([value for value, _ in tr.path]))
    return out


# -- barriers ------------------------------------------------------------------


def _step_count(eff, traversers, ctx):
    ctx.charge()
    return [_fresh(len(traversers))]


def _step_fold(eff, traversers, ctx):
    ctx.charge()
    return [_fresh([tr.value for tr in traversers])]


def _numeric_values(traversers, op: str) -> list[float]:
    values = []
    for tr in traversers:
        if not _is_number(tr.value):
            raise RuntimeTypeError(f"{op}() over non-numeric value {tr.value!r}")
        values.append(tr.value)
    return values


def _step_sum(eff, traversers, ctx):
    if not traversers:
        return []
    ctx.charge()
    return [_fresh(sum(_numeric_values(traversers, "sum")))]


def _step_mean(eff, traversers, ctx):
    if not traversers:
        return []
    values = _numeric_values(traversers, "mean")
    ctx.charge()
    return [_fresh(sum(values) / len(values))]


def _min_max(traversers, op: str, pick):
    values = [tr.value for tr in traversers]
    if all(_is_number(v) for v in values) or all(isinstance(v, str) for v in values):
        return pick(values)
    raise RuntimeTypeError(f"{op}() over mixed or non-comparable values")


def _step_min(eff, traversers, ctx):
    if not traversers:
        return []
    ctx.charge()
    return [_fresh(_min_max(traversers, "min", min))]


def _step_max(eff, traversers, ctx):
    if not traversers:
        return []
    ctx.charge()
    return [_fresh(_min_max(traversers, "max", max))]


def _step_group_count(eff, traversers, ctx):
    mods = eff.modulators
    counts: dict[str, int] = {}
    for tr in traversers:
        key_value = _apply_modulator(mods[0].args if mods else (), tr, ctx)
        key = _group_key(key_value)
        counts[key] = counts.get(key, 0) + 1
    ctx.charge()
    return [_fresh({k: counts[k] for k in sorted(counts)})]


def _step_order(eff, traversers, ctx):
    mods = eff.modulators
    if not mods:
        return sorted(traversers, key=lambda tr: _sort_key(tr.value))

    def key(tr):
        parts = []
        for mod in mods:
            value = _apply_modulator(
                tuple(a for a in mod.args if not isinstance(a, Ident)), tr, ctx
            )
            direction = _modulator_direction(mod.args)
            kind, text, num = _sort_key(value)
            if direction < 0:
                parts.append((-kind, _invert_text(text), -num))
            else:
                parts.append((kind, text, num))
        return tuple(parts)

    return sorted(traversers, key=key)


def _invert_text(text: str) -> tuple:
    # descending string order via negated codepoints
    return tuple(-ord(c) for c in text)


# -- branching -----------------------------------------------------------------


def _step_union(eff, traversers, ctx):
    anons = eff.step.args
    out = []
    for tr in traversers:
        for anon in anons:
            if not isinstance(anon, AnonTraversal):
                raise RuntimeTypeError("union() takes traversal arguments")
            out.extend(_run_sub(anon, tr, ctx))
    return out


def _step_coalesce(eff, traversers, ctx):
    anons = eff.step.args
    out = []
    for tr in traversers:
        for anon in anons:
            if not isinstance(anon, AnonTraversal):
                raise RuntimeTypeError("coalesce() takes traversal arguments")
            results = _run_sub(anon, tr, ctx)
            if results:
                out.extend(results)
                break
    return out


def _step_repeat(eff, traversers, ctx):
    body = eff.step.args[0]
    if not isinstance(body, AnonTraversal):
        raise RuntimeTypeError("repeat() takes one traversal argument")
    if eff.times is not None:
        if eff.times > ctx.limits.max_repeat_depth:
            raise LimitExceeded(
                f"times({eff.times}) exceeds repeat depth limit {ctx.limits.max_repeat_depth}"
            )
        current = traversers
        for _ in range(eff.times):
            current = _run_body(body, current, ctx)
        return current
    # unbounded repeat: loop until the traverser set dies or the depth limit hits
    current = traversers
    depth = 0
    while current:
        depth += 1
        if depth > ctx.limits.max_repeat_depth:
            raise LimitExceeded(
                f"repeat() without times() exceeded depth limit {ctx.limits.max_repeat_depth}"
            )
        current = _run_body(body, current, ctx)
    return current


_STEP_FNS = {
    "out": _step_out,
    "in": _step_in,
    "outE": _step_out_e,
    "inE": _step_in_e,
    "outV": _step_out_v,
    "inV": _step_in_v,
    "has": _step_has,
    "hasLabel": _step_has_label,
    "where": _step_where,
    "dedup": _step_dedup,
    "limit": _step_limit,
    "values": _step_values,
    "valueMap": _step_value_map,
    "label": _step_label,
    "id": _step_id,
    "as": _step_as,
    "select": _step_select,
    "project": _step_project,
    "path": _step_path,
    "count": _step_count,
    "fold": _step_fold,
    "sum": _step_sum,
    "mean": _step_mean,
    "min": _step_min,
    "max": _step_max,
    "groupCount": _step_group_count,
    "order": _step_order,
    "union": _step_union,
    "coalesce": _step_coalesce,
    "repeat": _step_repeat,
}


def execute(
    t: Traversal, graph: PropertyGraph, limits: ExecutionLimits | None = None
) -> ResultSet:
    """Run a validated traversal against the graph.

    Raises LimitExceeded when a bound is hit and RuntimeTypeError when a step
    is applied to a value it cannot handle.
    """
    ctx = _Ctx(graph, limits or ExecutionLimits())
    wanted = {str(a.value) for a in t.source_args} if t.source_args else None
    if t.source == "V":
        ids = [vid for vid in graph.vertex_ids() if wanted is None or vid in wanted]
        elements = [graph.vertices[vid] for vid in ids]
    else:
        ids = [eid for eid in graph.edge_ids() if wanted is None or eid in wanted]
        elements = [graph.edges[eid] for eid in ids]
    traversers = []
    for element in elements:
        ctx.charge()
        traversers.append(_fresh(element))
    for eff in _attach_modulators(t.steps):
        traversers = _apply_effective(eff, traversers, ctx)
    return ResultSet(rows=[_to_result(tr.value) for tr in traversers])
