"""Recursive-descent parser for the supported Gremlin subset.

Proper tokenization keeps periods inside string literals from splitting
steps, and every syntax error carries the source character offset.
"""

from __future__ import annotations

from dataclasses import dataclass

from askgraph.gremlin.ast import (
    AnonTraversal,
    Arg,
    Ident,
    Literal,
    Predicate,
    Step,
    Traversal,
)
from askgraph.gremlin.catalog import (
    PREDICATE_NAMES,
    SORT_ORDER_NAMES,
    SUPPORTED_STEPS,
)
from askgraph.gremlin.issues import GremlinSyntaxError

_PUNCT = {".": "DOT", "(": "LPAREN", ")": "RPAREN", ",": "COMMA"}

_STRING_ESCAPES = {"\\": "\\", "'": "'", '"': '"', "n": "\n", "t": "\t", "r": "\r"}


@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT | STRING | NUMBER | DOT | LPAREN | RPAREN | COMMA | EOF
    value: object
    offset: int


def _tokenize(script: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(script)
    while i < n:
        ch = script[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _PUNCT:
            tokens.append(_Token(_PUNCT[ch], ch, i))
            i += 1
            continue
        if ch in "'\"":
            quote = ch
            start = i
            i += 1
            buf: list[str] = []
            while i < n:
                c = script[i]
                if c == "\\":
                    if i + 1 >= n:
                        raise GremlinSyntaxError("unterminated escape", i)
                    esc = script[i + 1]
                    buf.append(_STRING_ESCAPES.get(esc, esc))
                    i += 2
                    continue
                if c == quote:
                    break
                buf.append(c)
                i += 1
            else:
                raise GremlinSyntaxError("unterminated string literal", start)
            tokens.append(_Token("STRING", "".join(buf), start))
            i += 1
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and script[i + 1].isdigit()):
            start = i
            i += 1
            while i < n and script[i].isdigit():
                i += 1
            is_float = False
            if i + 1 < n and script[i] == "." and script[i + 1].isdigit():
                is_float = True
                i += 1
                while i < n and script[i].isdigit():
                    i += 1
            text = script[start:i]
            tokens.append(_Token("NUMBER", float(text) if is_float else int(text), start))
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < n and (script[i].isalnum() or script[i] == "_"):
                i += 1
            tokens.append(_Token("IDENT", script[start:i], start))
            continue
        raise GremlinSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("EOF", None, n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise GremlinSyntaxError(f"expected {what}", tok.offset)
        return tok

    # -- grammar ------------------------------------------------------------

    def parse_traversal(self) -> Traversal:
        head = self.expect("IDENT", "traversal source 'g'")
        if head.value != "g":
            raise GremlinSyntaxError("script must start with 'g'", head.offset)
        self.expect("DOT", "'.' after 'g'")
        src = self.expect("IDENT", "source step V() or E()")
        if src.value not in ("V", "E"):
            raise GremlinSyntaxError("source step must be V() or E()", src.offset)
        self.expect("LPAREN", "'(' after source step")
        source_args: list[Literal] = []
        if self.peek().kind != "RPAREN":
            while True:
                tok = self.peek()
                if tok.kind not in ("STRING", "NUMBER"):
                    raise GremlinSyntaxError("source arguments must be literals", tok.offset)
                source_args.append(Literal(self.next().value))
                if self.peek().kind == "COMMA":
                    self.next()
                    continue
                break
        self.expect("RPAREN", "')' closing source step")
        steps: list[Step] = []
        while self.peek().kind == "DOT":
            self.next()
            steps.append(self.parse_step())
        tail = self.peek()
        if tail.kind != "EOF":
            raise GremlinSyntaxError("trailing input after traversal", tail.offset)
        return Traversal(source=src.value, source_args=tuple(source_args), steps=tuple(steps))

    def parse_step(self) -> Step:
        tok = self.peek()
        if tok.kind != "IDENT":
            raise GremlinSyntaxError("empty step", tok.offset)
        self.next()
        name = tok.value
        if name not in SUPPORTED_STEPS:
            raise GremlinSyntaxError(f"unsupported step {name!r}", tok.offset)
        self.expect("LPAREN", f"'(' after step {name!r}")
        args: list[Arg] = []
        if self.peek().kind != "RPAREN":
            while True:
                args.append(self.parse_arg())
                if self.peek().kind == "COMMA":
                    self.next()
                    continue
                break
        self.expect("RPAREN", f"')' closing step {name!r}")
        return Step(op=name, args=tuple(args))

    def parse_arg(self) -> Arg:
        tok = self.peek()
        if tok.kind in ("STRING", "NUMBER"):
            self.next()
            return Literal(tok.value)
        if tok.kind != "IDENT":
            raise GremlinSyntaxError("expected step argument", tok.offset)
        name = tok.value
        # P.gt(...) / __.out(...) prefixes
        if name in ("P", "__") and self.peek(1).kind == "DOT":
            self.next()
            self.next()
            inner = self.peek()
            if inner.kind != "IDENT":
                raise GremlinSyntaxError(f"expected name after {name}.", inner.offset)
            if name == "P":
                return self.parse_predicate()
            return self.parse_anon()
        if name in PREDICATE_NAMES and self.peek(1).kind == "LPAREN":
            return self.parse_predicate()
        if self.peek(1).kind == "LPAREN":
            return self.parse_anon()
        if name in SORT_ORDER_NAMES:
            self.next()
            return Ident(name)
        if name in ("true", "false"):
            self.next()
            return Literal(name == "true")
        raise GremlinSyntaxError(f"unexpected identifier {name!r} in arguments", tok.offset)

    def parse_predicate(self) -> Predicate:
        tok = self.expect("IDENT", "predicate name")
        if tok.value not in PREDICATE_NAMES:
            raise GremlinSyntaxError(f"unknown predicate {tok.value!r}", tok.offset)
        self.expect("LPAREN", "'(' after predicate")
        values: list = []
        if self.peek().kind != "RPAREN":
            while True:
                arg = self.peek()
                if arg.kind in ("STRING", "NUMBER"):
                    self.next()
                    values.append(arg.value)
                elif arg.kind == "IDENT" and arg.value in ("true", "false"):
                    self.next()
                    values.append(arg.value == "true")
                else:
                    raise GremlinSyntaxError("predicate arguments must be literals", arg.offset)
                if self.peek().kind == "COMMA":
                    self.next()
                    continue
                break
        self.expect("RPAREN", "')' closing predicate")
        return Predicate(op=tok.value, args=tuple(values))

    def parse_anon(self) -> AnonTraversal:
        steps = [self.parse_step()]
        while self.peek().kind == "DOT":
            self.next()
            steps.append(self.parse_step())
        return AnonTraversal(steps=tuple(steps))


def parse(script: str) -> Traversal:
    """Parse a script into a Traversal; raises GremlinSyntaxError with offset."""
    if not script or not script.strip():
        raise GremlinSyntaxError("empty script", 0)
    return _Parser(_tokenize(script)).parse_traversal()
