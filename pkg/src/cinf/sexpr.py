"""S-expression reader with source locations, and the term grammar on top of it.

    term     := IDENT | RATIONAL | "(" PRIM term* ")"
    RATIONAL := -?[0-9]+(/[0-9]+)?
    PRIM     := + | * | neg | recip | sin | cos | exp | log | atan
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ArityError, SexprSyntaxError, UnknownSymbol
from .terms import PRIMITIVES, TOKEN_TO_OP, App, Const, Term, Var

RATIONAL_RE = re.compile(r"-?[0-9]+(/[0-9]+)?\Z")
IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_'.]*\Z")
_TOKEN_RE = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


@dataclass(frozen=True)
class Atom:
    text: str
    line: int
    column: int


@dataclass(frozen=True)
class SList:
    items: tuple = field(default=())
    line: int = 1
    column: int = 1


def _tokens(text: str):
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:  # pragma: no cover - the regex accepts every character class
            raise SexprSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        tok = m.group()
        if not tok.isspace() and not tok.startswith(";"):
            yield tok, line, col
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    yield None, line, col


def read_all(text: str) -> list:
    """Read every top-level form in ``text``."""
    stack = [SList((), 1, 1)]
    items = [[]]
    for tok, line, col in _tokens(text):
        if tok is None:
            if len(items) > 1:
                opener = stack[-1]
                raise SexprSyntaxError("unclosed parenthesis", opener.line, opener.column)
            return items[0]
        if tok == "(":
            stack.append(SList((), line, col))
            items.append([])
        elif tok == ")":
            if len(items) == 1:
                raise SexprSyntaxError("unbalanced ')'", line, col)
            opener = stack.pop()
            done = items.pop()
            items[-1].append(SList(tuple(done), opener.line, opener.column))
        else:
            items[-1].append(Atom(tok, line, col))
    raise AssertionError("unreachable")


def read_one(text: str):
    forms = read_all(text)
    if len(forms) != 1:
        where = forms[1] if len(forms) > 1 else None
        raise SexprSyntaxError(
            f"expected exactly one expression, found {len(forms)}",
            getattr(where, "line", 1),
            getattr(where, "column", 1),
        )
    return forms[0]


def node_to_term(node) -> Term:
    """Convert a read form into a term, reporting locations on failure."""
    if isinstance(node, Atom):
        if RATIONAL_RE.match(node.text):
            try:
                return Const(Fraction(node.text))
            except ZeroDivisionError:
                raise SexprSyntaxError("zero denominator", node.line, node.column) from None
        if IDENT_RE.match(node.text):
            return Var(node.text)
        raise SexprSyntaxError(f"malformed token {node.text!r}", node.line, node.column)
    if not node.items:
        raise SexprSyntaxError("empty application", node.line, node.column)
    head = node.items[0]
    if not isinstance(head, Atom):
        raise SexprSyntaxError("application head must be a primitive", node.line, node.column)
    op = TOKEN_TO_OP.get(head.text)
    if op is None:
        raise UnknownSymbol(f"unknown primitive {head.text!r}", head.line, head.column)
    args = [node_to_term(a) for a in node.items[1:]]
    sym = PRIMITIVES[op]
    if sym.variadic:
        if not args:
            return Const(0 if op == "add" else 1)
        if len(args) == 1:
            return args[0]
    elif len(args) != sym.arity:
        raise ArityError(
            f"{head.text} takes {sym.arity} argument(s), got {len(args)}", head.line, head.column
        )
    return App(op, args)


def parse_term(text: str) -> Term:
    return node_to_term(read_one(text))


def node_to_text(node) -> str:
    if isinstance(node, Atom):
        return node.text
    return "(" + " ".join(node_to_text(i) for i in node.items) + ")"
