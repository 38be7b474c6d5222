"""Boolean (and temporal) formula trees, parser and printer.

Propositional grammar, loosest binding last::

    atom    := true | false | IDENT | IDENT' | ( expr )
    unary   := ! unary | atom
    and     := unary (& unary)*          left associative
    or      := and (| and)*              left associative
    implies := or (-> implies)?          right associative
    expr    := implies (<-> implies)*    left associative

With ``temporal=True`` the unary operators ``X G F`` and the binary ``U W``
(binding tighter than ``&``, right associative) are also accepted.  The printer
emits the fewest parentheses that make the parser rebuild the same tree, so
``parse(show(f)) == f`` for every tree and ``show`` is a normal form on text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import SpecSyntaxError

__all__ = [
    "Formula", "TRUE", "FALSE", "var", "neg", "conj", "disj", "implies", "iff",
    "parse_formula", "show", "variables", "is_primed", "base_name", "compile_formula",
    "eq_bits", "lit", "evaluate",
]


@dataclass(frozen=True)
class Formula:
    op: str
    args: tuple = ()

    def __and__(self, other):
        return Formula("and", (self, other))

    def __or__(self, other):
        return Formula("or", (self, other))

    def __invert__(self):
        return Formula("not", (self,))

    def __rshift__(self, other):
        return Formula("implies", (self, other))

    def __str__(self):
        return show(self)


TRUE = Formula("const", (True,))
FALSE = Formula("const", (False,))


def var(name: str) -> Formula:
    return Formula("var", (name,))


def lit(name: str, value: bool) -> Formula:
    return var(name) if value else neg(var(name))


def neg(f: Formula) -> Formula:
    return Formula("not", (f,))


def conj(items: Iterable[Formula]) -> Formula:
    items = list(items)
    return reduce(lambda a, b: Formula("and", (a, b)), items) if items else TRUE


def disj(items: Iterable[Formula]) -> Formula:
    items = list(items)
    return reduce(lambda a, b: Formula("or", (a, b)), items) if items else FALSE


def implies(a: Formula, b: Formula) -> Formula:
    return Formula("implies", (a, b))


def iff(a: Formula, b: Formula) -> Formula:
    return Formula("iff", (a, b))


def eq_bits(names: Sequence[str], value: int, primed: bool = False) -> Formula:
    """Cube saying the bit-vector ``names`` (first most significant) equals ``value``."""
    n = len(names)
    suffix = "'" if primed else ""
    return conj(lit(x + suffix, bool((value >> (n - 1 - k)) & 1)) for k, x in enumerate(names))


def is_primed(name: str) -> bool:
    return name.endswith("'")


def base_name(name: str) -> str:
    return name.rstrip("'")


# ----------------------------------------------------------------------
# lexer
_TOKEN = re.compile(
    r"\s*(?:(?P<op><->|->|[!&|()])|(?P<id>[A-Za-z_][A-Za-z0-9_]*)(?P<prime>'?))"
)
_TEMPORAL_UNARY = {"X", "G", "F"}
_TEMPORAL_BINARY = {"U", "W"}


def _tokenize(text: str, line: int, col: int, temporal: bool) -> List[Tuple[str, str, int]]:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise SpecSyntaxError(f"unexpected character {text[bad]!r}", line, col + bad)
        start = m.start("op") if m.group("op") else m.start("id")
        if m.group("op"):
            toks.append(("op", m.group("op"), col + start))
        else:
            ident = m.group("id")
            if temporal and not m.group("prime") and ident in _TEMPORAL_UNARY | _TEMPORAL_BINARY:
                toks.append(("op", ident, col + start))
            elif ident in ("true", "false") and not m.group("prime"):
                toks.append(("const", ident, col + start))
            else:
                toks.append(("id", ident + m.group("prime"), col + start))
        pos = m.end()
    toks.append(("end", "", col + len(text)))
    return toks


class _Parser:
    def __init__(self, toks, line, temporal):
        self.toks = toks
        self.i = 0
        self.line = line
        self.temporal = temporal

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            what = tok[1] or "end of input"
            raise SpecSyntaxError(f"expected {value!r}, found {what!r}", self.line, tok[2])
        self.i += 1
        return tok

    def expr(self):
        left = self.implies()
        while self.peek()[1] == "<->":
            self.take()
            left = Formula("iff", (left, self.implies()))
        return left

    def implies(self):
        left = self.disj()
        if self.peek()[1] == "->":
            self.take()
            return Formula("implies", (left, self.implies()))
        return left

    def disj(self):
        left = self.conj()
        while self.peek()[1] == "|":
            self.take()
            left = Formula("or", (left, self.conj()))
        return left

    def conj(self):
        left = self.binary_temporal()
        while self.peek()[1] == "&":
            self.take()
            left = Formula("and", (left, self.binary_temporal()))
        return left

    def binary_temporal(self):
        left = self.unary()
        if self.temporal and self.peek()[0] == "op" and self.peek()[1] in _TEMPORAL_BINARY:
            op = self.take()[1]
            return Formula(op, (left, self.binary_temporal()))
        return left

    def unary(self):
        kind, val, col = self.peek()
        if kind == "op" and val == "!":
            self.take()
            return Formula("not", (self.unary(),))
        if kind == "op" and val in _TEMPORAL_UNARY:
            self.take()
            return Formula(val, (self.unary(),))
        if kind == "op" and val == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        if kind == "const":
            self.take()
            return TRUE if val == "true" else FALSE
        if kind == "id":
            self.take()
            return Formula("var", (val,))
        what = val or "end of input"
        raise SpecSyntaxError(f"unexpected {what!r}", self.line, col)


def parse_formula(text: str, line: int = 0, col: int = 1, temporal: bool = False) -> Formula:
    p = _Parser(_tokenize(text, line, col, temporal), line, temporal)
    f = p.expr()
    kind, val, c = p.peek()
    if kind != "end":
        raise SpecSyntaxError(f"unexpected {val!r}", line, c)
    return f


# ----------------------------------------------------------------------
# printer
_PREC = {"iff": 1, "implies": 2, "or": 3, "and": 4, "U": 5, "W": 5,
         "not": 6, "X": 6, "G": 6, "F": 6, "var": 7, "const": 7}
_SYM = {"iff": "<->", "implies": "->", "or": "|", "and": "&", "U": "U", "W": "W"}
_LEFT_ASSOC = {"iff", "or", "and"}


def show(f: Formula) -> str:
    op = f.op
    if op == "const":
        return "true" if f.args[0] else "false"
    if op == "var":
        return f.args[0]
    if op == "not":
        return "!" + _wrap(f.args[0], _PREC["not"], strict=False)
    if op in ("X", "G", "F"):
        return op + " " + _wrap(f.args[0], _PREC[op], strict=False)
    p = _PREC[op]
    a, b = f.args
    if op in _LEFT_ASSOC:
        left, right = _wrap(a, p, strict=False), _wrap(b, p, strict=True)
    else:
        left, right = _wrap(a, p, strict=True), _wrap(b, p, strict=False)
    return f"{left} {_SYM[op]} {right}"


def _wrap(f: Formula, parent: int, strict: bool) -> str:
    p = _PREC[f.op]
    text = show(f)
    if p < parent or (strict and p == parent):
        return "(" + text + ")"
    return text


# ----------------------------------------------------------------------
def variables(f: Formula) -> set:
    """Syntactic variable occurrences (primed names keep their prime)."""
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g.op == "var":
            out.add(g.args[0])
        elif g.op != "const":
            stack.extend(g.args)
    return out


def evaluate(f: Formula, env: Mapping[str, bool]) -> bool:
    op = f.op
    if op == "const":
        return f.args[0]
    if op == "var":
        return bool(env[f.args[0]])
    if op == "not":
        return not evaluate(f.args[0], env)
    a, b = f.args
    if op == "and":
        return evaluate(a, env) and evaluate(b, env)
    if op == "or":
        return evaluate(a, env) or evaluate(b, env)
    if op == "implies":
        return (not evaluate(a, env)) or evaluate(b, env)
    if op == "iff":
        return evaluate(a, env) == evaluate(b, env)
    raise ValueError(f"temporal operator {op} has no propositional value")


def compile_formula(f: Formula, bdd) -> "object":
    """Translate a propositional tree into a kernel handle."""
    memo: Dict[Formula, object] = {}

    def rec(g):
        r = memo.get(g)
        if r is not None:
            return r
        op = g.op
        if op == "const":
            r = bdd.const(g.args[0])
        elif op == "var":
            r = bdd.mk_var(g.args[0])
        elif op == "not":
            r = bdd.negate(rec(g.args[0]))
        elif op in ("and", "or", "implies", "iff"):
            r = bdd.apply(op, rec(g.args[0]), rec(g.args[1]))
        else:
            raise ValueError(f"temporal operator {op} cannot be compiled")
        memo[g] = r
        return r

    return rec(f)
