"""Quantitative Hennessy-Milner logic over WMTS.

A formula denotes, at every state, a value in ``[0, inf]``: how far the
state is from satisfying it.  ``<l> F`` looks for a must-step whose label
is close to ``l``, ``[l] F`` bounds all may-steps whose label is comparable
with ``l``.

Concrete syntax::

    F ::= tt | ff | <a[lo,hi]> F | [a[lo,hi]] F | F & F | F | F | ( F )

with ``&`` binding tighter than ``|`` and both associating to the left.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .distance import DEFAULT_LAMBDA, check_lambda, label_dist
from .model import SpecLabel, WeightInterval, Wmts, parse_bound

INF = math.inf


@dataclass(frozen=True)
class Tt:
    pass


@dataclass(frozen=True)
class Ff:
    pass


@dataclass(frozen=True)
class Diamond:
    label: SpecLabel
    body: "Formula"


@dataclass(frozen=True)
class Box:
    label: SpecLabel
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


Formula = Union[Tt, Ff, Diamond, Box, And, Or]


def evaluate(phi: Formula, s: Wmts, lam: float = DEFAULT_LAMBDA) -> dict:
    """Value of ``phi`` at every state of ``s``."""
    lam = check_lambda(lam)
    memo = {}

    def val(f) -> dict:
        if f in memo:
            return memo[f]
        if isinstance(f, Tt):
            out = dict.fromkeys(s.states, 0.0)
        elif isinstance(f, Ff):
            out = dict.fromkeys(s.states, INF)
        elif isinstance(f, (And, Or)):
            l, r = val(f.left), val(f.right)
            pick = max if isinstance(f, And) else min
            out = {x: pick(l[x], r[x]) for x in s.states}
        elif isinstance(f, Diamond):
            body = val(f.body)
            out = {}
            for x in s.states:
                vals = [label_dist(k, f.label) + lam * body[t] for k, t in s.must_from(x) if label_dist(k, f.label) != INF]
                out[x] = min(vals, default=INF)
        elif isinstance(f, Box):
            body = val(f.body)
            out = {}
            for x in s.states:
                vals = [label_dist(k, f.label) + lam * body[t] for k, t in s.may_from(x) if label_dist(k, f.label) != INF]
                out[x] = max(vals, default=0.0)
        else:
            raise TypeError(f"not a formula: {f!r}")
        memo[f] = out
        return out

    return val(phi)


def evaluate_at(phi: Formula, s: Wmts, lam: float = DEFAULT_LAMBDA, state=None) -> float:
    return evaluate(phi, s, lam)[s.initial if state is None else state]


def is_disjunction_free(phi: Formula) -> bool:
    if isinstance(phi, Or):
        return False
    if isinstance(phi, And):
        return is_disjunction_free(phi.left) and is_disjunction_free(phi.right)
    if isinstance(phi, (Diamond, Box)):
        return is_disjunction_free(phi.body)
    return True


def modal_depth(phi: Formula) -> int:
    if isinstance(phi, (And, Or)):
        return max(modal_depth(phi.left), modal_depth(phi.right))
    if isinstance(phi, (Diamond, Box)):
        return 1 + modal_depth(phi.body)
    return 0


# --------------------------------------------------------------------------
# syntax


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<label>(?P<act>[^\s\[\]<>()&|,]+)\[\s*(?P<lo>[+-]?(?:\d+|inf))\s*,\s*(?P<hi>[+-]?(?:\d+|inf))\s*\])"
    r"|(?P<kw>tt|ff)\b"
    r"|(?P<sym>[<>\[\]()&|])"
)


def _tokenize(text: str) -> list:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        if m.lastgroup == "ws":
            for i, ch in enumerate(m.group(), start=pos):
                if ch == "\n":
                    line += 1
                    line_start = i + 1
        elif m.group("label"):
            try:
                lab = SpecLabel(m.group("act"), WeightInterval(parse_bound(m.group("lo")), parse_bound(m.group("hi"))))
            except ValueError as exc:
                raise FormulaSyntaxError(str(exc), line, col) from None
            toks.append(("label", lab, line, col))
        elif m.group("kw"):
            toks.append((m.group("kw"), None, line, col))
        else:
            toks.append((m.group("sym"), None, line, col))
        pos = m.end()
    toks.append(("eof", None, line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            want = "a label like a[0,1]" if kind == "label" else repr(kind)
            got = "end of input" if tok[0] == "eof" else repr(tok[0] if tok[1] is None else str(tok[1]))
            raise FormulaSyntaxError(f"expected {want}, got {got}", tok[2], tok[3])
        self.i += 1
        return tok

    def formula(self):
        left = self.conj()
        while self.peek()[0] == "|":
            self.i += 1
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek()[0] == "&":
            self.i += 1
            left = And(left, self.unary())
        return left

    def unary(self):
        kind, _, line, col = self.peek()
        if kind == "tt":
            self.i += 1
            return Tt()
        if kind == "ff":
            self.i += 1
            return Ff()
        if kind == "(":
            self.i += 1
            f = self.formula()
            self.take(")")
            return f
        if kind in ("<", "["):
            self.i += 1
            lab = self.take("label")[1]
            self.take(">" if kind == "<" else "]")
            body = self.unary()
            return Diamond(lab, body) if kind == "<" else Box(lab, body)
        got = "end of input" if kind == "eof" else repr(kind)
        raise FormulaSyntaxError(f"expected a formula, got {got}", line, col)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.take("eof")
    return f


def format_formula(phi: Formula) -> str:
    def fmt(f, prec):
        # prec: 0 top/or, 1 and, 2 modal body
        if isinstance(f, Tt):
            return "tt"
        if isinstance(f, Ff):
            return "ff"
        if isinstance(f, Diamond):
            return f"<{f.label}> {fmt(f.body, 2)}"
        if isinstance(f, Box):
            return f"[{f.label}] {fmt(f.body, 2)}"
        if isinstance(f, And):
            out = f"{fmt(f.left, 1)} & {fmt(f.right, 2)}"
            return f"({out})" if prec > 1 else out
        if isinstance(f, Or):
            out = f"{fmt(f.left, 0)} | {fmt(f.right, 1)}"
            return f"({out})" if prec > 0 else out
        raise TypeError(f"not a formula: {f!r}")

    return fmt(phi, 0)
