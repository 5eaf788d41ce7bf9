"""Infix expression grammar.

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | '+' unary | power
    power   := atom ('^' unary)?            (right associative)
    atom    := number | 'i' | 'pi' | name | name '(' expr ')' | '(' expr ')' | hole
    hole    := '~' name ('::' name)?        (rule patterns only)

Numbers are integers (exact), decimals or scientific literals (floating).
``i`` is the imaginary unit.  Function names are those in ``FUNCTIONS``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from .expr import (FUNCTIONS, Const, Expr, Hole, Sym, add, div, fn, mul, neg,
                   pow_)

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z][A-Za-z0-9_]*)
  | (?P<hole>~[A-Za-z][A-Za-z0-9_]*(?:::[A-Za-z_][A-Za-z0-9_]*)?)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(source)))
    return out


class _Parser:
    def __init__(self, source: str, allow_holes: bool):
        self.toks = _tokenize(source)
        self.i = 0
        self.allow_holes = allow_holes

    @property
    def tok(self):
        return self.toks[self.i]

    def take(self, text: str | None = None):
        kind, val, pos = self.tok
        if text is not None and val != text:
            what = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {text!r}, found {what}", pos)
        self.i += 1
        return val

    def expr(self) -> Expr:
        left = self.term()
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            op = self.take()
            right = self.term()
            left = add(left, right) if op == "+" else add(left, neg(right))
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.tok[1] in ("*", "/") and self.tok[0] == "op":
            op = self.take()
            right = self.unary()
            left = mul(left, right) if op == "*" else div(left, right)
        return left

    def unary(self) -> Expr:
        if self.tok == ("op", "-", self.tok[2]):
            self.take()
            return neg(self.unary())
        if self.tok == ("op", "+", self.tok[2]):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.take()
            return pow_(base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, val, pos = self.tok
        if kind == "num":
            self.take()
            if re.fullmatch(r"\d+", val):
                return Const(Fraction(int(val)))
            return Const(complex(float(val)))
        if kind == "hole":
            if not self.allow_holes:
                raise ParseError("pattern variables are only allowed in rules", pos)
            self.take()
            name, _, guard = val[1:].partition("::")
            return Hole(name, guard or None)
        if kind == "name":
            self.take()
            if self.tok[1] == "(" and self.tok[0] == "op":
                if val not in FUNCTIONS:
                    raise ParseError(f"unknown function {val!r}", pos)
                self.take("(")
                arg = self.expr()
                self.take(")")
                return fn(val, arg)
            if val in FUNCTIONS:
                raise ParseError(f"function {val!r} needs an argument", pos)
            if val == "i":
                return Const(1j)
            if val == "pi":
                return Const(complex(math.pi))
            return Sym(val)
        if kind == "op" and val == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        what = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {what}", pos)


def parse(source: str, univariate: bool = True) -> Expr:
    """Parse infix text into a canonical expression.

    With ``univariate`` set, more than one free variable is an error.
    """
    p = _Parser(source, allow_holes=False)
    e = p.expr()
    kind, val, pos = p.tok
    if kind != "end":
        raise ParseError(f"unexpected {val!r}", pos)
    if univariate and len(e.free_symbols) > 1:
        names = ", ".join(sorted(e.free_symbols))
        raise ParseError(f"expected one free variable, found {names}", 0)
    return e


def parse_pattern(source: str) -> Expr:
    p = _Parser(source, allow_holes=True)
    e = p.expr()
    kind, val, pos = p.tok
    if kind != "end":
        raise ParseError(f"unexpected {val!r}", pos)
    return e


def variable_of(e: Expr, default: str = "x") -> str:
    names = e.free_symbols
    if len(names) > 1:
        raise ValueError(f"expression is not univariate: {sorted(names)}")
    return next(iter(names)) if names else default
