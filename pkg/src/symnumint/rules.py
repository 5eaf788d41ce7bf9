"""Top-down pattern matching and the table of basic integrals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .expr import (Add, Const, Expr, Fn, Hole, Mul, Pow, Sym, canon,
                   substitute_many)
from .parser import parse_pattern

Bindings = dict[str, Expr]


def _real(e: Expr):
    if not isinstance(e, Const):
        return None
    v = e.value
    if isinstance(v, Fraction):
        return v
    return v.real if v.imag == 0 else None


GUARDS = {
    "is_const": lambda e: isinstance(e, Const),
    "is_neg": lambda e: _real(e) is not None and _real(e) < 0,
    "is_pos": lambda e: _real(e) is not None and _real(e) > 0,
    "is_int": lambda e: isinstance(e, Const) and isinstance(e.value, Fraction)
    and e.value.denominator == 1,
    "is_var": lambda e: isinstance(e, Sym),
}


def match(pattern: Expr, e: Expr, bindings: Bindings | None = None) -> Bindings | None:
    """Match ``e`` against ``pattern``; returns the hole bindings or None.

    Sum and product operands match as multisets, so the result does not
    depend on operand order.
    """
    return _match(pattern, e, dict(bindings or {}))


def _match(p: Expr, e: Expr, b: Bindings) -> Bindings | None:
    if isinstance(p, Hole):
        if p.name in b:
            return b if b[p.name] == e else None
        if p.guard is not None:
            guard = GUARDS.get(p.guard)
            if guard is None:
                raise ValueError(f"unknown guard {p.guard!r}")
            if not guard(e):
                return None
        b = dict(b)
        b[p.name] = e
        return b
    if type(p) is not type(e):
        return None
    if isinstance(p, (Const, Sym)):
        return b if p == e else None
    if isinstance(p, Fn):
        if p.kind != e.kind:
            return None
        return _match(p.arg, e.arg, b)
    if isinstance(p, Pow):
        b = _match(p.base, e.base, b)
        return None if b is None else _match(p.exp, e.exp, b)
    if isinstance(p, (Add, Mul)):
        ps, es = p.children(), e.children()
        if len(ps) != len(es):
            return None
        return _match_unordered(list(ps), list(es), b)
    return None


def _match_unordered(ps: list[Expr], es: list[Expr], b: Bindings) -> Bindings | None:
    if not ps:
        return b
    first, rest = ps[0], ps[1:]
    for i, e in enumerate(es):
        got = _match(first, e, b)
        if got is not None:
            got = _match_unordered(rest, es[:i] + es[i + 1:], got)
            if got is not None:
                return got
    return None


def instantiate(template: Expr, bindings: Bindings) -> Expr:
    mapping = {}
    for h in _holes(template):
        if h.name not in bindings:
            raise KeyError(f"unbound pattern variable ~{h.name}")
        mapping[h] = bindings[h.name]
    return canon(substitute_many(template, mapping))


def _holes(e: Expr):
    if isinstance(e, Hole):
        yield e
    for c in e.children():
        yield from _holes(c)


@dataclass(frozen=True)
class Rule:
    lhs: Expr
    rhs: Expr
    recursive: bool
    text: str


def _strip_integrate(side: str, line: str) -> tuple[str, bool]:
    side = side.strip()
    if side.startswith("integrate(") and side.endswith(")"):
        return side[len("integrate("):-1], True
    return side, False


def parse_rule(line: str) -> Rule:
    if "=>" not in line:
        raise ValueError(f"rule needs '=>': {line!r}")
    left, right = line.split("=>", 1)
    lhs_src, ok = _strip_integrate(left, line)
    if not ok:
        raise ValueError(f"rule left side must be integrate(...): {line!r}")
    rhs_src, recursive = _strip_integrate(right, line)
    return Rule(parse_pattern(lhs_src), parse_pattern(rhs_src), recursive, line.strip())


class RuleTable:
    """Ordered rules; the first match wins."""

    def __init__(self, rules):
        self.rules = tuple(rules)

    @classmethod
    def from_text(cls, text: str) -> "RuleTable":
        rules = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if line:
                rules.append(parse_rule(line))
        return cls(rules)

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def integrate(self, g: Expr, var: str, depth: int = 0) -> Expr | None:
        if depth > 4:
            return None
        v = Sym(var)
        for rule in self.rules:
            b = match(rule.lhs, g)
            if b is None or b.get("x", v) != v:
                continue
            out = instantiate(rule.rhs, b)
            if rule.recursive:
                return self.integrate(out, var, depth + 1)
            return out
        return None


@lru_cache(maxsize=None)
def default_table() -> RuleTable:
    text = resources.files("symnumint").joinpath("data/basic_integrals.rules").read_text()
    return RuleTable.from_text(text)


@lru_cache(maxsize=4096)
def integrate_basic(g: Expr, var: str = "x") -> Expr | None:
    """Antiderivative of ``g`` up to a constant factor, if the table covers it."""
    return default_table().integrate(g, var)
