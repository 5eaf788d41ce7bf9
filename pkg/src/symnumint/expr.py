"""Immutable expression trees over a single variable with complex constants.

Every public constructor (``add``, ``mul``, ``pow_``, ``fn``) returns a
canonical node: sums and products are flat, constants folded, like terms
and like bases merged, and operands sorted by a fixed total order
(constants, symbols, powers, applications, then products and sums; ties by
printed form).  Canonicalization is best-effort; no trigonometric or
logarithmic identities are applied.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Union

import numpy as np

Number = Union[Fraction, complex]

FUNCTIONS = (
    "exp", "log", "sin", "cos", "tan", "cot", "sec", "csc",
    "sinh", "cosh", "tanh", "coth",
    "asin", "acos", "atan", "asinh", "acosh", "atanh",
    "sqrt",
)

# rank used by the canonical operand order
_RANK_CONST, _RANK_SYM, _RANK_POW, _RANK_FN, _RANK_MUL, _RANK_ADD, _RANK_HOLE = range(7)


def _num(value) -> Number:
    """Normalize a Python number: exact rationals stay exact, integral floats become exact."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, int)):
        return Fraction(int(value))
    value = complex(value)
    if value.imag == 0.0 and math.isfinite(value.real) and value.real == int(value.real) \
            and abs(value.real) < 2**53:
        return Fraction(int(value.real))
    return value


def is_exact(value: Number) -> bool:
    return isinstance(value, Fraction)


class Expr:
    __slots__ = ("_hash", "_str", "_free")
    rank = -1

    def _key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr) or self.rank != other.rank:
            return False
        if hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            self._hash = hash((self.rank, self._key()))
            return self._hash

    def __str__(self):
        try:
            return self._str
        except AttributeError:
            self._str = to_str(self)
            return self._str

    def __repr__(self):
        return f"{type(self).__name__}({self})"

    @property
    def sort_key(self) -> tuple:
        return (self.rank, str(self))

    @property
    def free_symbols(self) -> frozenset:
        try:
            return self._free
        except AttributeError:
            self._free = self._compute_free()
            return self._free

    def _compute_free(self) -> frozenset:
        out = frozenset()
        for c in self.children():
            out |= c.free_symbols
        return out

    def children(self) -> tuple:
        return ()

    def has(self, name: str) -> bool:
        return name in self.free_symbols

    # operator sugar
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, pow_(as_expr(other), MINUS_ONE))

    def __rtruediv__(self, other):
        return mul(as_expr(other), pow_(self, MINUS_ONE))

    def __pow__(self, other):
        return pow_(self, as_expr(other))

    def __rpow__(self, other):
        return pow_(as_expr(other), self)

    def __neg__(self):
        return neg(self)


class Const(Expr):
    __slots__ = ("value",)
    rank = _RANK_CONST

    def __init__(self, value):
        self.value = _num(value)

    def _key(self):
        return (self.value,)

    def _compute_free(self):
        return frozenset()


class Sym(Expr):
    __slots__ = ("name",)
    rank = _RANK_SYM

    def __init__(self, name: str):
        self.name = name

    def _key(self):
        return (self.name,)

    def _compute_free(self):
        return frozenset((self.name,))


class Add(Expr):
    __slots__ = ("terms",)
    rank = _RANK_ADD

    def __init__(self, terms: tuple):
        self.terms = terms

    def _key(self):
        return self.terms

    def children(self):
        return self.terms


class Mul(Expr):
    __slots__ = ("factors",)
    rank = _RANK_MUL

    def __init__(self, factors: tuple):
        self.factors = factors

    def _key(self):
        return self.factors

    def children(self):
        return self.factors


class Pow(Expr):
    __slots__ = ("base", "exp")
    rank = _RANK_POW

    def __init__(self, base: Expr, exp: Expr):
        self.base = base
        self.exp = exp

    def _key(self):
        return (self.base, self.exp)

    def children(self):
        return (self.base, self.exp)


class Fn(Expr):
    __slots__ = ("kind", "arg")
    rank = _RANK_FN

    def __init__(self, kind: str, arg: Expr):
        self.kind = kind
        self.arg = arg

    def _key(self):
        return (self.kind, self.arg)

    def children(self):
        return (self.arg,)


class Hole(Expr):
    """Pattern variable ``~name`` with an optional guard predicate name."""

    __slots__ = ("name", "guard")
    rank = _RANK_HOLE

    def __init__(self, name: str, guard: str | None = None):
        self.name = name
        self.guard = guard

    def _key(self):
        return (self.name, self.guard)

    def _compute_free(self):
        return frozenset()


ZERO = Const(0)
ONE = Const(1)
MINUS_ONE = Const(-1)
HALF = Const(Fraction(1, 2))


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, str):
        return Sym(value)
    return Const(value)


def is_const(e: Expr, value=None) -> bool:
    if not isinstance(e, Const):
        return False
    return value is None or e.value == value


def is_int_const(e: Expr) -> bool:
    return isinstance(e, Const) and isinstance(e.value, Fraction) and e.value.denominator == 1


# ---------------------------------------------------------------------------
# canonical constructors


def _split_coeff(e: Expr) -> tuple[Number, Expr]:
    """Split an explicit leading constant off a term: 3*x*y -> (3, x*y)."""
    if isinstance(e, Mul) and isinstance(e.factors[0], Const):
        rest = e.factors[1:]
        return e.factors[0].value, rest[0] if len(rest) == 1 else Mul(rest)
    if isinstance(e, Const):
        return e.value, ONE
    return Fraction(1), e


def _scale(c: Number, core: Expr) -> Expr:
    if c == 1:
        return core
    if core == ONE:
        return Const(c)
    if isinstance(core, Mul):
        return Mul((Const(c),) + core.factors)
    return Mul((Const(c), core))


def add(*args: Expr) -> Expr:
    coeffs: dict[Expr, Number] = {}
    const: Number = Fraction(0)
    stack = list(args)
    stack.reverse()
    while stack:
        a = stack.pop()
        if isinstance(a, Add):
            stack.extend(reversed(a.terms))
            continue
        if isinstance(a, Const):
            const = _num(const + a.value)
            continue
        c, core = _split_coeff(a)
        coeffs[core] = _num(coeffs.get(core, 0) + c)
    items = sorted(((core, c) for core, c in coeffs.items() if c != 0),
                   key=lambda kv: kv[0].sort_key)
    terms = [_scale(c, core) for core, c in items]
    if const != 0:
        terms.insert(0, Const(const))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return Add(tuple(terms))


def _base_exp(e: Expr) -> tuple[Expr, Expr]:
    if isinstance(e, Pow):
        return e.base, e.exp
    return e, ONE


def mul(*args: Expr) -> Expr:
    const: Number = Fraction(1)
    exps: dict[Expr, list[Expr]] = {}
    stack = list(args)
    stack.reverse()
    while stack:
        a = stack.pop()
        if isinstance(a, Mul):
            stack.extend(reversed(a.factors))
            continue
        if isinstance(a, Const):
            const = _num(const * a.value)
            continue
        b, e = _base_exp(a)
        exps.setdefault(b, []).append(e)
    if const == 0:
        return ZERO
    factors = []
    regroup = False
    for b, es in exps.items():
        p = pow_(b, es[0]) if len(es) == 1 else pow_(b, add(*es))
        if isinstance(p, Const):
            const = _num(const * p.value)
        elif isinstance(p, Mul):
            regroup = True
            factors.append(p)
        elif p != ONE:
            factors.append(p)
    if regroup:
        return mul(Const(const), *factors)
    if const == 0:
        return ZERO
    factors.sort(key=lambda f: f.sort_key)
    if const != 1:
        factors.insert(0, Const(const))
    if not factors:
        return ONE
    if len(factors) == 1:
        return factors[0]
    return Mul(tuple(factors))


def _fold_pow(b: Number, e: Number) -> Expr | None:
    if isinstance(e, Fraction) and e.denominator == 1:
        if isinstance(b, Fraction):
            if b == 0 and e < 0:
                return None
            return Const(b ** int(e))
        if b == 0 and e < 0:
            return None
        return Const(b ** int(e))
    if isinstance(b, complex) or isinstance(e, complex):
        if b == 0:
            return None
        return Const(cmath.exp(complex(e) * cmath.log(complex(b))))
    return None


def pow_(b: Expr, e: Expr) -> Expr:
    if is_const(e, 0):
        return ONE
    if is_const(e, 1):
        return b
    if is_const(b, 1):
        return ONE
    if isinstance(b, Const) and isinstance(e, Const):
        if b.value == 0 and isinstance(e.value, Fraction) and e.value > 0:
            return ZERO
        folded = _fold_pow(b.value, e.value)
        if folded is not None:
            return folded
        if b.value == 0:
            # every negative power of zero is the same non-finite value
            return Pow(ZERO, MINUS_ONE)
        return Pow(b, e)
    if is_int_const(e):
        if isinstance(b, Pow):
            return pow_(b.base, mul(b.exp, e))
        if isinstance(b, Mul):
            return mul(*(pow_(f, e) for f in b.factors))
    return Pow(b, e)


def fn(kind: str, arg: Expr) -> Expr:
    if kind not in FUNCTIONS:
        raise ValueError(f"unknown function {kind!r}")
    if kind == "sqrt":
        return pow_(arg, HALF)
    if kind == "exp" and is_const(arg, 0):
        return ONE
    if kind == "log" and is_const(arg, 1):
        return ZERO
    return Fn(kind, arg)


def neg(e: Expr) -> Expr:
    return mul(MINUS_ONE, e)


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, neg(b))


def div(a: Expr, b: Expr) -> Expr:
    return mul(a, pow_(b, MINUS_ONE))


def rebuild(e: Expr, children: Iterable[Expr]) -> Expr:
    """Reconstruct a node of the same kind from new children (canonicalizing)."""
    children = tuple(children)
    if isinstance(e, Add):
        return add(*children)
    if isinstance(e, Mul):
        return mul(*children)
    if isinstance(e, Pow):
        return pow_(*children)
    if isinstance(e, Fn):
        return fn(e.kind, children[0])
    return e


def canon(e: Expr) -> Expr:
    """Re-run canonicalization bottom-up."""
    if not e.children():
        return e
    return rebuild(e, (canon(c) for c in e.children()))


# ---------------------------------------------------------------------------
# structural utilities


def substitute(e: Expr, target: Expr, replacement: Expr) -> Expr:
    if e == target:
        return replacement
    kids = e.children()
    if not kids:
        return e
    new = tuple(substitute(c, target, replacement) for c in kids)
    if all(a is b for a, b in zip(new, kids)):
        return e
    return rebuild(e, new)


def substitute_many(e: Expr, mapping: dict[Expr, Expr]) -> Expr:
    if e in mapping:
        return mapping[e]
    kids = e.children()
    if not kids:
        return e
    new = tuple(substitute_many(c, mapping) for c in kids)
    if all(a is b for a, b in zip(new, kids)):
        return e
    return rebuild(e, new)


def count_nodes(e: Expr) -> int:
    return 1 + sum(count_nodes(c) for c in e.children())


def walk(e: Expr):
    yield e
    for c in e.children():
        yield from walk(c)


def _distribute(factors: list[Expr]) -> Expr:
    partial = [ONE]
    for f in factors:
        if isinstance(f, Add):
            partial = [mul(p, t) for p in partial for t in f.terms]
        else:
            partial = [mul(p, f) for p in partial]
    return add(*partial)


MAX_EXPAND_POWER = 16


@lru_cache(maxsize=100_000)
def expand(e: Expr) -> Expr:
    """Distribute products over sums and expand small positive integer powers of sums.

    Function arguments are left untouched.
    """
    if isinstance(e, Add):
        return add(*(expand(t) for t in e.terms))
    if isinstance(e, Mul):
        return _distribute([expand(f) for f in e.factors])
    if isinstance(e, Pow):
        b = expand(e.base)
        if isinstance(b, Add) and is_int_const(e.exp) and 1 < e.exp.value <= MAX_EXPAND_POWER:
            return _distribute([b] * int(e.exp.value))
        return pow_(b, e.exp)
    return e


def strip_constant(e: Expr) -> tuple[Number, Expr]:
    """Split ``e`` into ``coefficient * core`` with the core's leading constant equal to 1.

    Variable-free factors (e.g. ``sqrt(3)``) are evaluated into the coefficient.
    """
    if is_const(e, 0):
        raise ValueError("cannot strip the constant of the zero expression")
    if not e.free_symbols:
        return _num(evaluate(e, 0j)), ONE
    if isinstance(e, Add):
        c = strip_constant(e.terms[0])[0]
        if c == 1:
            return Fraction(1), e
        inv = _num(1 / c)
        return c, add(*(_rescale(t, inv) for t in e.terms))
    if isinstance(e, Mul):
        c: Number = Fraction(1)
        rest = []
        for f in e.factors:
            if f.free_symbols:
                rest.append(f)
            else:
                c = _num(c * (f.value if isinstance(f, Const) else evaluate(f, 0j)))
        core = rest[0] if len(rest) == 1 else Mul(tuple(rest))
        return c, core
    return Fraction(1), e


def _rescale(term: Expr, factor: Number) -> Expr:
    c, core = strip_constant(term)
    return _scale(_num(c * factor), core)


# ---------------------------------------------------------------------------
# differentiation


def _d_fn(kind: str, a: Expr) -> Expr:
    if kind == "exp":
        return fn("exp", a)
    if kind == "log":
        return pow_(a, MINUS_ONE)
    if kind == "sin":
        return fn("cos", a)
    if kind == "cos":
        return neg(fn("sin", a))
    if kind == "tan":
        return add(ONE, pow_(fn("tan", a), Const(2)))
    if kind == "cot":
        return neg(add(ONE, pow_(fn("cot", a), Const(2))))
    if kind == "sec":
        return mul(fn("sec", a), fn("tan", a))
    if kind == "csc":
        return neg(mul(fn("csc", a), fn("cot", a)))
    if kind == "sinh":
        return fn("cosh", a)
    if kind == "cosh":
        return fn("sinh", a)
    if kind == "tanh":
        return sub(ONE, pow_(fn("tanh", a), Const(2)))
    if kind == "coth":
        return sub(ONE, pow_(fn("coth", a), Const(2)))
    if kind == "asin":
        return pow_(sub(ONE, pow_(a, Const(2))), Const(Fraction(-1, 2)))
    if kind == "acos":
        return neg(pow_(sub(ONE, pow_(a, Const(2))), Const(Fraction(-1, 2))))
    if kind == "atan":
        return pow_(add(ONE, pow_(a, Const(2))), MINUS_ONE)
    if kind == "asinh":
        return pow_(add(ONE, pow_(a, Const(2))), Const(Fraction(-1, 2)))
    if kind == "acosh":
        # principal branch: 1/(sqrt(a-1)*sqrt(a+1)), not 1/sqrt(a^2-1)
        return mul(pow_(sub(a, ONE), Const(Fraction(-1, 2))),
                   pow_(add(a, ONE), Const(Fraction(-1, 2))))
    if kind == "atanh":
        return pow_(sub(ONE, pow_(a, Const(2))), MINUS_ONE)
    if kind == "sqrt":
        return mul(HALF, pow_(a, Const(Fraction(-1, 2))))
    raise ValueError(kind)


@lru_cache(maxsize=200_000)
def differentiate(e: Expr, var: str = "x") -> Expr:
    if not e.has(var):
        return ZERO
    if isinstance(e, Sym):
        return ONE
    if isinstance(e, Add):
        return add(*(differentiate(t, var) for t in e.terms))
    if isinstance(e, Mul):
        fs = e.factors
        parts = []
        for i, f in enumerate(fs):
            df = differentiate(f, var)
            if df != ZERO:
                parts.append(mul(*fs[:i], df, *fs[i + 1:]))
        return add(*parts)
    if isinstance(e, Pow):
        b, k = e.base, e.exp
        if not k.has(var):
            return mul(k, pow_(b, sub(k, ONE)), differentiate(b, var))
        # b^k * (k' log b + k b'/b)
        return mul(e, add(mul(differentiate(k, var), fn("log", b)),
                          mul(k, differentiate(b, var), pow_(b, MINUS_ONE))))
    if isinstance(e, Fn):
        return mul(_d_fn(e.kind, e.arg), differentiate(e.arg, var))
    raise TypeError(f"cannot differentiate {e!r}")


# ---------------------------------------------------------------------------
# numeric evaluation

def _inv(z):
    return 1.0 / z


_NUMPY_FN: dict[str, Callable] = {
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "cot": lambda z: _inv(np.tan(z)),
    "sec": lambda z: _inv(np.cos(z)),
    "csc": lambda z: _inv(np.sin(z)),
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "coth": lambda z: _inv(np.tanh(z)),
    "asin": np.arcsin,
    "acos": np.arccos,
    "atan": np.arctan,
    "asinh": np.arcsinh,
    "acosh": np.arccosh,
    "atanh": np.arctanh,
    "sqrt": np.sqrt,
}


def _eval(e: Expr, z: np.ndarray, var: str, cache: dict | None):
    if cache is not None:
        hit = cache.get(e)
        if hit is not None:
            return hit
    if isinstance(e, Const):
        out = complex(e.value)
    elif isinstance(e, Sym):
        if e.name != var:
            raise ValueError(f"free symbol {e.name!r} has no value")
        out = z
    elif isinstance(e, Add):
        out = _eval(e.terms[0], z, var, cache)
        for t in e.terms[1:]:
            out = out + _eval(t, z, var, cache)
    elif isinstance(e, Mul):
        out = _eval(e.factors[0], z, var, cache)
        for f in e.factors[1:]:
            out = out * _eval(f, z, var, cache)
    elif isinstance(e, Pow):
        b = _eval(e.base, z, var, cache)
        if is_int_const(e.exp):
            k = int(e.exp.value)
            out = _int_power(b, k)
        elif is_const(e.exp, Fraction(1, 2)):
            out = np.sqrt(b)
        else:
            k = _eval(e.exp, z, var, cache)
            out = np.exp(k * np.log(b))
    elif isinstance(e, Fn):
        out = _NUMPY_FN[e.kind](_eval(e.arg, z, var, cache))
    else:
        raise TypeError(f"cannot evaluate {e!r}")
    if cache is not None:
        cache[e] = out
    return out


def _int_power(b, k: int):
    if k < 0:
        with np.errstate(all="ignore"):
            return np.complex128(1.0) / np.asarray(_int_power(b, -k), dtype=complex)
    result = None
    sq = b
    while k:
        if k & 1:
            result = sq if result is None else result * sq
        k >>= 1
        if k:
            sq = sq * sq
    return 1.0 + 0j if result is None else result


def evaluate_many(e: Expr, points, var: str = "x", cache: dict | None = None) -> np.ndarray:
    """Evaluate ``e`` at an array of complex points; poles give non-finite entries."""
    z = np.asarray(points, dtype=complex)
    with np.errstate(all="ignore"):
        out = _eval(e, z, var, cache)
    return np.broadcast_to(np.asarray(out, dtype=complex), z.shape).copy()


def evaluate(e: Expr, point, var: str = "x") -> complex:
    with np.errstate(all="ignore"):
        out = _eval(e, np.complex128(point), var, None)
    return complex(out)


# ---------------------------------------------------------------------------
# printing

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _fmt_float(x: float) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _const_str(v: Number) -> tuple[str, int]:
    if isinstance(v, Fraction):
        if v.denominator == 1:
            s = str(v.numerator)
            return s, (_PREC_NEG if v < 0 else _PREC_ATOM)
        prec = _PREC_NEG if v < 0 else _PREC_MUL
        return f"{v.numerator}/{v.denominator}", prec
    re_, im = v.real, v.imag
    if im == 0:
        return _fmt_float(re_), (_PREC_NEG if re_ < 0 else _PREC_ATOM)
    if re_ == 0:
        if im == 1:
            return "i", _PREC_ATOM
        if im == -1:
            return "-i", _PREC_NEG
        return f"{_fmt_float(im)}*i", (_PREC_NEG if im < 0 else _PREC_MUL)
    sign = "-" if im < 0 else "+"
    return f"({_fmt_float(re_)}{sign}{_fmt_float(abs(im))}*i)", _PREC_ATOM


def _is_negative_number(v: Number) -> bool:
    if isinstance(v, Fraction):
        return v < 0
    return (v.imag == 0 and v.real < 0) or (v.real == 0 and v.imag < 0)


def _paren(s: str, prec: int, need: int) -> str:
    return f"({s})" if prec < need else s


def _str(e: Expr) -> tuple[str, int]:
    if isinstance(e, Const):
        return _const_str(e.value)
    if isinstance(e, Sym):
        return e.name, _PREC_ATOM
    if isinstance(e, Hole):
        s = "~" + e.name + (f"::{e.guard}" if e.guard else "")
        return s, _PREC_ATOM
    if isinstance(e, Fn):
        return f"{e.kind}({_str(e.arg)[0]})", _PREC_ATOM
    if isinstance(e, Add):
        parts = [_paren(*_str(e.terms[0]), _PREC_ADD)]
        for t in e.terms[1:]:
            c, core = _split_coeff(t)
            if _is_negative_number(c):
                s, p = _str(_scale(_num(-c), core))
                parts.append(" - " + _paren(s, p, _PREC_MUL))
            else:
                s, p = _str(t)
                parts.append(" + " + _paren(s, p, _PREC_ADD + 1))
        return "".join(parts), _PREC_ADD
    if isinstance(e, Mul):
        return _mul_str(e)
    if isinstance(e, Pow):
        return _pow_str(e)
    raise TypeError(e)


def _neg_exponent(f: Expr) -> Expr | None:
    if isinstance(f, Pow) and isinstance(f.exp, Const) and _is_negative_number(f.exp.value):
        return pow_(f.base, Const(_num(-f.exp.value)))
    return None


def _mul_str(e: Mul) -> tuple[str, int]:
    c, core = _split_coeff(e)
    factors = core.factors if isinstance(core, Mul) else (core,)
    negative = _is_negative_number(c)
    if negative:
        c = _num(-c)
    num_strs = []
    if c != 1:
        s, p = _const_str(c)
        num_strs.append(s if p >= _PREC_MUL else f"({s})")
    den = []
    for f in factors:
        d = _neg_exponent(f)
        if d is None:
            num_strs.append(_paren(*_str(f), _PREC_MUL))
        else:
            den.append(d)
    s = "*".join(num_strs) or "1"
    if den:
        if len(den) == 1:
            ds = _paren(*_str(den[0]), _PREC_POW)
        else:
            ds = "(" + "*".join(_paren(*_str(f), _PREC_MUL) for f in den) + ")"
        s = f"{s}/{ds}"
    if negative:
        return "-" + s, _PREC_NEG
    return s, _PREC_MUL


def _pow_str(e: Pow) -> tuple[str, int]:
    if is_const(e.exp, Fraction(1, 2)):
        return f"sqrt({_str(e.base)[0]})", _PREC_ATOM
    d = _neg_exponent(e)
    if d is not None:
        return f"1/{_paren(*_str(d), _PREC_POW)}", _PREC_MUL
    bs = _paren(*_str(e.base), _PREC_ATOM)
    es, ep = _str(e.exp)
    return f"{bs}^{_paren(es, ep, _PREC_ATOM)}", _PREC_POW


def to_str(e: Expr) -> str:
    return _str(e)[0]
