"""Candidate antiderivative terms.

An integrand is factored as ``f = c * prod(u_i ** n_i)`` with ``u_i = g_i(v_i)``
and ``g_i`` a function the rule table can integrate.  The first generator
combines, per factor, the basic integral of ``g_i`` with the cofactor
``(1/v_i') * df/du_i``; later generators apply ``(1 + x)(1 + d/dx)`` to every
candidate.  Terms are kept modulo constant factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .expr import (ONE, Add, Const, Expr, Fn, Mul, Pow, Sym, add,
                   differentiate, evaluate_many, expand, fn, is_int_const,
                   mul, pow_, strip_constant, substitute)
from .rules import integrate_basic

PLACEHOLDER = "_v"
MAX_TERMS = 200

RECIPROCAL = {
    "sin": "csc", "cos": "sec", "tan": "cot", "cot": "tan", "sec": "cos", "csc": "sin",
    "tanh": "coth", "coth": "tanh",
}
EXACT_CLASS = ("exp", "sin", "cos", "sinh", "cosh")


class CandidateError(Exception):
    pass


class UndecomposableFactor(CandidateError):
    pass


class NoUsableFactor(CandidateError):
    pass


class TermBudgetExceeded(CandidateError):
    pass


class NotExactClass(CandidateError):
    pass


class StepLimit(CandidateError):
    pass


@dataclass(frozen=True)
class Factor:
    """One factor ``u = g(v)`` raised to the positive integer ``n``.

    ``g`` is a template over the placeholder symbol ``_v``; ``None`` marks a
    factor the rule table cannot handle.
    """
    u: Expr
    g: Expr | None
    v: Expr
    n: int

    @property
    def usable(self) -> bool:
        return self.g is not None and integrate_basic(self.g, PLACEHOLDER) is not None

    def integral(self) -> Expr | None:
        if self.g is None:
            return None
        out = integrate_basic(self.g, PLACEHOLDER)
        return None if out is None else substitute(out, Sym(PLACEHOLDER), self.v)


@dataclass(frozen=True)
class Factorization:
    coefficient: complex
    factors: tuple[Factor, ...]

    def product(self) -> Expr:
        return mul(*(pow_(f.u, Const(f.n)) for f in self.factors))


def _classify(b: Expr, n: int, var: str) -> Factor:
    placeholder = Sym(PLACEHOLDER)
    if isinstance(b, Fn):
        return Factor(b, Fn(b.kind, placeholder), b.arg, n)
    if isinstance(b, Pow) and not b.exp.has(var):
        return Factor(b, pow_(placeholder, b.exp), b.base, n)
    if isinstance(b, Pow):
        return Factor(b, None, b, n)
    return Factor(b, placeholder, b, n)


def decompose(f: Expr, var: str = "x") -> Factorization:
    """Factor ``f`` into powers of ``g(v)`` forms."""
    if not f.has(var):
        raise UndecomposableFactor(f"{f} does not depend on {var}")
    c, core = strip_constant(f)
    parts = core.factors if isinstance(core, Mul) else (core,)
    out = []
    for p in parts:
        if isinstance(p, Pow) and is_int_const(p.exp):
            k = int(p.exp.value)
            if k > 0:
                out.append(_classify(p.base, k, var))
                continue
            if isinstance(p.base, Fn) and p.base.kind in RECIPROCAL:
                flipped = fn(RECIPROCAL[p.base.kind], p.base.arg)
                out.append(_classify(flipped, -k, var))
                continue
        out.append(_classify(p, 1, var))
    return Factorization(complex(c), tuple(out))


def cores_of(e: Expr, var: str = "x") -> list[Expr]:
    """Coefficient-free, variable-dependent terms of the expanded expression."""
    e = expand(e)
    terms = e.terms if isinstance(e, Add) else (e,)
    out = []
    seen = set()
    for t in terms:
        if not t.has(var):
            continue
        _, core = strip_constant(t)
        if core not in seen:
            seen.add(core)
            out.append(core)
    return out


# ---------------------------------------------------------------------------
# candidate sets

_PROBE_POINTS = np.array([0.71 + 0.43j, -0.37 + 1.13j, 1.29 - 0.58j, -0.84 - 0.91j])


class CandidateSet:
    """Ordered candidate cores, deduplicated structurally and numerically.

    Two cores whose values at a few probe points are proportional (ratio
    constant within 1e-10) are the same class modulo a constant factor; the
    first one seen is kept.
    """

    def __init__(self, terms=(), var: str = "x"):
        self.var = var
        self.terms: list[Expr] = []
        self._seen: set[Expr] = set()
        self._probes: list[np.ndarray] = []
        for t in terms:
            self.add(t)

    def add(self, term: Expr) -> bool:
        if not term.has(self.var):
            return False
        _, core = strip_constant(term)
        if core in self._seen:
            return False
        vals = evaluate_many(core, _PROBE_POINTS, self.var)
        if np.all(np.isfinite(vals)) and np.all(vals != 0):
            for other in self._probes:
                ratio = vals / other
                if np.all(np.isfinite(ratio)) and \
                        np.max(np.abs(ratio - ratio[0])) <= 1e-10 * abs(ratio[0]):
                    self._seen.add(core)
                    return False
            self._probes.append(vals)
        self._seen.add(core)
        self.terms.append(core)
        return True

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __contains__(self, item: Expr):
        return strip_constant(item)[1] in self._seen

    def __getitem__(self, i):
        return self.terms[i]

    def union(self, other) -> "CandidateSet":
        out = CandidateSet(self.terms, self.var)
        for t in other:
            out.add(t)
        return out

    def __repr__(self):
        return "CandidateSet{" + ", ".join(map(str, self.terms)) + "}"


@dataclass
class Generator:
    index: int
    expr: Expr
    var: str = "x"
    _terms: CandidateSet | None = field(default=None, repr=False, compare=False)


def terms_of(g: Generator) -> CandidateSet:
    if g._terms is None:
        g._terms = CandidateSet(cores_of(g.expr, g.var), g.var)
    return g._terms


def _has_constant_term(e: Expr, var: str) -> bool:
    terms = e.terms if isinstance(e, Add) else (e,)
    return any(not t.has(var) for t in terms)


def _sum_of(cores) -> Expr:
    return add(ONE, *cores)


def generator0(f: Expr, fac: Factorization | None = None, var: str = "x") -> Generator:
    """First generator: per factor, (1 + int g(v)) * (1 + (1/v') df/du).

    Sums are handled term by term.
    """
    if isinstance(f, Add) and fac is None:
        out = CandidateSet(var=var)
        usable = False
        for t in f.terms:
            if not t.has(var):
                out.add(Sym(var))
                continue
            try:
                for c in terms_of(generator0(t, var=var)):
                    out.add(c)
                usable = True
            except NoUsableFactor:
                for c in terms_of(fallback_generator(t, var)):
                    out.add(c)
        if not usable and not len(out):
            raise NoUsableFactor(f"no factor of {f} has a basic integral")
        return Generator(0, _sum_of(out.terms), var, out)

    if fac is None:
        fac = decompose(f, var)
    out = CandidateSet(var=var)
    usable = False
    for i, fi in enumerate(fac.factors):
        others = [pow_(fj.u, Const(fj.n)) for j, fj in enumerate(fac.factors) if j != i]
        dfdu = mul(Const(fi.n), pow_(fi.u, Const(fi.n - 1)), *others)
        integral = fi.integral()
        if integral is not None:
            usable = True
            dv = differentiate(fi.v, var)
            cofactor = mul(dfdu, pow_(dv, Const(-1)))
            for c in cores_of(mul(add(ONE, integral), add(ONE, cofactor)), var):
                out.add(c)
        # a composite factor may also match a table entry as a whole, with v = x
        direct = _direct_integral(fi, var)
        if direct is not None:
            usable = True
            for c in cores_of(mul(add(ONE, direct), add(ONE, dfdu)), var):
                out.add(c)
    if not usable:
        raise NoUsableFactor(f"no factor of {f} has a basic integral")
    return Generator(0, _sum_of(out.terms), var, out)


def _direct_integral(fi: Factor, var: str) -> Expr | None:
    x = Sym(var)
    if fi.v == x or not isinstance(fi.u, Pow):
        return None
    out = integrate_basic(substitute(fi.u, x, Sym(PLACEHOLDER)), PLACEHOLDER)
    return None if out is None else substitute(out, Sym(PLACEHOLDER), x)


def fallback_generator(f: Expr, var: str = "x") -> Generator:
    """Candidates from (1 + x)(f + f') when no factor can be integrated."""
    x = Sym(var)
    _, core = strip_constant(f)
    out = CandidateSet(cores_of(mul(add(ONE, x), add(core, differentiate(core, var))), var), var)
    return Generator(0, _sum_of(out.terms), var, out)


def next_generator(g: Generator, max_terms: int = MAX_TERMS) -> Generator:
    """Apply (1 + x)(1 + d/dx) to every candidate of ``g``.

    Each candidate is treated separately so coefficients never cancel a
    term; the result therefore contains every term of ``g``.
    """
    var = g.var
    x = Sym(var)
    current = terms_of(g)
    out = CandidateSet(current.terms, var)
    # a constant term of G_i (the integration constant) contributes x
    seeds = (ONE, *current) if _has_constant_term(g.expr, var) else tuple(current)
    for theta in seeds:
        step = mul(add(ONE, x), add(theta, differentiate(theta, var)))
        for c in cores_of(step, var):
            out.add(c)
            if len(out) > max_terms:
                raise TermBudgetExceeded(
                    f"generator {g.index + 1} exceeds {max_terms} terms")
    return Generator(g.index + 1, _sum_of(out.terms), var, out)


# ---------------------------------------------------------------------------
# exact class: products of powers of exp, sin, cos, sinh, cosh of the variable


def exact_class_powers(f: Expr, var: str = "x") -> dict[str, int] | None:
    """Exponents of exp/sin/cos/sinh/cosh if ``f`` is in the exact class, else None."""
    if not f.has(var):
        return None
    _, core = strip_constant(f)
    parts = core.factors if isinstance(core, Mul) else (core,)
    powers = dict.fromkeys(EXACT_CLASS, 0)
    x = Sym(var)
    for p in parts:
        base, k = p, 1
        if isinstance(p, Pow):
            if not is_int_const(p.exp) or p.exp.value < 1:
                return None
            base, k = p.base, int(p.exp.value)
        if not (isinstance(base, Fn) and base.kind in EXACT_CLASS and base.arg == x):
            return None
        powers[base.kind] += k
    return powers


def is_exact_class(f: Expr, var: str = "x") -> bool:
    return exact_class_powers(f, var) is not None


def closure_exact(f: Expr, max_steps: int = 10_000, var: str = "x") -> CandidateSet:
    """Close ``{f}`` under differentiation (modulo constants)."""
    if not is_exact_class(f, var):
        raise NotExactClass(f"{f} is not a product of exp/sin/cos/sinh/cosh powers")
    _, core = strip_constant(f)
    out = CandidateSet([core], var)
    queue = [core]
    steps = 0
    while queue:
        steps += 1
        if steps > max_steps:
            raise StepLimit(f"closure of {f} did not terminate in {max_steps} steps")
        theta = queue.pop(0)
        for c in cores_of(differentiate(theta, var), var):
            if out.add(c):
                queue.append(c)
    return out


def generators(f: Expr, var: str = "x", max_terms: int = MAX_TERMS):
    """Yield G_0, G_1, ... lazily."""
    try:
        g = generator0(f, var=var)
    except (NoUsableFactor, UndecomposableFactor):
        g = fallback_generator(f, var)
    while True:
        yield g
        g = next_generator(g, max_terms)
