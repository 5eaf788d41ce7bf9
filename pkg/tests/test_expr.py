from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from symnumint.expr import (Add, Const, Mul, Pow, Sym, add, differentiate, evaluate,
                            evaluate_many, expand, fn, mul, pow_, strip_constant, to_str)
from symnumint.parser import parse

from .conftest import X, exprs, fd_check, var_exprs


def test_identities_fold():
    assert parse("x^1") == X
    assert parse("x^0") == Const(1)
    assert parse("1*x") == X and parse("0+x") == X
    assert parse("exp(0)") == Const(1) and parse("log(1)") == Const(0)


def test_like_terms_and_bases_merge():
    assert parse("x+x") == mul(Const(2), X)
    assert parse("x*x") == pow_(X, Const(2))
    assert parse("x-x") == Const(0)
    assert parse("sin(x)*sin(x)^2") == pow_(fn("sin", X), Const(3))


def test_sqrt_is_half_power():
    assert parse("sqrt(1+x)") == pow_(parse("1+x"), Const(Fraction(1, 2)))
    assert to_str(parse("sqrt(1+x)")) == "sqrt(1 + x)"


def test_no_trig_identities():
    e = parse("sin(x)^2 + cos(x)^2")
    assert isinstance(e, Add) and len(e.terms) == 2


@given(exprs, exprs)
def test_add_mul_commute(a, b):
    assert add(a, b) == add(b, a)
    assert mul(a, b) == mul(b, a)


@given(exprs, exprs, exprs)
def test_add_associates(a, b, c):
    assert add(add(a, b), c) == add(a, add(b, c))


@given(exprs)
def test_print_parse_roundtrip(e):
    assert parse(to_str(e), univariate=False) == e


@given(exprs)
def test_canonical_is_idempotent(e):
    from symnumint.expr import canon
    assert canon(e) == e


def test_strip_constant():
    c, core = strip_constant(parse("3*x + 6*sin(x)"))
    assert c == 3 and core == parse("x + 2*sin(x)")
    c, core = strip_constant(parse("-2*x^2"))
    assert c == -2 and core == parse("x^2")
    with pytest.raises(ValueError):
        strip_constant(Const(0))


def test_expand_distributes():
    assert expand(parse("(1+x)^2")) == parse("1 + 2*x + x^2")
    assert expand(parse("(1+x)*(1+sin(x))")) == parse("1 + x + sin(x) + x*sin(x)")
    # function arguments are left alone
    assert expand(parse("sin((1+x)^2)")) == parse("sin((1+x)^2)")


def test_derivative_closed_forms():
    assert differentiate(parse("tan(x)")) == parse("1 + tan(x)^2")
    assert differentiate(parse("cot(x)")) == mul(Const(-1), parse("1 + cot(x)^2"))
    assert differentiate(parse("tanh(x)")) == parse("1 - tanh(x)^2")
    assert differentiate(parse("x*sin(x)")) == parse("sin(x) + x*cos(x)")
    assert differentiate(parse("5")) == Const(0)


SYMPY_CASES = ["x*sin(x)", "exp(x)*sin(x)", "cot(x)^4", "log(x)/(x*sqrt(1+log(x)))",
               "sin(x)/(1+2*cos(x))", "atan(x^2)", "sec(x)*csc(x)", "asinh(x)*cosh(x)",
               "coth(x)^3", "x^(1/2)*log(x)", "asin(x/3)", "exp(x^2)/(1+x)"]


@pytest.mark.parametrize("src", SYMPY_CASES)
def test_derivative_matches_sympy(src):
    xs = sympy.Symbol("x")
    ref = sympy.diff(sympy.sympify(src.replace("^", "**")), xs)
    f = sympy.lambdify(xs, ref, "numpy")
    pts = np.array([0.7 + 0.3j, 1.3 - 0.4j, -0.6 + 0.9j, 2.1 + 0.2j])
    ours = evaluate_many(differentiate(parse(src)), pts)
    np.testing.assert_allclose(ours, f(pts), rtol=1e-10)


@given(var_exprs)
def test_derivative_finite_differences(e):
    pts = np.array([0.71 + 0.43j, -0.37 + 1.13j, 1.29 - 0.58j, 0.42 - 0.91j])
    n, err = fd_check(e, pts)
    if n:
        assert err < 1e-5


@given(exprs, exprs)
def test_derivative_linear_and_product(a, b):
    pts = np.array([0.6 + 0.2j, 1.1 - 0.7j])
    lhs = evaluate_many(differentiate(mul(a, b)), pts)
    rhs = evaluate_many(add(mul(differentiate(a), b), mul(a, differentiate(b))), pts)
    ok = np.isfinite(lhs) & np.isfinite(rhs) & (np.abs(lhs) < 1e8)
    np.testing.assert_allclose(lhs[ok], rhs[ok], rtol=1e-7, atol=1e-9)


def test_evaluate_poles_are_not_finite():
    assert not np.isfinite(evaluate(parse("1/x"), 0))
    assert not np.isfinite(evaluate(parse("log(x)"), 0))
    assert not np.isfinite(evaluate(parse("cot(x)"), 0))


def test_evaluate_vectorized_matches_scalar():
    e = parse("x*sin(x) + exp(x)/(1+x^2)")
    pts = np.array([0.5 + 0.5j, -1.0 + 2.0j, 3.0 - 1.0j])
    vec = evaluate_many(e, pts)
    assert np.allclose(vec, [evaluate(e, p) for p in pts])
    cache = {}
    assert np.allclose(evaluate_many(e, pts, "x", cache), vec)


def test_printing():
    assert to_str(parse("x*sin(x) - x*cos(x)")) in ("x*sin(x) - x*cos(x)", "-x*cos(x) + x*sin(x)")
    assert to_str(parse("1/(1+cos(x))")) == "1/(1 + cos(x))"
    assert to_str(parse("-1/3*cot(x)^3")) == "-1/3*cot(x)^3"
    assert to_str(parse("2*i*x")) == "2*i*x"


def test_node_types():
    e = parse("x*sin(x)^2")
    assert isinstance(e, Mul)
    assert any(isinstance(f, Pow) for f in e.factors)
    assert e.has("x") and not Const(3).has("x")
    assert parse("y + 1", univariate=False).free_symbols == {"y"}
    assert isinstance(Sym("t"), Sym)


@given(st.integers(-20, 20), st.integers(1, 20))
def test_exact_rational_constants(p, q):
    e = mul(Const(Fraction(p, q)), X)
    c, _ = strip_constant(e) if p else (0, None)
    assert c == Fraction(p, q)
