import pytest

from symnumint.expr import Const, Hole, Sym, to_str
from symnumint.parser import ParseError, parse, parse_pattern, variable_of


@pytest.mark.parametrize("src", ["x*sin(x)", "exp(x)*sin(x)", "cot(x)^4", "1/(1+2*cos(x))",
                                 "log(x)/(x*sqrt(1+log(x)))", "x^-2", "-x^2", "2^3^2"])
def test_parses(src):
    e = parse(src)
    assert parse(to_str(e)) == e


def test_power_is_right_associative():
    assert parse("2^3^2") == Const(512)


def test_unary_minus_binds_looser_than_power():
    assert parse("-x^2") == parse("-(x^2)")


@pytest.mark.parametrize("src,pos", [("(((", 3), ("x +", 3), ("sin x", 0), ("x $ 2", 2)])
def test_syntax_errors_report_position(src, pos):
    with pytest.raises(ParseError) as info:
        parse(src)
    assert info.value.position == pos


def test_unknown_function():
    with pytest.raises(ParseError):
        parse("foo(x)")


def test_univariate_contract():
    with pytest.raises(ValueError):
        parse("x*y")
    assert parse("x*y", univariate=False).free_symbols == {"x", "y"}


def test_constants():
    assert parse("i*i") == Const(-1)
    assert abs(complex(parse("pi").value) - 3.141592653589793) < 1e-15


def test_variable_of():
    assert variable_of(parse("t*sin(t)")) == "t"
    assert variable_of(parse("3")) == "x"


def test_pattern_holes():
    p = parse_pattern("~x^~k::is_const")
    assert p.base == Hole("x") and p.exp == Hole("k", "is_const")
    assert isinstance(parse_pattern("sin(~x)").arg, Hole)
    assert parse("sin(x)").arg == Sym("x")
