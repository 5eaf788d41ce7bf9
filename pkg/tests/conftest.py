from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from symnumint.expr import Const, Sym, add, differentiate, evaluate_many, fn, mul, pow_

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

X = Sym("x")
UNARY = ("exp", "log", "sin", "cos", "tan", "cot", "sec", "csc", "sinh", "cosh",
         "tanh", "coth", "asin", "acos", "atan", "asinh", "acosh", "atanh")

small_fracs = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4))
leaves = st.one_of(st.just(X), small_fracs.map(Const))


def _extend(children):
    exps = st.sampled_from([Fraction(-2), Fraction(-1), Fraction(1, 2), Fraction(2), Fraction(3)])
    return st.one_of(
        st.tuples(children, children).map(lambda t: add(*t)),
        st.tuples(children, children).map(lambda t: mul(*t)),
        st.tuples(children, exps).map(lambda t: pow_(t[0], Const(t[1]))),
        st.tuples(st.sampled_from(UNARY), children).map(lambda t: fn(*t)),
    )


# random expression trees of depth at most 4
exprs = st.recursive(leaves, _extend, max_leaves=8)
var_exprs = exprs.filter(lambda e: e.has("x"))


def random_expr(rng: np.random.Generator, depth: int = 4):
    """Seeded random expression tree for bulk sweeps (outside hypothesis)."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.6:
            return X
        return Const(Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4))))
    op = rng.integers(4)
    if op == 0:
        return add(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if op == 1:
        return mul(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if op == 2:
        k = [Fraction(-2), Fraction(-1), Fraction(1, 2), Fraction(2), Fraction(3)][rng.integers(5)]
        return pow_(random_expr(rng, depth - 1), Const(k))
    return fn(UNARY[rng.integers(len(UNARY))], random_expr(rng, depth - 1))


def fd_check(e, points, h=1e-6):
    """(checked, worst relative error) of d/dx e against central differences.

    Points where the difference quotients at h and 2h disagree (a pole or a
    branch cut within reach) or the derivative is tiny are skipped.
    """
    d = evaluate_many(differentiate(e), points)
    with np.errstate(all="ignore"):
        F = lambda z: evaluate_many(e, z)
        fd1 = (F(points + h) - F(points - h)) / (2 * h)
        fd2 = (F(points + 2 * h) - F(points - 2 * h)) / (4 * h)
        val = F(points)
        ok = np.isfinite(d) & np.isfinite(fd1) & np.isfinite(fd2) & np.isfinite(val)
        ok &= np.abs(d) > 1e-6
        ok &= np.abs(val) < 1e4 * np.maximum(np.abs(d), 1)
        ok &= np.abs(fd1 - fd2) <= 1e-7 * np.maximum(np.abs(fd1), 1)
        err = np.abs(fd1 - d) / np.abs(d)
    if not ok.any():
        return 0, 0.0
    return int(ok.sum()), float(np.max(err[ok]))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(test_acceptance.RESULTS.items()):
            terminalreporter.write_line(line)
