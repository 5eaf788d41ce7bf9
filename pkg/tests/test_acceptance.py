"""End-to-end acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; the lines are printed together in the
pytest terminal summary (see ``conftest.pytest_terminal_summary``) and also
to stdout when run with ``-s``.
"""
import itertools
import time
from fractions import Fraction

import numpy as np
import pytest

from symnumint.corpus import expected_matches, goldens_path, load_corpus, run_corpus
from symnumint.expr import Const, Sym, add, differentiate, fn, mul, pow_
from symnumint.integrator import IntegratorConfig, integrate, verify
from symnumint.numeric import (LinearSystem, SamplerConfig, build_system, pivot_ratios,
                               prune_dependent, sample_points, stlsq)
from symnumint.parser import parse

from .conftest import fd_check, random_expr

RESULTS: dict[int, str] = {}


def record(number: int, ok: bool, text: str):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}"
    RESULTS[number] = line
    print(line)
    assert ok, line


# 1 ---------------------------------------------------------------------------

GOLDENS = [
    ("x*sin(x)", "sin(x) - x*cos(x)"),
    ("exp(x)*sin(x)", "(exp(x)*sin(x) - exp(x)*cos(x))/2"),
    ("cot(x)^4", "x + cot(x) - cot(x)^3/3"),
    ("sin(x)/(1+2*cos(x))", "-log(1+2*cos(x))/2"),
    ("1/(1+cos(x))", "sin(x)/(1+cos(x))"),
    ("log(x)/(x*sqrt(1+log(x)))", "2/3*log(x)*sqrt(1+log(x)) - 4/3*sqrt(1+log(x))"),
]


def test_criterion_1_golden_integrals():
    cfg = IntegratorConfig()
    fresh = IntegratorConfig(verify_points=7, verify_tol=1e-6)
    problems = []
    worst = 0.0
    for k, (src, ref) in enumerate(GOLDENS):
        f = parse(src)
        t0 = time.perf_counter()
        r = integrate(f, cfg)
        dt = time.perf_counter() - t0
        worst = max(worst, dt)
        if not r.solved:
            problems.append(f"{src}: unsolved")
            continue
        if not verify(r.antiderivative, f, fresh, np.random.default_rng([777, k])):
            problems.append(f"{src}: fresh verification failed")
        if not expected_matches(r.antiderivative, parse(ref), fresh, f):
            problems.append(f"{src}: differs from reference by a non-constant")
        if dt >= 5.0:
            problems.append(f"{src}: {dt:.2f} s")
        if src == "cot(x)^4" and r.generator_index > 1:
            problems.append(f"{src}: generator index {r.generator_index}")
    record(1, not problems,
           f"{len(GOLDENS) - len(problems)}/{len(GOLDENS)} goldens verified at 7 fresh points, "
           f"slowest {worst:.2f} s" + (f"; {problems}" if problems else ""))


# 2 ---------------------------------------------------------------------------

def test_criterion_2_documented_failure():
    r = integrate(parse("1/(1+2*cos(x))"))
    record(2, not r.solved, f"1/(1+2*cos(x)) -> {'Solved (hallucinated)' if r.solved else 'Unsolved'}")


# 3 ---------------------------------------------------------------------------

def test_criterion_3_desk_corpus():
    entries = load_corpus(goldens_path())
    t0 = time.perf_counter()
    report = run_corpus(entries)
    dt = time.perf_counter() - t0
    agg = report.aggregates["all"]
    rate = agg["success"] / agg["total"]
    record(3, rate >= 0.85 and dt < 300,
           f"{agg['success']}/{agg['total']} solved ({rate:.1%}, need 85%) in {dt:.1f} s")


# 4 ---------------------------------------------------------------------------

EXACT = ("exp", "sin", "cos", "sinh", "cosh")


def exact_class_products(max_degree: int = 6):
    x = Sym("x")
    for powers in itertools.product(range(max_degree + 1), repeat=len(EXACT)):
        if 1 <= sum(powers) <= max_degree:
            yield mul(*(pow_(fn(k, x), Const(p)) for k, p in zip(EXACT, powers) if p))


def test_criterion_4_exact_class_sweep():
    failures = []
    products = list(exact_class_products())
    for f in products:
        r = integrate(f)
        if not r.solved or r.source != "exact":
            failures.append(f)
    record(4, not failures and len(products) == 461,
           f"{len(products) - len(failures)}/{len(products)} exact-class products solved from "
           f"the closure")


# 5 ---------------------------------------------------------------------------

def test_criterion_5_planted_stlsq():
    rng = np.random.default_rng(20240501)
    recovered, worst = 0, 0.0
    for trial in range(200):
        n = int(rng.integers(1, 21))
        A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        k = int(rng.integers(1, min(5, n) + 1))
        support = np.sort(rng.choice(n, size=k, replace=False))
        q = np.zeros(n, dtype=complex)
        q[support] = rng.choice([-2, -1, -0.5, 0.5, 1, 2], size=k)
        sys = LinearSystem(A, A @ q, np.zeros(n), [Const(i) for i in range(n)])
        sol = stlsq(sys)
        if sol.kept_indices == list(support):
            recovered += 1
            worst = max(worst, float(np.max(np.abs(sol.q - q[support]))))
        else:
            worst = np.inf
    record(5, recovered == 200 and worst < 1e-6,
           f"support recovered {recovered}/200, max coefficient error {worst:.1e}")


# 6 ---------------------------------------------------------------------------

TRIG_FAMILIES = [
    ["sin(x)^2", "cos(x)^2", "cos(2*x)", "x", "exp(x)"],
    ["sinh(x)^2", "cosh(x)^2", "cosh(2*x)", "sin(x)"],
    ["tan(x)^2", "sec(x)^2", "x", "cos(x)"],
    ["cot(x)^2", "csc(x)^2", "log(x)", "x^2"],
    ["log(x^2)", "log(x)", "log(3*x)", "exp(x)", "x"],
    ["sin(x)*cos(x)", "sin(2*x)", "sin(x)^2", "x*sin(x)", "cos(x)"],
    ["exp(x)*cosh(x)", "exp(2*x)", "x", "exp(x)*sinh(x)"],
]


def _synthetic(rng):
    m = int(rng.integers(2, 10))
    dup = int(rng.integers(1, 5))
    rows = 2 * (m + dup)
    base = rng.normal(size=(rows, m)) + 1j * rng.normal(size=(rows, m))
    cols = [base[:, i] for i in range(m)]
    for _ in range(dup):
        cols.append(complex(rng.normal(), rng.normal()) * base[:, rng.integers(m)])
    perm = rng.permutation(len(cols))
    A = np.column_stack([cols[i] for i in perm])
    q = rng.normal(size=A.shape[1])
    return A, A @ q


def _trig(rng, family):
    terms = [parse(s) for s in family]
    q = rng.choice([-2, -1, 1, 2], size=len(terms))
    f = differentiate(add(*(mul(Const(int(c)), t) for c, t in zip(q, terms))))
    cfg = SamplerConfig(n_points=2 * len(terms), radius=2.0)
    sys = build_system(f, terms, sample_points(cfg, rng), cfg, rng)
    return sys.A, sys.b


def test_criterion_6_qr_pruning():
    rng = np.random.default_rng(6)
    worst_ratio, worst_res = np.inf, 0.0
    for trial in range(100):
        if trial % 2:
            A, b = _synthetic(rng)
        else:
            A, b = _trig(rng, TRIG_FAMILIES[(trial // 2) % len(TRIG_FAMILIES)])
        terms = [Const(i) for i in range(A.shape[1])]
        rank = np.linalg.matrix_rank(A, tol=1e-8 * np.linalg.norm(A, 2))
        assert rank < A.shape[1], "system is not rank deficient"
        out = prune_dependent(LinearSystem(A, b, np.zeros(len(b)), terms))
        worst_ratio = min(worst_ratio, float(pivot_ratios(out.A).min()))
        q = np.linalg.solve(out.A, out.b)
        kept = [int(t.value) for t in out.terms]
        res = np.linalg.norm(A[:, kept] @ q - b) / np.linalg.norm(b)
        worst_res = max(worst_res, float(res))
    record(6, worst_ratio > 1e-6 and worst_res < 1e-8,
           f"min pivot ratio {worst_ratio:.1e} (need > 1e-6), "
           f"max residual on original b {worst_res:.1e} (need < 1e-8)")


# 7 ---------------------------------------------------------------------------

def test_criterion_7_differentiation():
    rng = np.random.default_rng(7)
    pts = np.array([0.31 + 0.47j, -0.62 + 0.18j, 0.85 - 0.39j, -0.27 - 0.71j,
                    1.13 + 0.66j, 0.05 + 1.21j])
    n, checked, worst, bad = 0, 0, 0.0, []
    while n < 500:
        e = random_expr(rng)
        if not e.has("x"):
            continue
        n += 1
        k, err = fd_check(e, pts)
        checked += k > 0
        worst = max(worst, err)
        if err >= 1e-5:
            bad.append(e)
    record(7, not bad and checked >= 400,
           f"500 random expressions ({checked} with testable points), "
           f"max relative error {worst:.1e} (need < 1e-5)")


# 8 ---------------------------------------------------------------------------

def test_criterion_8_determinism():
    entries = load_corpus(goldens_path())
    a = run_corpus(entries, IntegratorConfig()).to_json(timing=False)
    b = run_corpus(entries, IntegratorConfig()).to_json(timing=False)
    record(8, a.encode() == b.encode(), f"two corpus runs byte-identical: {a == b}")
