"""Rational integrands: numeric denominator roots and partial-fraction candidates.

Only the forms ``log(x - r)`` and ``(x - r)^-k`` are proposed; their
coefficients come from the sparse regression like every other candidate.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from numpy.polynomial import polynomial as P

from .expr import (Add, Const, Expr, Mul, Pow, Sym, add, fn, is_int_const, mul,
                   pow_)
from .numeric import snap

CLUSTER_TOL = 1e-6
# widest gap at which two root clusters may still be one multiple root
MERGE_LIMIT = 1e-2
MAX_DEGREE = 40


class RationalError(Exception):
    pass


class DegreeZero(RationalError):
    pass


class NotPolynomialDenominator(RationalError):
    pass


@dataclass(frozen=True)
class PolyRoots:
    roots: tuple[tuple[complex, int], ...]
    degree: int

    def locations(self) -> list[complex]:
        return [r for r, _ in self.roots]


# ---------------------------------------------------------------------------
# polynomial extraction (ascending coefficient arrays)


def poly_coeffs(e: Expr, var: str = "x") -> np.ndarray | None:
    """Ascending coefficients if ``e`` is a polynomial in ``var``."""
    r = as_rational(e, var)
    if r is None:
        return None
    num, den = r
    if len(_trim(den)) != 1:
        return None
    return _trim(num / den[0])


def _trim(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    nz = np.flatnonzero(c != 0)
    return c[: nz[-1] + 1] if nz.size else c[:1] * 0


def as_rational(e: Expr, var: str = "x"):
    """``(num, den)`` ascending coefficient arrays, or None if ``e`` is not rational."""
    if not e.has(var):
        if e.free_symbols:
            return None
        if isinstance(e, Const):
            return np.array([complex(e.value)]), np.array([1 + 0j])
        from .expr import evaluate
        v = evaluate(e, 0j)
        return (np.array([v]), np.array([1 + 0j])) if np.isfinite(v) else None
    if isinstance(e, Sym):
        return np.array([0j, 1 + 0j]), np.array([1 + 0j])
    if isinstance(e, Add):
        num, den = np.array([0j]), np.array([1 + 0j])
        for t in e.terms:
            r = as_rational(t, var)
            if r is None:
                return None
            num = P.polyadd(P.polymul(num, r[1]), P.polymul(r[0], den))
            den = P.polymul(den, r[1])
            if len(num) > MAX_DEGREE or len(den) > MAX_DEGREE:
                return None
        return _trim(num), _trim(den)
    if isinstance(e, Mul):
        num, den = np.array([1 + 0j]), np.array([1 + 0j])
        for f in e.factors:
            r = as_rational(f, var)
            if r is None:
                return None
            num, den = P.polymul(num, r[0]), P.polymul(den, r[1])
            if len(num) > MAX_DEGREE or len(den) > MAX_DEGREE:
                return None
        return _trim(num), _trim(den)
    if isinstance(e, Pow) and is_int_const(e.exp):
        k = int(e.exp.value)
        r = as_rational(e.base, var)
        if r is None or abs(k) * max(len(r[0]), len(r[1])) > MAX_DEGREE:
            return None
        num, den = (r[0], r[1]) if k > 0 else (r[1], r[0])
        return _trim(P.polypow(num, abs(k))), _trim(P.polypow(den, abs(k)))
    return None


def is_rational(e: Expr, var: str = "x") -> bool:
    return e.has(var) and as_rational(e, var) is not None


# ---------------------------------------------------------------------------
# roots


def _companion(coeffs: np.ndarray) -> np.ndarray:
    """Companion matrix of a polynomial given highest-degree-first coefficients."""
    a = np.asarray(coeffs, dtype=complex)
    n = a.size - 1
    C = np.zeros((n, n), dtype=complex)
    C[0, :] = -a[1:] / a[0]
    C[1:, :-1] = np.eye(n - 1)
    return C


def _horner_derivs(a: np.ndarray, z: complex, upto: int) -> list[complex]:
    """Taylor coefficients p^(k)(z)/k! for k < upto; ``a`` highest first."""
    asc = a[::-1]
    out = []
    for k in range(upto):
        s = sum(comb(j, k) * asc[j] * z ** (j - k) for j in range(k, asc.size))
        out.append(complex(s))
    return out


def _taylor_bound(a: np.ndarray, z: complex, k: int) -> float:
    asc = a[::-1]
    return float(sum(comb(j, k) * abs(asc[j]) * abs(z) ** (j - k) for j in range(k, asc.size)))


def _is_multiple_root(a: np.ndarray, c: complex, m: int, tol: float = 1e-7) -> bool:
    taylor = _horner_derivs(a, c, m)
    return all(abs(taylor[k]) <= tol * max(_taylor_bound(a, c, k), 1e-300) for k in range(m))


def poly_roots(coefficients, cluster_tol: float = CLUSTER_TOL) -> PolyRoots:
    """All complex roots with multiplicities; coefficients are highest degree first.

    Roots closer than ``cluster_tol`` merge unconditionally.  Wider clusters
    (perturbed multiple roots) merge only when the Taylor coefficients of the
    polynomial below the cluster size vanish at the cluster mean.
    """
    a = np.asarray(coefficients, dtype=complex)
    nz = np.flatnonzero(a != 0)
    if nz.size == 0:
        raise DegreeZero("zero polynomial")
    a = a[nz[0]:]
    deg = a.size - 1
    if deg < 1:
        raise DegreeZero("polynomial has degree zero")
    raw = np.linalg.eigvals(_companion(a)) if deg > 1 else np.array([-a[1] / a[0]])
    clusters = [[complex(r)] for r in raw]

    def center(c):
        return complex(np.mean(c))

    def gap(c1, c2):
        return min(abs(p - q) for p in c1 for q in c2)

    changed = True
    while changed and len(clusters) > 1:
        changed = False
        best = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                g = gap(clusters[i], clusters[j])
                scale = max(1.0, abs(center(clusters[i])))
                if g <= MERGE_LIMIT * scale and (best is None or g < best[0]):
                    merged = clusters[i] + clusters[j]
                    if g <= cluster_tol * scale or _is_multiple_root(a, center(merged), len(merged)):
                        best = (g, i, j)
        if best is not None:
            _, i, j = best
            clusters[i] = clusters[i] + clusters.pop(j)
            changed = True
    roots = []
    for c in clusters:
        r = center(c)
        s = snap(r, tol=1e-9)
        r_snapped = complex(s)
        if abs(_horner_derivs(a, r_snapped, 1)[0]) <= abs(_horner_derivs(a, r, 1)[0]) * 10 + 1e-14:
            r = r_snapped
        roots.append((r, len(c)))
    roots.sort(key=lambda t: (round(t[0].real, 12), round(t[0].imag, 12)))
    return PolyRoots(tuple(roots), deg)


def rational_candidates(num: Expr, den: Expr, var: str = "x") -> list[Expr]:
    """Candidate cores for ``num/den``: logs and negative powers at denominator roots,
    plus monomials for the polynomial part."""
    den_c = poly_coeffs(den, var)
    if den_c is None:
        raise NotPolynomialDenominator(f"{den} is not a polynomial in {var}")
    num_c = poly_coeffs(num, var)
    x = Sym(var)
    out: list[Expr] = []
    dd = len(den_c) - 1
    if dd >= 1:
        for r, m in poly_roots(den_c[::-1]).roots:
            lin = add(x, Const(snap(-r, tol=1e-12)))
            out.append(fn("log", lin))
            for k in range(1, m):
                out.append(pow_(lin, Const(-k)))
    dn = (len(num_c) - 1) if num_c is not None else dd
    for k in range(1, max(dn - dd + 1, 0) + 1):
        out.append(pow_(x, Const(k)))
    return out


def candidates_for(f: Expr, var: str = "x") -> list[Expr]:
    """Rational-path candidates for a rational integrand ``f``."""
    r = as_rational(f, var)
    if r is None:
        raise NotPolynomialDenominator(f"{f} is not rational in {var}")
    num, den = r
    return rational_candidates(_poly_expr(num, var), _poly_expr(den, var), var)


def _poly_expr(asc: np.ndarray, var: str) -> Expr:
    x = Sym(var)
    return add(*(mul(Const(snap(c, tol=1e-12)), pow_(x, Const(k)))
                 for k, c in enumerate(asc) if c != 0))


def has_real_coefficients(f: Expr, var: str = "x") -> bool:
    r = as_rational(f, var)
    if r is None:
        return False
    return bool(np.all(r[0].imag == 0) and np.all(r[1].imag == 0))


def _log_root(term: Expr, var: str) -> complex | None:
    """r such that ``term == log(x - r)``, else None."""
    from .expr import Fn
    if not (isinstance(term, Fn) and term.kind == "log"):
        return None
    a = term.arg
    x = Sym(var)
    if a == x:
        return 0j
    if isinstance(a, Add) and len(a.terms) == 2 and isinstance(a.terms[0], Const) and a.terms[1] == x:
        return -complex(a.terms[0].value)
    return None


def combine_conjugate_logs(pairs, var: str = "x", tol: float = 1e-8):
    """Rewrite ``a log(x-r) + conj(a) log(x-conj(r))`` as real log/atan terms.

    ``pairs`` is a list of (coefficient, term).  With r = alpha + i beta the
    pair becomes ``Re(a) log((x-alpha)^2 + beta^2) - 2 Im(a) atan((x-alpha)/beta)``,
    which has the same derivative.
    """
    pairs = [(complex(c), t) for c, t in pairs]
    x = Sym(var)
    used = set()
    out = []
    for i, (a, t) in enumerate(pairs):
        if i in used:
            continue
        r = _log_root(t, var)
        if r is None or abs(r.imag) <= tol * max(1.0, abs(r)):
            out.append((a, t))
            continue
        partner = None
        for j in range(i + 1, len(pairs)):
            if j in used:
                continue
            b, u = pairs[j]
            s = _log_root(u, var)
            if s is not None and abs(s - r.conjugate()) <= tol * max(1.0, abs(r)) \
                    and abs(b - a.conjugate()) <= tol * max(1.0, abs(a)):
                partner = j
                break
        if partner is None:
            out.append((a, t))
            continue
        used.add(partner)
        if r.imag < 0:
            a, r = a.conjugate(), r.conjugate()
        alpha, beta = r.real, r.imag
        shifted = add(x, Const(snap(-alpha, tol=1e-12)))
        quad = add(pow_(shifted, Const(2)), Const(snap(beta * beta, tol=1e-12)))
        from .expr import expand
        if abs(a.real) > tol:
            out.append((a.real, fn("log", expand(quad))))
        if abs(a.imag) > tol:
            out.append((-2 * a.imag, fn("atan", mul(Const(snap(1 / beta, tol=1e-12)), shifted))))
    return out
