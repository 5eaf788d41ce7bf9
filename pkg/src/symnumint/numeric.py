"""Numeric stage: test points, the linear system, rank pruning and sparse regression."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np
import scipy.linalg

from .expr import Const, Expr, add, differentiate, evaluate_many, mul

# sampler hygiene, as fractions of the disk radius
GUARD_RADIUS = 0.02
AXIS_BAND = 0.02


class NumericError(Exception):
    pass


class SamplingExhausted(NumericError):
    pass


class EmptySystem(NumericError):
    pass


class NoSparseSolution(NumericError):
    pass


@dataclass(frozen=True)
class SamplerConfig:
    n_points: int = 1
    radius: float = 5.0
    pole_iterations: int = 3
    pole_step_cap: float = 1.0
    rng_seed: int = 0


@dataclass
class LinearSystem:
    A: np.ndarray
    b: np.ndarray
    points: np.ndarray
    terms: list[Expr]

    @property
    def shape(self):
        return self.A.shape


@dataclass
class SparseSolution:
    q: np.ndarray
    kept_indices: list[int]
    residual: float
    threshold: float
    terms: list[Expr] = field(default_factory=list)


def _rng(cfg: SamplerConfig, rng):
    return rng if rng is not None else np.random.default_rng(cfg.rng_seed)


def sample_points(cfg: SamplerConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """Uniform points in the open disk of radius ``cfg.radius``.

    Points too close to the origin or to the negative real axis are redrawn.
    """
    if cfg.n_points < 1 or cfg.radius <= 0:
        raise ValueError("need n_points >= 1 and radius > 0")
    rng = _rng(cfg, rng)
    d = cfg.radius
    out = np.empty(0, dtype=complex)
    while out.size < cfg.n_points:
        k = 2 * (cfg.n_points - out.size) + 4
        r = d * np.sqrt(rng.uniform(0.0, 1.0, k))
        t = rng.uniform(0.0, 2 * np.pi, k)
        z = r * np.exp(1j * t)
        ok = (np.abs(z) >= GUARD_RADIUS * d) & (np.abs(z) < d)
        ok &= ~((z.real < 0) & (np.abs(z.imag) < AXIS_BAND * d))
        out = np.concatenate([out, z[ok]])
    return out[:cfg.n_points]


def move_toward_poles(f: Expr, points: np.ndarray, cfg: SamplerConfig, var: str = "x",
                      df: Expr | None = None) -> np.ndarray:
    """Pole-seeking Newton steps ``x <- x + f(x)/f'(x)``.

    Each step is capped at ``cfg.pole_step_cap``; a point stops at its last
    finite iterate, and reverts if ``|f|`` did not grow or it left the disk.
    """
    x0 = np.asarray(points, dtype=complex)
    if cfg.pole_iterations <= 0 or x0.size == 0:
        return x0.copy()
    if df is None:
        df = differentiate(f, var)
    f0 = np.abs(evaluate_many(f, x0, var))
    x = x0.copy()
    active = np.isfinite(f0)
    for _ in range(cfg.pole_iterations):
        if not active.any():
            break
        xa = x[active]
        with np.errstate(all="ignore"):
            step = evaluate_many(f, xa, var) / evaluate_many(df, xa, var)
            mag = np.abs(step)
            scale = np.where(mag > cfg.pole_step_cap, cfg.pole_step_cap / mag, 1.0)
            step = step * scale
        xn = xa + step
        fn_ = evaluate_many(f, xn, var)
        good = np.isfinite(step) & np.isfinite(fn_)
        idx = np.flatnonzero(active)
        x[idx[good]] = xn[good]
        active[idx[~good]] = False
    f1 = np.abs(evaluate_many(f, x, var))
    revert = ~(np.isfinite(f1) & (f1 > f0) & (np.abs(x) < cfg.radius))
    x[revert] = x0[revert]
    return x


def _eval_columns(exprs: list[Expr], points: np.ndarray, var: str) -> np.ndarray:
    cache: dict = {}
    cols = [evaluate_many(e, points, var, cache) for e in exprs]
    if not cols:
        return np.empty((points.size, 0), dtype=complex)
    return np.column_stack(cols)


def build_system(f: Expr, terms, points: np.ndarray, cfg: SamplerConfig | None = None,
                 rng: np.random.Generator | None = None, var: str = "x",
                 retries: int = 10) -> LinearSystem:
    """Rows are test points; ``A[i, j] = theta_j'(x_i)`` and ``b[i] = f(x_i)``.

    Rows with a non-finite entry are redrawn, up to ``retries`` times.
    """
    terms = list(terms)
    cfg = cfg or SamplerConfig(n_points=len(points))
    rng = _rng(cfg, rng)
    derivs = [differentiate(t, var) for t in terms]
    pts = np.array(points, dtype=complex)
    A = _eval_columns(derivs, pts, var)
    b = evaluate_many(f, pts, var)
    df = None
    for _ in range(retries):
        bad = ~(np.all(np.isfinite(A), axis=1) & np.isfinite(b))
        if not bad.any():
            return LinearSystem(A, b, pts, terms)
        if df is None:
            df = differentiate(f, var)
        fresh = sample_points(replace(cfg, n_points=int(bad.sum())), rng)
        fresh = move_toward_poles(f, fresh, cfg, var, df)
        pts[bad] = fresh
        A[bad] = _eval_columns(derivs, fresh, var)
        b[bad] = evaluate_many(f, fresh, var)
    bad = ~(np.all(np.isfinite(A), axis=1) & np.isfinite(b))
    if bad.any():
        raise SamplingExhausted(f"{int(bad.sum())} rows stayed non-finite after {retries} redraws")
    return LinearSystem(A, b, pts, terms)


def equilibrate_rows(sys: LinearSystem) -> LinearSystem:
    """Scale every row of [A | b] to unit max-modulus (same solutions)."""
    scale = np.maximum(np.max(np.abs(sys.A), axis=1, initial=0.0), np.abs(sys.b))
    scale[scale == 0] = 1.0
    return LinearSystem(sys.A / scale[:, None], sys.b / scale, sys.points, sys.terms)


def _normalize_columns(A: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    return A / norms


def pivot_ratios(A: np.ndarray) -> np.ndarray:
    """``|R_kk| / |R_11|`` of column-pivoted QR on the column-normalized matrix."""
    if A.size == 0:
        return np.empty(0)
    R = scipy.linalg.qr(_normalize_columns(A), mode="r", pivoting=True)[0]
    d = np.abs(np.diag(R))
    if d[0] == 0:
        return np.zeros_like(d)
    return d / d[0]


def prune_dependent(sys: LinearSystem, eps: float = 1e-6, square: bool = True) -> LinearSystem:
    """Drop numerically dependent columns (candidate terms) via pivoted QR.

    With ``square`` set, as many rows (test points) are dropped, keeping the
    best-conditioned rows by pivoted QR on the transpose.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    A, b, pts, terms = sys.A, sys.b, sys.points, list(sys.terms)
    for _ in range(max(1, A.shape[1])):
        if A.shape[1] == 0:
            break
        An = _normalize_columns(A)
        colnorm = np.linalg.norm(A, axis=0)
        _, R, P = scipy.linalg.qr(An, mode="economic", pivoting=True)
        d = np.abs(np.diag(R))
        if d.size == 0 or d[0] == 0 or not np.any(colnorm > 0):
            A = A[:, :0]
            break
        rank = int(np.sum(d > eps * d[0]))
        keep = np.sort(P[:rank])
        A = A[:, keep]
        terms = [terms[i] for i in keep]
        if square and A.shape[0] > A.shape[1]:
            rows = scipy.linalg.qr(_normalize_columns(A.T), mode="r", pivoting=True)[1]
            rows = np.sort(rows[:A.shape[1]])
            A, b, pts = A[rows], b[rows], pts[rows]
        ratios = pivot_ratios(A)
        if ratios.size == 0 or ratios[-1] > eps:
            break
    if A.shape[1] == 0:
        raise EmptySystem("every candidate column was dependent")
    return LinearSystem(A, b, pts, terms)


def _ridge(A: np.ndarray, b: np.ndarray, lam: float) -> np.ndarray:
    # ridge on column-normalized A via the augmented least-squares problem
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    An = A / norms
    if lam > 0:
        k = An.shape[1]
        An = np.vstack([An, np.sqrt(lam) * np.eye(k)])
        b = np.concatenate([b, np.zeros(k, dtype=complex)])
    q = np.linalg.lstsq(An, b, rcond=None)[0]
    return q / norms


def _sweeps(A: np.ndarray, b: np.ndarray, lam: float, threshold: float, max_sweeps: int):
    support = np.arange(A.shape[1])
    for _ in range(max_sweeps):
        if support.size == 0:
            break
        q = _ridge(A[:, support], b, lam)
        small = np.abs(q) < threshold
        if not small.any():
            break
        support = support[~small]
    # unpenalized refit of the support, thresholding again until stable
    q = np.zeros(0, dtype=complex)
    while support.size:
        q = np.linalg.lstsq(A[:, support], b, rcond=None)[0]
        small = np.abs(q) < threshold
        if not small.any():
            break
        support = support[~small]
    if support.size == 0:
        return support, np.zeros(0, dtype=complex), 1.0
    return support, q, float(np.linalg.norm(A[:, support] @ q - b) / np.linalg.norm(b))


def stlsq(sys: LinearSystem, lam: float = 1e-3, threshold: float = 1e-2,
          max_sweeps: int = 20, tol: float = 1e-6) -> SparseSolution:
    """Sequential thresholded least squares over the complex numbers.

    Alternates a ridge fit with hard thresholding ``|q_j| < threshold`` until
    the support is stable, then refits the support without the penalty.  On
    ill-conditioned systems the ridge bias can threshold away a needed term;
    if the result misses ``tol`` the sweeps are repeated with ``lam = 0``.
    """
    if threshold <= 0 or lam < 0:
        raise ValueError("need threshold > 0 and lam >= 0")
    A, b = sys.A, sys.b
    if np.linalg.norm(b) == 0:
        return SparseSolution(np.zeros(0, dtype=complex), [], 0.0, threshold, [])
    support, q, residual = _sweeps(A, b, lam, threshold, max_sweeps)
    if residual > tol and lam > 0:
        s2, q2, r2 = _sweeps(A, b, 0.0, threshold, max_sweeps)
        if r2 < residual:
            support, q, residual = s2, q2, r2
    if support.size == 0 and residual > tol:
        raise NoSparseSolution("all coefficients fell below the threshold")
    kept = [int(i) for i in support]
    return SparseSolution(q, kept, residual, threshold, [sys.terms[i] for i in kept])


def snap(c: complex, max_den: int = 64, tol: float = 1e-8):
    """Snap near-rational real and imaginary parts to exact fractions."""
    c = complex(c)

    def part(v: float):
        if abs(v) <= tol:
            return Fraction(0)
        fr = Fraction(v).limit_denominator(max_den)
        if abs(float(fr) - v) <= tol * max(1.0, abs(v)):
            return fr
        return v

    re_, im = part(c.real), part(c.imag)
    if im == 0:
        return re_ if isinstance(re_, Fraction) else complex(re_)
    if isinstance(re_, Fraction) and isinstance(im, Fraction) and re_ == 0:
        return complex(0, float(im))
    return complex(float(re_), float(im))


def assemble(sol: SparseSolution, terms=None, scale: complex = 1, snap_coefficients: bool = True) -> Expr:
    """``y = sum_j q_j * theta_j`` over the kept terms.

    ``terms`` is the system's term list that ``kept_indices`` refers to.
    """
    terms = sol.terms if terms is None else [terms[i] for i in sol.kept_indices]
    parts = []
    for qj, t in zip(sol.q, terms):
        c = complex(qj) * complex(scale)
        parts.append(mul(Const(snap(c) if snap_coefficients else c), t))
    return add(*parts)
