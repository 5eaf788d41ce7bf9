"""Public entry point: candidate sources, the numeric solve, and the verification gate."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import candidates as cand
from . import numeric as num
from . import rational as rat
from .expr import Const, Expr, Sym, add, differentiate, evaluate_many, mul, strip_constant
from .parser import variable_of

# fixed stream ids so the seed of a source never depends on which sources ran
_EXACT_STREAM = 1000
_RATIONAL_STREAM = 1001
_VERIFY_STREAM = 2000


@dataclass(frozen=True)
class IntegratorConfig:
    L: int = 2
    sampler: num.SamplerConfig = field(default_factory=num.SamplerConfig)
    eps: float = 1e-6
    lam: float = 1e-3
    threshold: float = 1e-2
    relaxed_threshold: float = 0.1
    # last attempt per candidate set: small coefficients on an oversampled system
    fine_threshold: float = 1e-4
    fine_oversample: bool = True
    max_sweeps: int = 20
    verify_points: int = 7
    verify_tol: float = 1e-6
    max_terms: int = cand.MAX_TERMS
    oversample: bool = False
    recombine: bool = True

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("L must be at least 1")
        if self.verify_points < 3:
            raise ValueError("verify_points must be at least 3")

    @property
    def seed(self) -> int:
        return self.sampler.rng_seed


@dataclass(frozen=True)
class Attempt:
    source: str
    index: int
    retry: int
    n_terms: int
    outcome: str
    residual: float | None = None


@dataclass(frozen=True)
class Solved:
    antiderivative: Expr
    generator_index: int
    residual: float
    n_terms: int
    source: str = "generator"

    @property
    def solved(self) -> bool:
        return True


@dataclass(frozen=True)
class Unsolved:
    reason: str
    attempts: tuple[Attempt, ...] = ()

    @property
    def solved(self) -> bool:
        return False


IntegrationResult = Solved | Unsolved


# ---------------------------------------------------------------------------
# verification


def verification_points(f: Expr, cfg: IntegratorConfig, rng: np.random.Generator,
                        var: str = "x", df: Expr | None = None) -> np.ndarray:
    """Random points of the sampling disk kept away from the poles of ``f``.

    Near a pole of order k, ``|f/f'|`` is about the distance to the pole over k,
    so points where it is small are redrawn.
    """
    d = cfg.sampler.radius
    min_dist = 1e-2 * d
    df = differentiate(f, var) if df is None else df
    out = np.empty(0, dtype=complex)
    for _ in range(50):
        need = cfg.verify_points - out.size
        if need <= 0:
            break
        z = num.sample_points(replace(cfg.sampler, n_points=2 * need), rng)
        with np.errstate(all="ignore"):
            fv = evaluate_many(f, z, var)
            dist = np.abs(fv / evaluate_many(df, z, var))
        ok = np.isfinite(fv) & ~(dist < min_dist)
        out = np.concatenate([out, z[ok]])
    return out[:cfg.verify_points]


def verify(y: Expr, f: Expr, cfg: IntegratorConfig | None = None,
           rng: np.random.Generator | None = None, tol: float | None = None) -> bool:
    """True when ``y' = f`` at fresh random points, relative to ``1 + |f|``."""
    cfg = cfg or IntegratorConfig()
    var = variable_of(f) if f.free_symbols else variable_of(y)
    rng = rng if rng is not None else np.random.default_rng([cfg.seed, _VERIFY_STREAM])
    tol = cfg.verify_tol if tol is None else tol
    z = verification_points(f, cfg, rng, var)
    if z.size < 3:
        return False
    with np.errstate(all="ignore"):
        dy = evaluate_many(differentiate(y, var), z, var)
        fv = evaluate_many(f, z, var)
        err = np.abs(dy - fv) / (1 + np.abs(fv))
    return bool(np.all(np.isfinite(err)) and np.max(err) < tol)


# ---------------------------------------------------------------------------
# solving one candidate set


def _solve(f: Expr, terms: list[Expr], cfg: IntegratorConfig, threshold: float,
           rng: np.random.Generator, var: str, real_input: bool, oversample: bool = False,
           scale: complex = 1):
    oversample = oversample or cfg.oversample
    n = len(terms) * (2 if oversample else 1)
    scfg = replace(cfg.sampler, n_points=n)
    pts = num.sample_points(scfg, rng)
    pts = num.move_toward_poles(f, pts, scfg, var)
    sys = num.build_system(f, terms, pts, scfg, rng, var)
    sys = num.prune_dependent(num.equilibrate_rows(sys), cfg.eps, square=not oversample)
    sol = num.stlsq(sys, cfg.lam, threshold, cfg.max_sweeps)
    pairs = list(zip(sol.q, sol.terms))
    if cfg.recombine and real_input:
        pairs = rat.combine_conjugate_logs(pairs, var)
    y = add(*(mul(Const(num.snap(c * scale)), t) for c, t in pairs))
    return y, sol


def _sources(core: Expr, cfg: IntegratorConfig, var: str):
    """Yield ``(name, index, stream, terms)`` lazily in the order they are tried."""
    x = Sym(var)
    if cand.is_exact_class(core, var):
        try:
            closure = cand.closure_exact(core, var=var)
            closure.add(x)
            yield "exact", 0, _EXACT_STREAM, list(closure)
        except cand.StepLimit:
            pass
    if rat.is_rational(core, var):
        try:
            yield "rational", 0, _RATIONAL_STREAM, rat.candidates_for(core, var)
        except rat.RationalError:
            pass
    gens = cand.generators(core, var, cfg.max_terms)
    for k in range(cfg.L):
        try:
            g = next(gens)
        except cand.TermBudgetExceeded:
            return
        yield "generator", k, k, list(cand.terms_of(g))


def _schedule(cfg: IntegratorConfig):
    """(threshold, oversample) per attempt on one candidate set."""
    out = [(cfg.threshold, False), (cfg.relaxed_threshold, False)]
    if cfg.fine_threshold:
        out.append((cfg.fine_threshold, cfg.fine_oversample))
    return out


def integrate(f: Expr, cfg: IntegratorConfig | None = None) -> IntegrationResult:
    """Antiderivative of ``f`` without the constant of integration, or Unsolved."""
    cfg = cfg or IntegratorConfig()
    if not f.free_symbols:
        return Unsolved("integrand does not depend on a variable")
    var = variable_of(f)
    try:
        c, core = strip_constant(f)
    except ValueError:
        return Unsolved("integrand is zero")
    real_input = rat.has_real_coefficients(core, var)
    attempts: list[Attempt] = []
    vrng_seed = [cfg.seed, _VERIFY_STREAM]
    try:
        for name, index, stream, terms in _sources(core, cfg, var):
            if not terms:
                attempts.append(Attempt(name, index, 0, 0, "no candidates"))
                continue
            for retry, (threshold, over) in enumerate(_schedule(cfg)):
                rng = np.random.default_rng([cfg.seed, stream, retry])
                try:
                    y, sol = _solve(core, terms, cfg, threshold, rng, var, real_input, over,
                                    complex(c))
                except (num.NumericError, np.linalg.LinAlgError, ValueError) as exc:
                    attempts.append(Attempt(name, index, retry, len(terms), type(exc).__name__))
                    continue
                if verify(y, f, cfg, np.random.default_rng(vrng_seed)):
                    return Solved(y, index, sol.residual, len(terms), name)
                attempts.append(Attempt(name, index, retry, len(terms), "verification failed",
                                        sol.residual))
    except cand.CandidateError as exc:
        attempts.append(Attempt("generator", -1, 0, 0, type(exc).__name__))
    return Unsolved("no candidate set produced a verified antiderivative", tuple(attempts))
