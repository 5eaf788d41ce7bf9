"""Command line: ``symnumint integrate EXPR`` and ``symnumint corpus PATH``."""

from __future__ import annotations

import argparse
import json
import sys

from .corpus import CorpusError, goldens_path, load_corpus, run_corpus
from .expr import to_str
from .integrator import IntegratorConfig, integrate
from .numeric import SamplerConfig
from .parser import ParseError, parse


def _common(p: argparse.ArgumentParser):
    d, s = IntegratorConfig(), SamplerConfig()
    p.add_argument("--L", type=int, default=d.L, help="number of generators to try")
    p.add_argument("--radius", type=float, default=s.radius, help="test point disk radius")
    p.add_argument("--eps", type=float, default=d.eps, help="QR pruning tolerance")
    p.add_argument("--lambda", dest="lam", type=float, default=d.lam, help="ridge penalty")
    p.add_argument("--threshold", type=float, default=d.threshold, help="STLSQ threshold")
    p.add_argument("--seed", type=int, default=s.rng_seed, help="base RNG seed")
    p.add_argument("--pole-iters", type=int, default=s.pole_iterations, help="pole-seeking steps per test point")
    p.add_argument("--verify-tol", type=float, default=d.verify_tol, help="relative tolerance of the derivative check")
    p.add_argument("--json", action="store_true", help="print JSON instead of text")


def config_from_args(a) -> IntegratorConfig:
    sampler = SamplerConfig(radius=a.radius, pole_iterations=a.pole_iters, rng_seed=a.seed)
    return IntegratorConfig(L=a.L, sampler=sampler, eps=a.eps, lam=a.lam,
                            threshold=a.threshold, verify_tol=a.verify_tol)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symnumint", description="Symbolic-numeric indefinite integration")
    sub = p.add_subparsers(dest="cmd", required=True)
    pi = sub.add_parser("integrate", help="integrate one expression")
    pi.add_argument("expr")
    _common(pi)
    pc = sub.add_parser("corpus", help="run a JSON-lines corpus")
    pc.add_argument("path", nargs="?", default=None, help="corpus file (default: shipped goldens)")
    _common(pc)
    pc.add_argument("--timeout", type=float, default=10.0, help="seconds per entry")
    pc.add_argument("--jobs", type=int, default=1)
    pc.add_argument("--output", default=None, help="also write the JSON report here")
    pc.add_argument("--no-timing", action="store_true", help="omit wall times from JSON")
    return p


def cmd_integrate(a) -> int:
    try:
        f = parse(a.expr)
    except ParseError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = config_from_args(a)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    r = integrate(f, cfg)
    if a.json:
        if r.solved:
            out = {"solved": True, "antiderivative": to_str(r.antiderivative),
                   "generator_index": r.generator_index, "residual": r.residual,
                   "n_terms": r.n_terms, "source": r.source}
        else:
            out = {"solved": False, "reason": r.reason,
                   "attempts": [vars(x) for x in r.attempts]}
        print(json.dumps(out, indent=2))
    elif r.solved:
        print(to_str(r.antiderivative))
    else:
        print("no answer")
        for x in r.attempts:
            print(f"  {x.source} {x.index} retry {x.retry}: {x.n_terms} terms, {x.outcome}",
                  file=sys.stderr)
    return 0 if r.solved else 1


def cmd_corpus(a) -> int:
    try:
        entries = load_corpus(a.path or goldens_path())
        cfg = config_from_args(a)
    except (CorpusError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = run_corpus(entries, cfg, a.timeout, a.jobs)
    text = report.to_json(timing=not a.no_timing)
    if a.output:
        with open(a.output, "w") as fh:
            fh.write(text + "\n")
    if a.json:
        print(text)
    else:
        for e in report.entries:
            shown = e.antiderivative if e.outcome == "solved" else e.message
            print(f"{e.outcome:<9}{e.id:<24}{shown}")
        print()
        print(report.table())
    return 0


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    return cmd_integrate(a) if a.cmd == "integrate" else cmd_corpus(a)


if __name__ == "__main__":
    sys.exit(main())
