"""Exhaustive sweep over products of exp, sin, cos, sinh, cosh powers.

Every monomial of total degree 1..D is integrated; the script reports how
many were solved from the closure candidate set, the closure sizes, and any
failures.

    python3 scripts/exact_class_sweep.py --max-degree 6
"""
import argparse
import itertools
import time
from collections import Counter

from symnumint.candidates import closure_exact
from symnumint.expr import Const, Sym, fn, mul, pow_, to_str
from symnumint.integrator import IntegratorConfig, integrate
from symnumint.numeric import SamplerConfig

KINDS = ("exp", "sin", "cos", "sinh", "cosh")


def monomials(max_degree):
    x = Sym("x")
    for powers in itertools.product(range(max_degree + 1), repeat=len(KINDS)):
        if 1 <= sum(powers) <= max_degree:
            yield sum(powers), mul(*(pow_(fn(k, x), Const(p)) for k, p in zip(KINDS, powers) if p))


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--max-degree", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = IntegratorConfig(sampler=SamplerConfig(rng_seed=args.seed))
    by_degree, solved, largest = Counter(), Counter(), Counter()
    failures = []
    t0 = time.perf_counter()
    for deg, f in monomials(args.max_degree):
        by_degree[deg] += 1
        largest[deg] = max(largest[deg], len(closure_exact(f)))
        r = integrate(f, cfg)
        if r.solved and r.source == "exact":
            solved[deg] += 1
        else:
            failures.append(to_str(f))
    print("degree  count  solved  max|closure|")
    for d in sorted(by_degree):
        print(f"{d:>6}  {by_degree[d]:>5}  {solved[d]:>6}  {largest[d]:>12}")
    print(f"total {sum(solved.values())}/{sum(by_degree.values())} in {time.perf_counter() - t0:.1f} s")
    for f in failures:
        print("FAILED", f)


if __name__ == "__main__":
    main()
