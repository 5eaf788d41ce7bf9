"""Run the shipped golden corpus and print the per-tag success table.

    python3 scripts/run_goldens.py --jobs 4 --output results/goldens.json
"""
import argparse
import time
from pathlib import Path

from symnumint.corpus import goldens_path, load_corpus, run_corpus
from symnumint.integrator import IntegratorConfig
from symnumint.numeric import SamplerConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--corpus", type=Path, default=goldens_path())
    ap.add_argument("--L", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--timeout", type=float, default=10.0)
    ap.add_argument("--output", type=Path)
    args = ap.parse_args()

    cfg = IntegratorConfig(L=args.L, sampler=SamplerConfig(rng_seed=args.seed))
    t0 = time.perf_counter()
    report = run_corpus(load_corpus(args.corpus), cfg, args.timeout, args.jobs)
    elapsed = time.perf_counter() - t0

    for r in report.entries:
        mark = "ok " if r.outcome == "solved" else "-- "
        shown = r.antiderivative if r.antiderivative else r.message
        print(f"{mark}{r.id:<22} {r.integrand:<34} {shown}")
    print()
    print(report.table())
    print(f"\nwall time {elapsed:.2f} s")
    if args.output:
        args.output.parent.mkdir(parents=True, exist_ok=True)
        args.output.write_text(report.to_json())


if __name__ == "__main__":
    main()
