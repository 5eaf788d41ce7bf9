"""Corpus success rate as a function of the generator depth L.

    python3 scripts/depth_ablation.py --max-L 3
"""
import argparse
import time

from symnumint.corpus import goldens_path, load_corpus, run_corpus
from symnumint.integrator import IntegratorConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--max-L", type=int, default=3)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    entries = load_corpus(goldens_path())
    print("L  solved  total  seconds")
    for L in range(1, args.max_L + 1):
        t0 = time.perf_counter()
        agg = run_corpus(entries, IntegratorConfig(L=L), jobs=args.jobs).aggregates["all"]
        print(f"{L}  {agg['success']:>6}  {agg['total']:>5}  {time.perf_counter() - t0:>7.2f}")


if __name__ == "__main__":
    main()
