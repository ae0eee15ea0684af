#!/usr/bin/env python3
"""Compare element-classification strategies on random permutations.

Measures comparisons per element for the chosen strategies at one (k, n) and
emits the per-strategy rows, including the implied sorting leading
coefficient for each mean.

Example:
    python scripts/classification_cost.py --k 3 --n 1000000 --trials 200 \
        --strategies fixed oracle online --out classify_k3.csv
"""

import argparse
import sys

from mpqlab.harness import ExperimentSpec, emit_csv, run_classification_experiment


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--n", type=int, default=10**6)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--strategies", type=str, nargs="+",
                    default=["fixed", "oracle", "online", "sampled"])
    ap.add_argument("--out", type=str, default=None)
    args = ap.parse_args(argv)

    rows = []
    for strategy in args.strategies:
        spec = ExperimentSpec("classify", args.k, args.n,
                              trials=args.trials, seed=args.seed,
                              strategy=strategy)
        rows.extend(run_classification_experiment(spec))
    emit_csv(rows, args.out if args.out else sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
