#!/usr/bin/env python3
"""Trace full-sort cost curves C(n)/(n ln n) over a range of input sizes.

Runs the instrumented k-pivot sorter on random permutations for each n in a
geometric range and emits per-counter means, so the approach of the scaled
curves toward their asymptotic coefficients can be plotted.

Example:
    python scripts/sorting_curves.py --k 3 --n-min 1024 --n-max 1048576 \
        --trials 50 --cutoff 3 --out curves_k3.csv
"""

import argparse
import sys

from mpqlab.harness import ExperimentSpec, emit_csv, run_sort_experiment


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--n-min", type=int, default=1 << 10)
    ap.add_argument("--n-max", type=int, default=1 << 20)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cutoff", type=int, default=None,
                    help="insertion-sort cutoff (default: k)")
    ap.add_argument("--strategy", type=str, default="fixed")
    ap.add_argument("--out", type=str, default=None)
    args = ap.parse_args(argv)

    n_values = []
    n = args.n_min
    while n <= args.n_max:
        n_values.append(n)
        n *= 2
    cutoff = args.cutoff if args.cutoff is not None else args.k
    spec = ExperimentSpec("sort", args.k, n_values=tuple(n_values),
                          trials=args.trials, seed=args.seed,
                          strategy=args.strategy, cutoff=cutoff)
    emit_csv(run_sort_experiment(spec), args.out if args.out else sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
