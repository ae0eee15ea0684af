#!/usr/bin/env python3
"""Measure single-partition cost counters against their exact expectations.

For each k, partitions random permutations of [1..n] once (no recursion) and
reports scanned elements, write accesses, assignments, and rotations per
element next to the asymptotic theory values.

Example:
    python scripts/partition_counters.py --ks 1 2 3 5 7 9 --n 1000000 \
        --trials 100 --out partition_counters.csv
"""

import argparse
import sys

from mpqlab.harness import ExperimentSpec, emit_csv, run_partition_experiment


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ks", type=int, nargs="+", default=[1, 2, 3, 5, 7, 9])
    ap.add_argument("--n", type=int, default=10**6)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=str, default=None)
    args = ap.parse_args(argv)

    rows = []
    for k in args.ks:
        spec = ExperimentSpec("partition", k, args.n,
                              trials=args.trials, seed=args.seed)
        rows.extend(run_partition_experiment(spec))
    emit_csv(rows, args.out if args.out else sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
