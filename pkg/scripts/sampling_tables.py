#!/usr/bin/env python3
"""Print optimal pivot-sampling parameters per comparison budget.

For each k and each extra-comparison budget b, prints the sampling vector t
(and comparison tree, where one is optimized) that minimizes the leading
coefficient of comparisons, scanned elements, and their sum, plus the
entropy-limit tau vectors for scanned elements.

Example:
    python scripts/sampling_tables.py --ks 3 5 7 9 --budgets 0 2 4 6 8
"""

import argparse
import sys

from mpqlab import theory, trees


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ks", type=int, nargs="+", default=[3, 5, 7, 9])
    ap.add_argument("--budgets", type=int, nargs="+",
                    default=[0, 2, 4, 6, 8, 10, 12])
    args = ap.parse_args(argv)

    for k in args.ks:
        print(f"== k = {k} ==")
        for b in args.budgets:
            cells = []
            for kind in ("comparisons", "scanned", "sum"):
                t, tree, val = theory.best_sampling_table(k, b, kind)
                tree_s = trees.format(tree) if tree is not None else "-"
                cells.append(f"{kind}={val:.4f} t={t} tree={tree_s}")
            print(f"  b={b:2d}  " + "  ".join(cells))
        tau, v = theory.opt_tau_scanned(k)
        print(f"  continuous limit: scanned={v:.4f} "
              f"tau=({', '.join(f'{x:.4f}' for x in tau)})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
