#!/usr/bin/env python3
"""How interchangeable are A- and D-optimal samples as the budget grows?

For each sample size n, solve both criteria on one synthetic pool, round,
and score each criterion's rounded sample under the other criterion.  Both
columns approach 1 from below as n grows.  Example:

    python3 scripts/cross_criteria_table.py --N 10000 --k 11 --ns 500,1000,3000,5000
"""

import argparse

import numpy as np

from batchdesign.bench import REFERENCE_GAP, make_gaussian_pool, run_cross_criteria
from batchdesign.data_io import write_table_csv


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--N", type=int, default=10_000, help="pool size")
    ap.add_argument("--k", type=int, default=11, help="feature count incl. intercept")
    ap.add_argument("--ns", default="500,1000,3000,5000",
                    help="comma-separated sample sizes")
    ap.add_argument("--v", type=float, default=REFERENCE_GAP,
                    help="relaxation gap target for both solves")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None, help="also write the table to this CSV")
    args = ap.parse_args(argv)

    ns = tuple(int(s) for s in args.ns.split(","))
    rng = np.random.default_rng(args.seed)
    atoms = make_gaussian_pool(args.N, args.k, rng)
    rows = run_cross_criteria(atoms, ns, v=args.v)

    print(f"N={args.N} k={args.k}")
    print(f"{'n':>6} {'A-eff of D-sample':>18} {'D-eff of A-sample':>18}")
    for r in rows:
        print(f"{r.n:>6} {r.a_eff_of_d:>18.4f} {r.d_eff_of_a:>18.4f}")

    if args.out:
        write_table_csv(args.out, ["n", "a_eff_of_d", "d_eff_of_a"],
                        [[r.n, r.a_eff_of_d, r.d_eff_of_a] for r in rows])
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
