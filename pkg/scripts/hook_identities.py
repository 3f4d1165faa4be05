#!/usr/bin/env python3
"""Table of the column/row hook identities of the Hilbert martingale.

For each n prints ||(sum a_k a_k*)^{1/2}||_inf next to ||T h||_inf and
||(sum b_k b_k*)^{1/2}||_inf next to (sum_{j<n} j^-2)^{1/2}.
"""
import argparse
import math

from ncmart.matcore import INF, Side, schatten_norm, sq_fn_norm
from ncmart.triproj import column_parts, hilbert_matrix, triangular


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 16, 64, 256])
    args = ap.parse_args()
    print(f"{'n':>6} {'col':>14} {'||Th||':>14} {'row':>14} {'zeta_n':>14}")
    for n in args.sizes:
        h = hilbert_matrix(n)
        hp = column_parts(h)
        col = sq_fn_norm(hp.a_parts, INF, Side.ROW)
        row = sq_fn_norm(hp.b_parts, INF, Side.ROW)
        zeta = math.sqrt(sum(1 / j**2 for j in range(1, n)))
        print(f"{n:>6} {col:14.10f} {schatten_norm(triangular(h), INF):14.10f} {row:14.10f} {zeta:14.10f}")


if __name__ == "__main__":
    main()
