#!/usr/bin/env python3
"""Dual Doob witness b_k = a_k a_k* (columns of the Hilbert matrix).

Prints the witness ratio (||Th||/||h||)^2 at operator-norm exponent, its
numerator ||Th||^2 and denominator ||h||^2, and log-power fits of both the
ratio and the numerator.  The bounded-but-increasing ||h_n|| is what separates
the two exponents at moderate n.
"""
import argparse

from ncmart.constants import InequalityKind, growth_fit, hilbert_witness
from ncmart.matcore import INF, schatten_norm
from ncmart.triproj import hilbert_matrix, triangular


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=512)
    args = ap.parse_args()
    ratio_pts, num_pts = [], []
    n = 8
    while n <= args.max_n:
        est = hilbert_witness(InequalityKind.DOOB_DUAL, n, INF)
        h = hilbert_matrix(n)
        num = schatten_norm(triangular(h), INF) ** 2
        ratio_pts.append((n, est.lower_bound))
        num_pts.append((n, num))
        print(f"n={n:5d}  ratio={est.lower_bound:.6f}  ||Th||^2={num:.6f}  ||h||^2={schatten_norm(h, INF)**2:.6f}")
        n *= 2
    for label, pts in (("ratio", ratio_pts), ("||Th||^2", num_pts)):
        fit = growth_fit(pts)
        print(f"{label}: exponent {fit.exponent:.4f}, coefficient {fit.coefficient:.4f}, r2 {fit.r_squared:.4f}")


if __name__ == "__main__":
    main()
