#!/usr/bin/env python3
"""Growth of ||T h_n||_inf, ||h_n||_inf and the estimated t_{inf,n} in n.

Writes a whitespace table (n, ||Th||, ||h||, t_hat) to --out and prints the
log-power fits of the first and last columns.
"""
import argparse
from pathlib import Path

from ncmart.constants import growth_fit
from ncmart.estimate import SolverOptions
from ncmart.matcore import INF, schatten_norm
from ncmart.triproj import hilbert_matrix, triangular, triproj_norm_estimate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=512)
    ap.add_argument("--estimate-max-n", type=int, default=256,
                    help="largest n for the (slower) power-iteration estimate")
    ap.add_argument("--restarts", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("out/triproj_growth.dat"))
    args = ap.parse_args()

    opts = SolverOptions(restarts=args.restarts, max_iterations=80, tolerance=1e-7, seed=args.seed)
    rows = []
    n = 8
    while n <= args.max_n:
        h = hilbert_matrix(n)
        th, hn = schatten_norm(triangular(h), INF), schatten_norm(h, INF)
        t_hat = triproj_norm_estimate(n, INF, opts).lower_bound if n <= args.estimate_max_n else float("nan")
        rows.append((n, th, hn, t_hat))
        print(f"n={n:5d}  ||Th||={th:.6f}  ||h||={hn:.6f}  t_hat={t_hat:.6f}", flush=True)
        n *= 2
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text("# n ||Th||_inf ||h||_inf t_hat_inf\n"
                        + "".join(f"{r[0]} {r[1]:.17g} {r[2]:.17g} {r[3]:.17g}\n" for r in rows))
    fit = growth_fit([(r[0], r[1]) for r in rows])
    print(f"||Th|| ~ {fit.coefficient:.4f} log(n+1)^{fit.exponent:.4f}  (r2={fit.r_squared:.4f})")
    est = [(r[0], r[3]) for r in rows if r[3] == r[3]]
    if len(est) >= 4:
        fit = growth_fit(est)
        print(f"t_hat ~ {fit.coefficient:.4f} log(n+1)^{fit.exponent:.4f}  (r2={fit.r_squared:.4f})")


if __name__ == "__main__":
    main()
