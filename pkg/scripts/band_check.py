#!/usr/bin/env python3
"""Spot-check the product asymptotics prod |1 - a_k/lambda| ~ n^(-alpha*chi).

Evaluates the compensated ratio P_n * n^(alpha*chi) at dyadic n for a few
lambdas and prints the fitted log-log slope; a slope near zero is the
numeric signature of the equivalence, and the --perturb flag shows how an
exponent error of that size would reappear as drift.
"""

import argparse
import sys

from terraspec.products import alpha, ratio_band
from terraspec.sequences import cesaro_scaled

# probe points in units of chi; none lands on the diagonal set {chi/k}
LAMBDA_UNITS = [2.0, -1.0, 0.3 + 0.4j, 1.0 + 1.0j]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--chi", type=float, default=1.0)
    ap.add_argument("--n-lo", type=int, default=2**7)
    ap.add_argument("--n-hi", type=int, default=2**15)
    ap.add_argument("--perturb", type=float, default=0.0, help="added to the true exponent")
    args = ap.parse_args()

    a = cesaro_scaled(args.chi)
    print(f"{'lambda':>16s} {'alpha*chi':>10s} {'slope':>10s} {'band ratio':>11s} verdict")
    for lam in [u * args.chi for u in LAMBDA_UNITS]:
        exp = alpha(lam) * args.chi + args.perturb
        rep = ratio_band(a, lam, args.chi, (args.n_lo, args.n_hi), exponent=exp)
        band_ratio = rep.band[1] / rep.band[0]
        print(
            f"{str(lam):>16s} {alpha(lam) * args.chi:10.4f} {rep.log_log_slope:10.5f} "
            f"{band_ratio:11.4f} {rep.verdict}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
