#!/usr/bin/env python3
"""Sweep entry/weight family pairs and tabulate bounded/compact verdicts.

Shows how the weighted criterion separates cases that look identical on
plain c0: the 1/log(n+1) entries are unbounded there but compact against
geometric weights.
"""

import sys

from terraspec.sequences import cesaro_scaled, constant, geometric, log_reciprocal, p_cesaro
from terraspec.terraced import classify_boundedness

PAIRS = [
    ("a=1/n", cesaro_scaled(1.0), "r=s=1", constant(1.0)),
    ("a=2/n", cesaro_scaled(2.0), "r=s=1", constant(1.0)),
    ("a=1/n^2", p_cesaro(2.0), "r=s=1", constant(1.0)),
    ("a=1/sqrt(n)", p_cesaro(0.5), "r=s=1", constant(1.0)),
    ("a=1/log(n+1)", log_reciprocal(), "r=s=1", constant(1.0)),
    ("a=1/log(n+1)", log_reciprocal(), "r=s=2^-n", geometric(0.5)),
    ("a=1/n", cesaro_scaled(1.0), "r=s=2^-n", geometric(0.5)),
]


def main() -> int:
    print(f"{'entries':14s} {'weights':10s} {'bounded':8s} {'compact':8s} {'norm':>12s} method")
    for a_name, a, w_name, w in PAIRS:
        rep = classify_boundedness(a, w, w)
        norm = f"{rep.norm:.6g}" if rep.norm is not None else "-"
        print(
            f"{a_name:14s} {w_name:10s} {rep.bounded.value:8s} {rep.compact.value:8s} "
            f"{norm:>12s} {rep.method}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
