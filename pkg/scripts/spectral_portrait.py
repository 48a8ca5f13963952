#!/usr/bin/env python3
"""Render a fine-spectrum portrait of a terraced operator as CSV.

Classifies every node of a complex-plane grid and writes one row per node
(re, im, label, evidence columns).  Feed the CSV to any plotting tool; the
label column partitions the plane into resolvent / point / residual /
continuous-candidate / unknown regions.

    python scripts/spectral_portrait.py --chi 1.0 --resolution 81 --out portrait.csv
"""

import argparse
import sys

from terraspec.cli import _fmt
from terraspec.sequences import cesaro_scaled, constant
from terraspec.spectrum import GridSpec, spectrum_grid


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--chi", type=float, default=1.0, help="limit of n * a_n (a_n = chi/n)")
    ap.add_argument("--resolution", type=int, default=41)
    ap.add_argument("--margin", type=float, default=0.3, help="padding around the spectral disk")
    ap.add_argument("--out", default="portrait.csv")
    args = ap.parse_args()

    chi = args.chi
    a = cesaro_scaled(chi)
    grid = GridSpec(
        (-args.margin * chi, chi + args.margin * chi),
        (-(0.5 + args.margin) * chi, (0.5 + args.margin) * chi),
        (args.resolution, args.resolution),
    )
    points = spectrum_grid(a, constant(1.0), chi, grid)

    with open(args.out, "w") as fh:
        fh.write("re,im,label,alpha_chi,dist_to_S\n")
        for pt in points:
            ac = pt.evidence.alpha_chi
            fh.write(
                f"{_fmt(pt.lam.real)},{_fmt(pt.lam.imag)},{pt.label.value},"
                f"{_fmt(ac) if ac is not None else 'nan'},{_fmt(pt.evidence.dist_to_S)}\n"
            )
    counts = {}
    for pt in points:
        counts[pt.label.value] = counts.get(pt.label.value, 0) + 1
    print(f"wrote {len(points)} nodes to {args.out}")
    for label, count in sorted(counts.items()):
        print(f"  {label:22s} {count}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
