"""Smallest eigenvalues over a q grid, written as CSV (one row per q and level)."""

import argparse
import csv
import sys

import numpy as np

from qfock.spectral import alphas, lemma41_bounds, threshold


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--nmax", type=int, default=10)
    ap.add_argument("--q-min", type=float, default=0.40)
    ap.add_argument("--q-max", type=float, default=0.50)
    ap.add_argument("--steps", type=int, default=11)
    ap.add_argument("--output", default="-", help="CSV path, '-' for stdout")
    args = ap.parse_args()

    fh = sys.stdout if args.output == "-" else open(args.output, "w", newline="")
    writer = csv.writer(fh)
    writer.writerow(["q", "n", "alpha", "threshold", "margin", "lower_bound"])
    for q in np.linspace(args.q_min, args.q_max, args.steps):
        q = round(float(q), 12)
        lower = lemma41_bounds(q)[0]
        for n, a in enumerate(alphas(args.d, args.nmax, q, blocks=True), start=1):
            writer.writerow([q, n, f"{a:.12g}", f"{threshold(q):.12g}", f"{a - threshold(q):.6g}", f"{lower:.12g}"])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
