"""Roots of the truncated sufficient condition and the product/theta identity."""

import argparse

import numpy as np

from qfock.spectral import condition_root, gauss_product, gauss_theta, lemma41_bounds


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-terms", type=int, default=12)
    args = ap.parse_args()

    print("terms  root")
    for terms in range(2, args.max_terms + 1):
        print(f"{terms:>5}  {condition_root(terms):.12f}")
    print(f"sqrt(2) - 1 = {np.sqrt(2) - 1:.12f}")

    print("\n   q   product            theta              gap       lower bound")
    for q in np.round(np.arange(10) / 10, 10):
        p, t = gauss_product(q), gauss_theta(q)
        print(f"{q:4.1f}   {p:.15f}  {t:.15f}  {abs(p - t):.1e}   {lemma41_bounds(q)[0]:.6f}")


if __name__ == "__main__":
    main()
