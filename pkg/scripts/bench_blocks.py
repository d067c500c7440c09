"""Time dense levels against multiset blocks for alpha_1..alpha_n."""

import argparse
import time

from qfock.basis import block_dimension, multiset_classes
from qfock.gram import clear_block_caches
from qfock.spectral import alphas, dense_alphas


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        clear_block_caches()
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return out, best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--nmax", type=int, default=10)
    ap.add_argument("--q", type=float, default=0.455)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    dense, t_dense = timed(lambda: dense_alphas(args.d, args.nmax, args.q), args.repeat)
    blocks, t_blocks = timed(lambda: alphas(args.d, args.nmax, args.q, blocks=True), args.repeat)
    dims = [block_dimension(c) for c in multiset_classes(args.d, args.nmax)]
    print(f"dense : {t_dense:.3f}s, peak dim {args.d ** args.nmax}, entries {args.d ** (2 * args.nmax)}")
    print(f"blocks: {t_blocks:.3f}s, peak dim {max(dims)}, entries {sum(x * x for x in dims)}")
    print(f"max |alpha gap| = {max(abs(a - b) for a, b in zip(dense, blocks)):.2e}")


if __name__ == "__main__":
    main()
