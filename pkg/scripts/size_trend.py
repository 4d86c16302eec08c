"""Signature size as k = ell + d grows at fixed n, q, d, averaged over several signatures."""

import argparse

import numpy as np

from fsgs.cli import size_trend
from fsgs.params import load_params


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--params", default="medium")
    ap.add_argument("--ks", type=int, nargs="+", default=[4, 6, 8])
    ap.add_argument("--samples", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rows = size_trend(load_params(args.params), args.ks, np.random.default_rng(args.seed), samples=args.samples,
                      ladder=False)
    prev = None
    for r in rows:
        ratio = f"{r['size'] / prev:.3f}" if prev else "-"
        print(f"k={r['k']} ell={r['ell']} L={r['L']} p_beta={r['p_beta']} mean={r['size']:.0f} "
              f"min={min(r['sizes'])} max={max(r['sizes'])} ratio={ratio} keygen={r['keygen']:.1f}s")
        prev = r["size"]


if __name__ == "__main__":
    main()
