"""Empirical decryption error |e2 - F^T e1| against q/4 and the analytic bound."""

import argparse

import numpy as np

from fsgs.hashing import h0
from fsgs.ibe import decryption_error, ibe_decrypt, ibe_encrypt, ibe_extract, sample_noise
from fsgs.keys import key_gen
from fsgs.params import load_params
from fsgs.zq_linalg import inf_norm


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--params", default="small")
    ap.add_argument("--runs", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    p = load_params(args.params)
    rng = np.random.default_rng(args.seed)
    gpk, _, mosk, _ = key_gen(p, rng, users=[0])
    errors, ok = [], 0
    for j in range(args.runs):
        G = h0(j.to_bytes(4, "little"), p.n, p.ell, p.q)
        key = ibe_extract(gpk.B_enc, mosk.S, G, p.s(p.ell), p.q, rng, slack=p.slack)
        ident = tuple(int(b) for b in rng.integers(0, 2, p.ell))
        ct = ibe_encrypt(gpk.B_enc, G, ident, sample_noise(p.n, p.m, p.ell, p.chi_sigma, p.B, rng), p.q)
        errors.append(inf_norm(decryption_error(key, ct, ident, p.q)))
        ok += ibe_decrypt(key, ct, p.q) == ident
    e = np.array(errors)
    print(f"{p.name}: q/4={p.q / 4:.2f} analytic bound={p.margin_bound} (holds: {p.margin_ok})")
    print(f"error max={e.max()} mean={e.mean():.1f} p99={np.percentile(e, 99):.0f} roundtrip={ok}/{args.runs}")


if __name__ == "__main__":
    main()
