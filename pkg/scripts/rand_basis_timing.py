"""Wall time of trap_gen, ext_basis and rand_basis at the preset dimensions."""

import argparse
import time

import numpy as np

from fsgs.params import load_params
from fsgs.trapdoor import ext_basis, rand_basis, trap_gen
from fsgs.zq_linalg import gram_schmidt_norm


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--params", default="small")
    ap.add_argument("--trials", type=int, default=5)
    args = ap.parse_args()
    p = load_params(args.params)
    rng = np.random.default_rng(0)
    tp, t_gen = timed(trap_gen, p.n, p.m, p.q, rng)
    print(f"trap_gen n={p.n} m={p.m}: {t_gen:.2f}s gs={gram_schmidt_norm(tp.S):.2f}")
    for width in range(1, p.d + 1):
        A = np.concatenate([tp.A] + [rng.integers(0, p.q, (p.n, p.m)) for _ in range(p.ell + width)], axis=1)
        ext, t_ext = timed(ext_basis, tp.S, tp.A, A, p.q)
        s = p.s(p.ell + width)
        times = [timed(rand_basis, ext.S, A, s, p.q, rng, slack=p.slack)[1] for _ in range(args.trials)]
        print(f"dim={A.shape[1]}: ext_basis {t_ext:.2f}s, rand_basis mean {np.mean(times):.2f}s "
              f"max {max(times):.2f}s at s={s:.1f}")


if __name__ == "__main__":
    main()
