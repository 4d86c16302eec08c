"""Measure the Gram-Schmidt norm feeding each delegation level against s_level / slack."""

import argparse

import numpy as np

from fsgs.keys import measure_ladder
from fsgs.params import load_params


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--params", default="small")
    ap.add_argument("--seeds", type=int, default=3)
    args = ap.parse_args()
    p = load_params(args.params)
    print(f"{p.name}: slack={p.slack} C={p.trapdoor_c} ladder={[round(s, 1) for s in p.ladder]}")
    for seed in range(args.seeds):
        for r in measure_ladder(p, np.random.default_rng(seed)):
            print(f"seed={seed} level={r['level']} dim={r['dim']} parent_gs={r['parent_gs']:.2f} "
                  f"s={r['s']:.1f} s/gs={r['s'] / r['parent_gs']:.1f} ok={r['ok']}")


if __name__ == "__main__":
    main()
