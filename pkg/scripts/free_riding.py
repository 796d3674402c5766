"""Equilibrium efforts on a star (root plus leaves) as the geometric base varies.

With a=2 the root's passive income covers it and it exerts no effort; raising
the base shrinks passive shares until the root starts working.
"""
import argparse

import numpy as np

from referral_game import ModelParams, build_tree, geometric_scheme, solve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--leaves", type=int, default=4)
    ap.add_argument("--a", default="2,2.5,3,4,6")
    args = ap.parse_args()

    tree = build_tree([None] + [0] * args.leaves)
    params = ModelParams(0.2, 15.0, 1.0)
    print("a,region,root_effort,leaf_effort,sum_effort")
    for a in (float(v) for v in args.a.split(",")):
        res = solve(tree, geometric_scheme(a), params)
        print(f"{a:g},{res.region.value},{res.profile[0]:.9g},{res.profile[1]:.9g},{np.sum(res.profile):.9g}")


if __name__ == "__main__":
    main()
