"""Compare simulated payoff rates against the analytic payoffs on a random tree."""
import argparse

import numpy as np

from referral_game import ModelParams, SimConfig, compare_analytic, geometric_scheme, random_tree, simulate, solve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--tree-seed", type=int, default=0)
    ap.add_argument("--horizon", type=float, default=1e5)
    ap.add_argument("--replications", type=int, default=20)
    args = ap.parse_args()

    tree = random_tree(args.n, args.tree_seed)
    scheme = geometric_scheme(2)
    params = ModelParams(0.2, 15.0, 1.0)
    res = solve(tree, scheme, params)
    rep = simulate(tree, scheme, params, res.profile, SimConfig(horizon=args.horizon, replications=args.replications))
    z = compare_analytic(rep, tree, scheme, params, res.profile)
    print(f"region {res.region.value}, parents {tree.parents}")
    print("node,effort,simulated,stderr,z")
    for i in range(tree.n):
        print(f"{i},{res.profile[i]:.6g},{rep.utility_rate[i]:.6g},{rep.stderr[i]:.3g},{z[i]:+.2f}")
    print(f"max |z| = {np.max(np.abs(z)):.2f}")


if __name__ == "__main__":
    main()
