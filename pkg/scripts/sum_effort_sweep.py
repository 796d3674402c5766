"""Mean equilibrium sum effort over random trees versus tree size.

Writes the sweep CSV and, if matplotlib is importable, a plot next to it.
"""
import argparse
import sys

from referral_game.cli import SweepSpec, run_sweep, write_sweep_csv
from referral_game.game import ModelParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--max-n", type=int, default=200)
    ap.add_argument("--out", default="sum_effort.csv")
    args = ap.parse_args()

    spec = SweepSpec(
        counts=list(range(10, args.max_n + 1, 10)),
        samples=args.samples,
        a_values=[2.0, 3.0, 4.0],
        params=ModelParams(0.2, 15.0, 1.0),
    )
    rows = run_sweep(spec)
    with open(args.out, "w", newline="") as fh:
        write_sweep_csv(rows, fh)
    print(f"wrote {args.out}")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available, skipping plot", file=sys.stderr)
        return
    fig, ax = plt.subplots()
    for a in spec.a_values:
        cells = [r for r in rows if r["a"] == a]
        ax.errorbar([r["n"] for r in cells], [r["mean_sum_effort"] for r in cells], yerr=[r["stderr"] for r in cells], label=f"a={a:g}")
    ax.set_xlabel("number of nodes")
    ax.set_ylabel("mean sum effort")
    ax.legend()
    png = args.out.rsplit(".", 1)[0] + ".png"
    fig.savefig(png, dpi=120)
    print(f"wrote {png}")


if __name__ == "__main__":
    main()
