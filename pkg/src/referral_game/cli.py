"""Command-line front end: ``referral-game {gen-tree,solve,verify,simulate,sweep}``."""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import equilibrium as eq
from .game import ModelParams, Region, as_profile, utilities
from .rewards import BudgetViolation, RewardScheme, SchemeError, geometric_scheme, parse_shares, require_budget
from .sim import SimConfig, ZeroVariance, compare_analytic, simulate, write_report_csv
from .tree import TreeError, load_tree, random_tree, save_tree

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_NONCONVERGENCE = 4


def fmt(v) -> str:
    if v is None:
        return ""
    return f"{v:.9g}"


@dataclass
class SweepSpec:
    counts: list[int]
    samples: int
    a_values: list[float]
    params: ModelParams = field(default_factory=lambda: ModelParams(0.2, 15.0, 1.0))
    base_seed: int = 0
    level_cap: int | None = None

    def __post_init__(self):
        if not self.counts or min(self.counts) < 1:
            raise ValueError("node counts must be >= 1")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not self.a_values:
            raise ValueError("need at least one geometric base")


SWEEP_COLUMNS = ["a", "n", "samples", "r4_samples", "mean_sum_effort", "std_sum_effort", "stderr", "flag"]


def run_sweep(spec: SweepSpec) -> list[dict]:
    """Mean equilibrium sum effort over random trees, one row per (a, n).

    Tree k of every cell uses seed ``base_seed + k``. Only R4 instances enter
    the mean; any other region is counted and named in ``flag``.
    """
    schemes = [geometric_scheme(a, spec.level_cap) for a in spec.a_values]
    sums = {(ai, n): [] for ai in range(len(schemes)) for n in spec.counts}
    others = {key: set() for key in sums}
    for n in spec.counts:
        for k in range(spec.samples):
            tree = random_tree(n, spec.base_seed + k)
            for ai, scheme in enumerate(schemes):
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", eq.DegenerateShares)
                    res = eq.solve(tree, scheme, spec.params)
                if res.region is Region.R4:
                    sums[ai, n].append(res.x)
                else:
                    others[ai, n].add(res.region.value)
    rows = []
    for ai, a in enumerate(spec.a_values):
        for n in spec.counts:
            xs = np.array(sums[ai, n])
            m = len(xs)
            std = float(xs.std(ddof=1)) if m > 1 else (0.0 if m == 1 else math.nan)
            rows.append(
                {
                    "a": a,
                    "n": n,
                    "samples": spec.samples,
                    "r4_samples": m,
                    "mean_sum_effort": float(xs.mean()) if m else math.nan,
                    "std_sum_effort": std,
                    "stderr": std / math.sqrt(m) if m else math.nan,
                    "flag": "" if not others[ai, n] else "non-R4:" + "+".join(sorted(others[ai, n])),
                }
            )
    return rows


def write_sweep_csv(rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([fmt(r["a"]), r["n"], r["samples"], r["r4_samples"], fmt(r["mean_sum_effort"]), fmt(r["std_sum_effort"]), fmt(r["stderr"]), r["flag"]])


# -- argument helpers -------------------------------------------------------


def _scheme(args) -> RewardScheme:
    if args.shares is not None:
        if args.level_cap is not None:
            raise SchemeError("--level-cap only applies to --geometric-a")
        return parse_shares(args.shares)
    a = 2.0 if args.geometric_a is None else args.geometric_a
    return geometric_scheme(a, args.level_cap)


def _params(args) -> ModelParams:
    return ModelParams(args.lam, args.reward, args.cost)


def _int_list(text: str) -> list[int]:
    """``"10,20,30"`` or ``"10:200:10"`` (inclusive stop)."""
    if ":" in text:
        start, stop, step = (int(v) for v in text.split(":"))
        return list(range(start, stop + 1, step))
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def load_profile(path, n: int) -> np.ndarray:
    """Read efforts from a JSON ``{"efforts": [...]}`` file or a ``solve`` CSV."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        if not isinstance(doc, dict) or not isinstance(doc.get("efforts"), list):
            raise ValueError(f"{path}: expected an object with an 'efforts' array")
        return as_profile(doc["efforts"], n)
    rows = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    reader = csv.DictReader(rows)
    if reader.fieldnames is None or "effort" not in reader.fieldnames:
        raise ValueError(f"{path}: CSV needs an 'effort' column")
    vals = {}
    for r in reader:
        vals[int(r["node"])] = float(r["effort"])
    if sorted(vals) != list(range(n)):
        raise ValueError(f"{path}: expected efforts for nodes 0..{n - 1}")
    return as_profile([vals[i] for i in range(n)], n)


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--geometric-a", type=float, default=None, help="geometric base a > 1 (default 2)")
    g.add_argument("--shares", default=None, help="anonymous scheme as gamma,d1,d2,...")
    p.add_argument("--level-cap", type=int, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=0.2, help="task arrival rate")
    p.add_argument("--reward", type=float, default=15.0)
    p.add_argument("--cost", type=float, default=1.0)


# -- subcommands ------------------------------------------------------------


def cmd_gen_tree(args) -> int:
    tree = random_tree(args.n, args.seed)
    if args.out in (None, "-"):
        print(json.dumps(tree.to_dict()))
    else:
        save_tree(tree, args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    tree = load_tree(args.tree)
    scheme, params = _scheme(args), _params(args)
    res = eq.solve(tree, scheme, params)
    util = utilities(res.profile, tree, scheme, params)

    fh, close = _open_out(args.out)
    try:
        fh.write(f"# region={res.region.value}\n")
        fh.write(f"# zone={res.zone}\n")
        fh.write(f"# characterization={res.characterization}\n")
        fh.write(f"# x={fmt(res.x)}\n# y={fmt(res.y)}\n# sum_f={fmt(res.shares.sum_f)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "f", "effort", "utility"])
        for i in range(tree.n):
            w.writerow([i, fmt(res.shares[i]), fmt(res.profile[i]), fmt(util[i])])
    finally:
        if close:
            fh.close()
    if args.profile_out:
        Path(args.profile_out).write_text(json.dumps({"efforts": [float(v) for v in res.profile]}) + "\n")

    if args.check_oracle:
        rng = np.random.default_rng(args.seed)
        dyn = eq.best_response_dynamics(rng.uniform(0, 1, tree.n), tree, scheme, params)
        ok = dyn.converged and eq.is_psne(dyn.profile, tree, scheme, params).is_psne
        if not ok:
            print(f"best-response dynamics did not reach an equilibrium after {dyn.iterations} sweeps", file=sys.stderr)
            return EXIT_NONCONVERGENCE
        gap = float(np.max(np.abs(dyn.profile - res.profile)))
        print(f"# oracle converged in {dyn.iterations} sweeps, sup-norm gap {fmt(gap)}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    tree = load_tree(args.tree)
    scheme, params = _scheme(args), _params(args)
    profile = load_profile(args.profile, tree.n)
    rep = eq.is_psne(profile, tree, scheme, params, tol=args.tol)
    fh, close = _open_out(args.out)
    try:
        fh.write(f"# is_psne={str(rep.is_psne).lower()}\n")
        fh.write(f"# worst_agent={rep.worst_agent}\n# max_gain={fmt(rep.max_gain)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "effort", "best_response", "gain"])
        for i in range(tree.n):
            w.writerow([i, fmt(profile[i]), fmt(rep.best_responses[i]), fmt(rep.gains[i])])
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_simulate(args) -> int:
    tree = load_tree(args.tree)
    scheme, params = _scheme(args), _params(args)
    require_budget(scheme, tree)
    profile = load_profile(args.profile, tree.n)
    config = SimConfig(horizon=args.horizon, seed=args.seed, replications=args.replications, warmup_fraction=args.warmup)
    report = simulate(tree, scheme, params, profile, config)
    z = None
    if config.replications > 1:
        try:
            z = compare_analytic(report, tree, scheme, params, profile)
        except ZeroVariance as e:
            print(f"# no z-scores: {e}", file=sys.stderr)
    fh, close = _open_out(args.out)
    try:
        write_report_csv(report, fh, z)
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = SweepSpec(
        counts=_int_list(args.counts),
        samples=args.samples,
        a_values=_float_list(args.a),
        params=_params(args),
        base_seed=args.seed,
        level_cap=args.level_cap,
    )
    rows = run_sweep(spec)
    fh, close = _open_out(args.out)
    try:
        write_sweep_csv(rows, fh)
    finally:
        if close:
            fh.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="referral-game", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-tree", help="random uniform-attachment referral tree")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen_tree)

    p = sub.add_parser("solve", help="equilibrium effort profile for a tree")
    p.add_argument("--tree", required=True)
    _add_model_flags(p)
    p.add_argument("--out", default=None)
    p.add_argument("--profile-out", default=None, help="also write the profile as JSON")
    p.add_argument("--check-oracle", action="store_true", help="cross-check with best-response dynamics")
    p.add_argument("--seed", type=int, default=0, help="seed for the oracle's random start")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check whether a profile is an equilibrium")
    p.add_argument("--tree", required=True)
    p.add_argument("--profile", required=True, help="JSON {'efforts': [...]} or a solve CSV")
    _add_model_flags(p)
    p.add_argument("--tol", type=float, default=eq.PSNE_TOL)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="discrete-event simulation of a profile")
    p.add_argument("--tree", required=True)
    p.add_argument("--profile", required=True)
    _add_model_flags(p)
    p.add_argument("--horizon", type=float, default=1e5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replications", type=int, default=20)
    p.add_argument("--warmup", type=float, default=0.1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="mean equilibrium sum effort over random trees")
    p.add_argument("--counts", default="10:200:10", help="'10,20,30' or 'start:stop:step'")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--a", default="2,3,4", help="comma-separated geometric bases")
    p.add_argument("--level-cap", type=int, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=0.2)
    p.add_argument("--reward", type=float, default=15.0)
    p.add_argument("--cost", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0, help="base seed")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (BudgetViolation, eq.PreconditionViolation) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except eq.NonConvergence as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (TreeError, SchemeError, ValueError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
