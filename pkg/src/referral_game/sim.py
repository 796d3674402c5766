"""Discrete-event simulation of the task queue and the competing attempt streams.

Tasks arrive as a Poisson stream and wait in an unbounded FIFO queue. Each
agent fires attempts as an independent Poisson stream; an attempt on a
nonempty queue takes one task, an attempt on an empty queue does nothing.
Task completion takes no time.

Every stream is sampled from its own exponential gaps and the streams are
merged on time, arrivals before attempts and lower agent index first on ties.
The queue length after the merged event sequence is the free +1/-1 walk
reflected at zero, which lets one replication run without a Python loop.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .game import ModelParams, as_profile, subtree_weighted, utilities
from .rewards import RewardScheme
from .tree import ReferralTree


class ZeroVariance(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    horizon: float = 1e5
    seed: int = 0
    replications: int = 20
    warmup_fraction: float = 0.1

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError(f"horizon must be > 0, got {self.horizon}")
        if self.replications < 1:
            raise ValueError(f"need at least one replication, got {self.replications}")
        if not 0 <= self.warmup_fraction <= 0.5:
            raise ValueError(f"warmup fraction must lie in [0, 0.5], got {self.warmup_fraction}")


@dataclass
class Replication:
    grabs: np.ndarray  # per node, inside the measurement window
    arrivals: int
    served: int
    mean_queue: float
    max_payout_fraction: float


@dataclass
class SimReport:
    grab_rate: np.ndarray
    direct_rate: np.ndarray
    passive_rate: np.ndarray
    utility_rate: np.ndarray
    stderr: np.ndarray
    arrivals: np.ndarray  # per replication, whole horizon
    served: np.ndarray
    mean_queue_length: float
    window: float
    max_payout_fraction: float
    per_replication_utility: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.grab_rate.shape[0]


def _poisson_times(rng: np.random.Generator, rate: float, horizon: float) -> np.ndarray:
    if rate <= 0:
        return np.empty(0)
    out = []
    t0 = 0.0
    batch = int(rate * horizon + 6 * math.sqrt(rate * horizon) + 16)
    while True:
        ts = t0 + np.cumsum(rng.exponential(1.0 / rate, size=batch))
        if ts[-1] > horizon:
            out.append(ts[ts <= horizon])
            return np.concatenate(out)
        out.append(ts)
        t0 = ts[-1]
        batch = max(16, batch // 4)


def run_once(tree: ReferralTree, scheme: RewardScheme, params: ModelParams, efforts, horizon: float, warmup: float, seed: int) -> Replication:
    efforts = as_profile(efforts, tree.n)
    rng = np.random.Generator(np.random.PCG64(seed))
    times = [_poisson_times(rng, params.lambda_arrival, horizon)]
    who = [np.full(times[0].shape, -1)]
    for i, rate in enumerate(efforts):
        ts = _poisson_times(rng, rate, horizon)
        times.append(ts)
        who.append(np.full(ts.shape, i))
    times = np.concatenate(times)
    who = np.concatenate(who)
    order = np.lexsort((who, times))
    times, who = times[order], who[order]

    step = np.where(who < 0, 1, -1)
    walk = np.cumsum(step)
    floor = np.minimum.accumulate(np.minimum(walk, 0))
    queue = walk - floor
    before = np.concatenate(([0], queue[:-1]))
    took = (who >= 0) & (before > 0)

    in_window = times > warmup
    grabs = np.bincount(who[took & in_window], minlength=tree.n)[: tree.n]

    # time-average of the queue length over (warmup, horizon]
    k0 = int(np.searchsorted(times, warmup, side="right"))
    start = queue[k0 - 1] if k0 else 0
    edges = np.concatenate(([warmup], times[k0:], [horizon]))
    levels = np.concatenate(([start], queue[k0:]))
    area = float(np.sum(levels * np.diff(edges)))
    grabbers = np.unique(who[took])
    worst = max((payout_per_task(scheme, tree, int(j), 1.0) for j in grabbers), default=0.0)
    return Replication(
        grabs=grabs,
        arrivals=int(np.count_nonzero(who < 0)),
        served=int(np.count_nonzero(took)),
        mean_queue=area / (horizon - warmup),
        max_payout_fraction=worst,
    )


def payout_per_task(scheme: RewardScheme, tree: ReferralTree, j: int, reward: float) -> float:
    """Total reward paid out when node ``j`` grabs one task."""
    # grabber keeps gamma * R, every ancestor gets its share of that direct reward
    return scheme.gamma * reward * (1.0 + math.fsum(scheme.shares_up_to(tree.depth[j])))


def simulate(tree: ReferralTree, scheme: RewardScheme, params: ModelParams, efforts, config: SimConfig) -> SimReport:
    efforts = as_profile(efforts, tree.n)
    warmup = config.warmup_fraction * config.horizon
    window = config.horizon - warmup
    g = scheme.gamma * params.reward
    reps = [run_once(tree, scheme, params, efforts, config.horizon, warmup, config.seed + k) for k in range(config.replications)]

    grab = np.array([r.grabs / window for r in reps])
    direct = g * grab
    passive = np.array([g * subtree_weighted(tree, scheme, row) for row in grab])
    util = direct + passive - params.cost * efforts
    k = len(reps)
    stderr = util.std(axis=0, ddof=1) / math.sqrt(k) if k > 1 else np.full(tree.n, np.nan)
    return SimReport(
        grab_rate=grab.mean(axis=0),
        direct_rate=direct.mean(axis=0),
        passive_rate=passive.mean(axis=0),
        utility_rate=util.mean(axis=0),
        stderr=stderr,
        arrivals=np.array([r.arrivals for r in reps]),
        served=np.array([r.served for r in reps]),
        mean_queue_length=float(np.mean([r.mean_queue for r in reps])),
        window=window,
        max_payout_fraction=max(r.max_payout_fraction for r in reps),
        per_replication_utility=util,
    )


def compare_analytic(report: SimReport, tree: ReferralTree, scheme: RewardScheme, params: ModelParams, efforts, analytic: Optional[np.ndarray] = None) -> np.ndarray:
    """Per-node z-scores of the simulated payoff rate against the model.

    ``analytic`` overrides the model payoffs, e.g. to run a negative control.
    """
    if report.per_replication_utility.shape[0] < 2:
        raise ZeroVariance("need at least two replications for a standard error")
    if analytic is None:
        analytic = utilities(efforts, tree, scheme, params)
    se = report.stderr
    if np.all(se == 0):
        raise ZeroVariance("all replications produced identical payoffs")
    diff = report.utility_rate - np.asarray(analytic, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, diff / np.where(se > 0, se, 1.0), np.where(diff == 0, 0.0, np.inf * np.sign(diff)))
    return z


def write_report_csv(report: SimReport, fh, z: Optional[np.ndarray] = None) -> None:
    """One row per node; ``z_score`` is left blank when ``z`` is None."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["node", "grab_rate", "direct_rate", "passive_rate", "utility_rate", "stderr", "z_score"])
    for i in range(report.n):
        vals = (report.grab_rate[i], report.direct_rate[i], report.passive_rate[i], report.utility_rate[i], report.stderr[i])
        w.writerow([i, *(f"{v:.9g}" for v in vals), "" if z is None else f"{z[i]:.9g}"])
