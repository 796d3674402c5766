"""Utilities, the effort-sharing function, parameter regions and effort zones.

Payoff model. Tasks arrive at rate ``lam``; agent i attempts at rate
``efforts[i]``. With ``X = sum(efforts)`` agent i grabs tasks at rate
``lam * efforts[i] / X`` when the queue is stable (X > lam) and at rate
``efforts[i]`` otherwise. A grab earns the grabber ``gamma * R``; every strict
ancestor k of the grabber j earns ``gamma * R * delta_kj`` on top of that, i.e.
passive shares are taken on the grabber's direct reward. This is the payoff
whose first-order condition yields the closed-form equilibrium in
:mod:`referral_game.equilibrium`, and it is continuous across X = lam.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .rewards import RewardScheme
from .tree import ReferralTree

ZONE_TOL = 1e-9
REGION_TOL = 1e-9


@dataclass(frozen=True)
class ModelParams:
    lambda_arrival: float
    reward: float
    cost: float

    def __post_init__(self):
        for name in ("lambda_arrival", "reward", "cost"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be finite and > 0, got {v}")

    def ratio(self, scheme: RewardScheme) -> float:
        """Reward-to-cost ratio gamma * R / C."""
        return scheme.gamma * self.reward / self.cost


def as_profile(efforts: Sequence[float], n: Optional[int] = None) -> np.ndarray:
    arr = np.asarray(efforts, dtype=float)
    if arr.ndim != 1:
        raise ValueError("effort profile must be one-dimensional")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"effort profile has {arr.shape[0]} entries, tree has {n} nodes")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("efforts must be finite and nonnegative")
    return arr


@dataclass(frozen=True)
class EffortShares:
    f_values: tuple[float, ...]
    sum_f: float

    def __getitem__(self, i: int) -> float:
        return self.f_values[i]

    def as_array(self) -> np.ndarray:
        return np.array(self.f_values)


def subtree_weighted(tree: ReferralTree, scheme: RewardScheme, values: Sequence[float]) -> np.ndarray:
    """``out[i] = sum(delta_ij * values[j] for j strictly below i)``."""
    out = np.zeros(tree.n)
    reach = scheme.reach
    if reach == 0:
        return out
    shares = scheme.shares_up_to(max(tree.depth))
    for j in range(tree.n):
        v = values[j]
        if v == 0.0:
            continue
        for k, d in tree.ancestors(j):
            if d > len(shares):
                break
            out[k] += shares[d - 1] * v
    return out


def effort_shares(tree: ReferralTree, scheme: RewardScheme) -> EffortShares:
    """Bottom-up effort-sharing values ``f`` (1 at leaves, clipped at 0)."""
    shares = scheme.shares_up_to(max(tree.depth))
    pending = [0.0] * tree.n
    f = [0.0] * tree.n
    # every descendant is finished before its ancestors are visited
    for i in tree.leaves_first():
        f[i] = max(0.0, 1.0 - pending[i])
        if f[i] == 0.0:
            continue
        for k, d in tree.ancestors(i):
            if d > len(shares):
                break
            pending[k] += shares[d - 1] * f[i]
    return EffortShares(f_values=tuple(f), sum_f=math.fsum(f))


def _terms(i, efforts, tree, scheme):
    efforts = as_profile(efforts, tree.n)
    tree.check_index(i)
    own = efforts[i]
    passive = 0.0
    shares = scheme.shares_up_to(max(tree.depth))
    # walk the subtree of i and pick up the discounted efforts below it
    stack = [(c, 1) for c in tree.children[i]]
    while stack:
        j, d = stack.pop()
        if d > len(shares):
            continue
        passive += shares[d - 1] * efforts[j]
        stack.extend((c, d + 1) for c in tree.children[j])
    return own, passive, math.fsum(efforts)


def utility_overloaded(i, efforts, tree, scheme, params: ModelParams) -> float:
    """Payoff rate when every task is served (total effort above lam)."""
    own, passive, total = _terms(i, efforts, tree, scheme)
    if total == 0.0:
        raise ZeroDivisionError("overloaded branch undefined at zero total effort")
    g = scheme.gamma * params.reward
    return params.lambda_arrival * g * (own + passive) / total - params.cost * own


def utility_underloaded(i, efforts, tree, scheme, params: ModelParams) -> float:
    """Payoff rate when every attempt succeeds (total effort at most lam)."""
    own, passive, _ = _terms(i, efforts, tree, scheme)
    g = scheme.gamma * params.reward
    return g * (own + passive) - params.cost * own


def utility(i, efforts, tree, scheme, params: ModelParams) -> float:
    own, passive, total = _terms(i, efforts, tree, scheme)
    return _payoff(own, passive, total, scheme, params)


def _payoff(own, passive, total, scheme, params) -> float:
    g = scheme.gamma * params.reward
    lam = params.lambda_arrival
    if total > lam:
        return lam * g * (own + passive) / total - params.cost * own
    return g * (own + passive) - params.cost * own


def utilities(efforts, tree, scheme, params: ModelParams) -> np.ndarray:
    """Payoff rate of every agent at once."""
    efforts = as_profile(efforts, tree.n)
    passive = subtree_weighted(tree, scheme, efforts)
    total = math.fsum(efforts)
    return np.array([_payoff(efforts[i], passive[i], total, scheme, params) for i in range(tree.n)])


class Region(str, Enum):
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"
    R4 = "R4"


class Zone(str, Enum):
    Z1 = "Z1"
    Z2 = "Z2"
    Z4 = "Z4"


@dataclass(frozen=True)
class ZoneLabel:
    zone: Zone
    in_z3: bool = False

    def __str__(self):
        return "Z3" if self.in_z3 else self.zone.value


def region_threshold(shares: EffortShares) -> float:
    """Ratio above which the unique-equilibrium region starts (inf when sum f <= 1)."""
    if shares.sum_f <= 1.0 + REGION_TOL:
        return math.inf
    return shares.sum_f / (shares.sum_f - 1.0)


def classify_region(params: ModelParams, scheme: RewardScheme, shares: EffortShares) -> Region:
    r = params.ratio(scheme)
    tol = REGION_TOL * max(1.0, r)
    if r < 1.0 - tol:
        return Region.R1
    if r <= 1.0 + tol:
        return Region.R2
    if r <= region_threshold(shares) + tol:
        return Region.R3
    return Region.R4


def z3_bound(params: ModelParams, scheme: RewardScheme) -> float:
    """Lower bound every own-plus-discounted-subtree effort must meet in Z3."""
    return params.lambda_arrival * (1.0 - 1.0 / params.ratio(scheme))


def classify_zone(efforts, params: ModelParams, tree: ReferralTree, scheme: RewardScheme) -> ZoneLabel:
    efforts = as_profile(efforts, tree.n)
    lam = params.lambda_arrival
    tol = ZONE_TOL * max(1.0, lam)
    total = math.fsum(efforts)
    if total < lam - tol:
        return ZoneLabel(Zone.Z1)
    if total > lam + tol:
        return ZoneLabel(Zone.Z4)
    weighted = efforts + subtree_weighted(tree, scheme, efforts)
    return ZoneLabel(Zone.Z2, in_z3=bool(np.all(weighted >= z3_bound(params, scheme) - tol)))
