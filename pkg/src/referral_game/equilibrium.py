"""Pure-strategy equilibria: closed forms per region, best responses, verification."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .game import (
    EffortShares,
    ModelParams,
    Region,
    ZoneLabel,
    _payoff,
    as_profile,
    classify_region,
    classify_zone,
    region_threshold,
    effort_shares,
    subtree_weighted,
    z3_bound,
)
from .rewards import RewardScheme, require_budget
from .tree import ReferralTree

PSNE_TOL = 1e-9
# relative slack when comparing candidate payoffs; smaller effort wins ties
TIE_TOL = 1e-12

UNIQUE = "unique-point"
SET_Z1_Z2 = "set-Z1∪Z2"
SET_Z3 = "set-Z3"
UNIQUE_Z4 = "unique-point-Z4"


class PreconditionViolation(ValueError):
    pass


class InvalidBeta(ValueError):
    pass


class NonConvergence(RuntimeError):
    pass


class DegenerateShares(UserWarning):
    """Sum of effort shares is 1, so the unique-equilibrium region is empty."""


@dataclass(frozen=True)
class R4Solution:
    profile: np.ndarray
    x: float
    y: float


@dataclass(frozen=True)
class EquilibriumResult:
    region: Region
    profile: np.ndarray
    characterization: str
    shares: EffortShares
    zone: ZoneLabel
    x: Optional[float] = None
    y: Optional[float] = None


@dataclass
class VerificationReport:
    is_psne: bool
    worst_agent: int
    max_gain: float
    best_responses: np.ndarray
    gains: np.ndarray = field(repr=False)


@dataclass
class DynamicsResult:
    profile: np.ndarray
    converged: bool
    iterations: int
    last_change: float


def psne_closed_form_r4(shares: EffortShares, params: ModelParams, scheme: RewardScheme) -> R4Solution:
    region = classify_region(params, scheme, shares)
    if region is not Region.R4:
        raise PreconditionViolation(f"closed form needs region R4, parameters are in {region.value}")
    scale = params.lambda_arrival * params.ratio(scheme)
    sf = shares.sum_f
    y = scale * (sf - 1.0) / sf**2
    x = scale * (sf - 1.0) / sf
    return R4Solution(profile=y * shares.as_array(), x=x, y=y)


def construct_z3_profile(
    shares: EffortShares,
    params: ModelParams,
    scheme: RewardScheme,
    tree: ReferralTree,
    beta: Optional[Sequence[float]] = None,
) -> np.ndarray:
    """A critically loaded equilibrium for region R3.

    Each node gets its effort share times the Z3 bound, and the slack up to a
    total of exactly lam is split according to ``beta`` (uniform by default).
    """
    region = classify_region(params, scheme, shares)
    if region is not Region.R3:
        raise PreconditionViolation(f"Z3 construction needs region R3, parameters are in {region.value}")
    n = tree.n
    if beta is None:
        beta = np.full(n, 1.0 / n)
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (n,) or np.any(beta < 0) or not math.isclose(beta.sum(), 1.0, abs_tol=1e-9):
        raise InvalidBeta("beta must be n nonnegative weights summing to 1")
    lam = params.lambda_arrival
    base = z3_bound(params, scheme)
    slack = max(0.0, lam - base * shares.sum_f)
    return base * shares.as_array() + beta * slack


def _best_response(own_passive, s, scheme, params) -> tuple[float, float]:
    """(argmax, max) of agent payoff over [0, inf) given others' total ``s``."""
    p = own_passive
    lam = params.lambda_arrival
    g = scheme.gamma * params.reward
    kink = max(0.0, lam - s)
    cands = [0.0, kink]
    if s - p > 0:
        cands.append(max(kink, math.sqrt(lam * g * (s - p) / params.cost) - s))
    best_x, best_u = 0.0, _payoff(0.0, p, s, scheme, params)
    for x in cands[1:]:
        u = _payoff(x, p, s + x, scheme, params)
        if u > best_u + TIE_TOL * max(1.0, abs(best_u)):
            best_x, best_u = x, u
    return best_x, best_u


def best_response(i: int, efforts, tree: ReferralTree, scheme: RewardScheme, params: ModelParams) -> float:
    """Exact payoff-maximizing effort of agent ``i`` against the rest of ``efforts``."""
    efforts = as_profile(efforts, tree.n)
    tree.check_index(i)
    p = subtree_weighted(tree, scheme, efforts)[i]
    s = math.fsum(efforts) - efforts[i]
    return _best_response(p, max(0.0, s), scheme, params)[0]


def is_psne(efforts, tree: ReferralTree, scheme: RewardScheme, params: ModelParams, tol: float = PSNE_TOL) -> VerificationReport:
    efforts = as_profile(efforts, tree.n)
    passive = subtree_weighted(tree, scheme, efforts)
    total = math.fsum(efforts)
    brs = np.zeros(tree.n)
    gains = np.zeros(tree.n)
    for i in range(tree.n):
        s = max(0.0, total - efforts[i])
        brs[i], best = _best_response(passive[i], s, scheme, params)
        now = _payoff(efforts[i], passive[i], total, scheme, params)
        gains[i] = max(0.0, best - now)
    worst = int(np.argmax(gains))
    return VerificationReport(
        is_psne=bool(gains[worst] <= tol),
        worst_agent=worst,
        max_gain=float(gains[worst]),
        best_responses=brs,
        gains=gains,
    )


def best_response_dynamics(
    init,
    tree: ReferralTree,
    scheme: RewardScheme,
    params: ModelParams,
    damping: float = 0.5,
    max_iter: int = 100_000,
    tol: float = 1e-12,
) -> DynamicsResult:
    """Damped in-place best-response sweeps in ascending node order.

    Stops once a full sweep moves no effort by ``tol`` or more. Convergence is
    not guaranteed; check ``converged`` and verify the result with
    :func:`is_psne` before calling it an equilibrium.
    """
    if not 0 < damping <= 1:
        raise ValueError(f"damping must lie in (0, 1], got {damping}")
    prof = as_profile(init, tree.n).copy()
    shares = scheme.shares_up_to(max(tree.depth))
    # descendants of i with their discount factors, reused every sweep
    below = []
    for i in range(tree.n):
        idx, w = [], []
        stack = [(c, 1) for c in tree.children[i]]
        while stack:
            j, d = stack.pop()
            if d > len(shares):
                continue
            idx.append(j)
            w.append(shares[d - 1])
            stack.extend((c, d + 1) for c in tree.children[j])
        below.append((np.array(idx, dtype=int), np.array(w)))

    total = math.fsum(prof)
    change = math.inf
    for it in range(1, max_iter + 1):
        change = 0.0
        for i in range(tree.n):
            idx, w = below[i]
            p = float(w @ prof[idx]) if idx.size else 0.0
            s = max(0.0, total - prof[i])
            br = _best_response(p, s, scheme, params)[0]
            new = (1.0 - damping) * prof[i] + damping * br
            change = max(change, abs(new - prof[i]))
            total += new - prof[i]
            prof[i] = new
        # keep the running total from drifting
        total = math.fsum(prof)
        if change < tol:
            return DynamicsResult(prof, True, it, change)
    return DynamicsResult(prof, False, max_iter, change)


def solve(tree: ReferralTree, scheme: RewardScheme, params: ModelParams) -> EquilibriumResult:
    """Representative equilibrium and its characterization for any region."""
    require_budget(scheme, tree)
    shares = effort_shares(tree, scheme)
    region = classify_region(params, scheme, shares)
    x = y = None
    if region is Region.R1:
        profile, kind = np.zeros(tree.n), UNIQUE
    elif region is Region.R2:
        profile, kind = np.zeros(tree.n), SET_Z1_Z2
    elif region is Region.R3:
        if math.isinf(region_threshold(shares)):
            warnings.warn(
                f"sum of effort shares is {shares.sum_f:g}; every ratio above 1 falls in R3",
                DegenerateShares,
                stacklevel=2,
            )
        profile, kind = construct_z3_profile(shares, params, scheme, tree), SET_Z3
    else:
        sol = psne_closed_form_r4(shares, params, scheme)
        profile, kind, x, y = sol.profile, UNIQUE_Z4, sol.x, sol.y
    zone = classify_zone(profile, params, tree, scheme)
    return EquilibriumResult(region=region, profile=profile, characterization=kind, shares=shares, zone=zone, x=x, y=y)

