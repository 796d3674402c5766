"""Anonymous reward-sharing schemes.

A scheme pays the grabber a direct share ``gamma`` and an ancestor ``d`` hops
above the grabber the share ``share(d)``. Shares only depend on the hop
distance, so the full n-by-n sharing matrix is never built.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .tree import ReferralTree, hop_distance


class SchemeError(ValueError):
    pass


class InvalidBase(SchemeError):
    pass


class NotMonotone(SchemeError):
    pass


class OutOfRange(SchemeError):
    pass


class BudgetViolation(SchemeError):
    pass


BUDGET_TOL = 1e-12


@dataclass(frozen=True)
class RewardScheme:
    gamma: float
    # shares[d - 1] is paid at distance d; ignored when geometric_a is set
    shares: tuple[float, ...] = ()
    level_cap: Optional[int] = None
    geometric_a: Optional[float] = None

    def share(self, d: int) -> float:
        if d == 0:
            return self.gamma
        if d < 0:
            raise ValueError(f"negative distance {d}")
        if self.level_cap is not None and d > self.level_cap:
            return 0.0
        if self.geometric_a is not None:
            return (1.0 / self.geometric_a) ** (d + 1)
        if d <= len(self.shares):
            return self.shares[d - 1]
        return 0.0

    @property
    def reach(self) -> float:
        """Largest distance with a possibly nonzero share (inf if unbounded)."""
        if self.geometric_a is not None:
            return math.inf if self.level_cap is None else self.level_cap
        last = len(self.shares)
        while last and self.shares[last - 1] == 0.0:
            last -= 1
        return last if self.level_cap is None else min(last, self.level_cap)

    def shares_up_to(self, depth: int) -> list[float]:
        """``[share(1), ..., share(depth)]`` truncated at the reach."""
        top = int(min(depth, self.reach))
        return [self.share(d) for d in range(1, top + 1)]

    def describe(self) -> str:
        if self.geometric_a is not None:
            cap = "" if self.level_cap is None else f", cap={self.level_cap}"
            return f"geometric(a={self.geometric_a:g}{cap})"
        return "shares(" + ",".join(f"{v:g}" for v in (self.gamma, *self.shares)) + ")"


def geometric_scheme(a: float, level_cap: Optional[int] = None) -> RewardScheme:
    """Share ``(1/a)**(d+1)`` at distance d; the grabber keeps ``1/a``."""
    if not a > 1 or not math.isfinite(a):
        raise InvalidBase(f"geometric base must be a finite real > 1, got {a}")
    if level_cap is not None and level_cap < 1:
        raise SchemeError(f"level cap must be a positive integer, got {level_cap}")
    return RewardScheme(gamma=1.0 / a, level_cap=level_cap, geometric_a=float(a))


def anonymous_scheme(gamma: float, shares: Sequence[float]) -> RewardScheme:
    seq = [float(gamma), *map(float, shares)]
    if not 0.0 < seq[0] < 1.0:
        raise OutOfRange(f"direct share must lie in (0, 1), got {gamma}")
    for d, v in enumerate(seq[1:], start=1):
        if not 0.0 <= v < 1.0:
            raise OutOfRange(f"share at distance {d} must lie in [0, 1), got {v}")
    for d in range(1, len(seq)):
        if seq[d] > seq[d - 1]:
            raise NotMonotone(
                f"share at distance {d} ({seq[d]}) exceeds the one at distance {d - 1} ({seq[d - 1]})"
            )
    return RewardScheme(gamma=seq[0], shares=tuple(seq[1:]))


def delta(scheme: RewardScheme, tree: ReferralTree, i: int, j: int) -> float:
    """Fraction received by ``i`` when ``j`` grabs a task."""
    d = hop_distance(tree, i, j)
    return 0.0 if d is None else scheme.share(d)


@dataclass(frozen=True)
class BudgetReport:
    ok: bool
    worst_node: int
    worst_sum: float


def column_sum(scheme: RewardScheme, depth: int) -> float:
    """Total fraction paid out when a node at the given depth grabs a task."""
    return scheme.gamma + math.fsum(scheme.shares_up_to(depth))


def validate_budget(scheme: RewardScheme, tree: ReferralTree) -> BudgetReport:
    # column sums only grow with depth, so the deepest node is the worst one
    worst = max(range(tree.n), key=lambda j: (tree.depth[j], -j))
    total = column_sum(scheme, tree.depth[worst])
    return BudgetReport(ok=total <= 1.0 + BUDGET_TOL, worst_node=worst, worst_sum=total)


def require_budget(scheme: RewardScheme, tree: ReferralTree) -> None:
    rep = validate_budget(scheme, tree)
    if not rep.ok:
        raise BudgetViolation(
            f"{scheme.describe()} pays {rep.worst_sum:.9g} of the reward when node "
            f"{rep.worst_node} grabs a task (must be <= 1)"
        )


def parse_shares(text: str) -> RewardScheme:
    """Parse ``"gamma,d1,d2,..."`` into an anonymous scheme."""
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise SchemeError(f"cannot parse shares {text!r}: {e}") from e
    if not vals:
        raise SchemeError("shares list is empty")
    return anonymous_scheme(vals[0], vals[1:])
