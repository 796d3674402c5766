"""Referral trees: construction, validation, traversal and random generation."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


class TreeError(ValueError):
    pass


class MultipleRoots(TreeError):
    pass


class DisconnectedNode(TreeError):
    pass


class Cycle(DisconnectedNode):
    # with a single root, an unreachable node always sits on or above a parent cycle
    pass


class IndexOutOfRange(TreeError, IndexError):
    pass


class ZeroNodes(TreeError):
    pass


@dataclass(frozen=True)
class ReferralTree:
    """Rooted tree of agents; ``parents[i]`` is the recruiter of ``i``.

    Build through :func:`build_tree` (or :func:`random_tree`), which validates
    the parent list and fills in the derived fields.
    """

    parents: tuple[Optional[int], ...]
    children: tuple[tuple[int, ...], ...] = field(repr=False)
    depth: tuple[int, ...] = field(repr=False)
    root: int
    # root first, every node after its parent
    order: tuple[int, ...] = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.parents)

    def is_leaf(self, i: int) -> bool:
        return not self.children[i]

    def check_index(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexOutOfRange(f"node {i} not in 0..{self.n - 1}")

    def ancestors(self, j: int):
        """Yield ``(ancestor, distance)`` pairs walking up from ``j`` (exclusive)."""
        d = 0
        k = self.parents[j]
        while k is not None:
            d += 1
            yield k, d
            k = self.parents[k]

    def leaves_first(self) -> tuple[int, ...]:
        return self.order[::-1]

    def to_dict(self) -> dict:
        return {"n": self.n, "parents": list(self.parents)}


def build_tree(parents: Sequence[Optional[int]]) -> ReferralTree:
    n = len(parents)
    if n == 0:
        raise ZeroNodes("parent list is empty")
    clean: list[Optional[int]] = []
    for i, p in enumerate(parents):
        if p is None:
            clean.append(None)
            continue
        if isinstance(p, bool) or not isinstance(p, (int, np.integer)):
            raise TreeError(f"parent of node {i} is not an integer: {p!r}")
        p = int(p)
        if not 0 <= p < n:
            raise IndexOutOfRange(f"parent of node {i} is {p}, outside 0..{n - 1}")
        if p == i:
            raise Cycle(f"node {i} is its own parent")
        clean.append(p)

    roots = [i for i, p in enumerate(clean) if p is None]
    if len(roots) > 1:
        raise MultipleRoots(f"nodes {roots} have no parent")
    if not roots:
        raise Cycle("no root: every node has a parent")
    root = roots[0]

    kids: list[list[int]] = [[] for _ in range(n)]
    for i, p in enumerate(clean):
        if p is not None:
            kids[p].append(i)

    depth = [-1] * n
    depth[root] = 0
    order = []
    queue = deque([root])
    while queue:
        i = queue.popleft()
        order.append(i)
        for c in kids[i]:
            depth[c] = depth[i] + 1
            queue.append(c)

    if len(order) < n:
        # unreached nodes hang off a parent cycle
        missing = [i for i in range(n) if depth[i] < 0]
        raise Cycle(f"nodes {missing} are not connected to root {root} (parent cycle)")

    return ReferralTree(
        parents=tuple(clean),
        children=tuple(tuple(k) for k in kids),
        depth=tuple(depth),
        root=root,
        order=tuple(order),
    )


def subtree(tree: ReferralTree, i: int) -> list[int]:
    """Nodes of the subtree rooted at ``i``, leaves first (``i`` is last)."""
    tree.check_index(i)
    out = []
    stack = [i]
    while stack:
        k = stack.pop()
        out.append(k)
        stack.extend(tree.children[k])
    return out[::-1]


def hop_distance(tree: ReferralTree, i: int, j: int) -> Optional[int]:
    """Edges on the downward path from ``i`` to ``j``; None if ``j`` is not below ``i``."""
    tree.check_index(i)
    tree.check_index(j)
    gap = tree.depth[j] - tree.depth[i]
    if gap < 0:
        return None
    k = j
    for _ in range(gap):
        k = tree.parents[k]
    return gap if k == i else None


def random_tree(n: int, seed: int) -> ReferralTree:
    """Uniform random recursive tree: node i attaches to a uniform pick of 0..i-1.

    Draws come from numpy's PCG64 generator seeded with ``seed``, so a given
    (n, seed) always yields the same tree.
    """
    if n < 1:
        raise ZeroNodes(f"need at least one node, got n={n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    parents: list[Optional[int]] = [None]
    for i in range(1, n):
        parents.append(int(rng.integers(0, i)))
    return build_tree(parents)


def load_tree(path: str | Path) -> ReferralTree:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise TreeError(f"{path}: not valid JSON ({e})") from e
    if not isinstance(doc, dict) or "parents" not in doc:
        raise TreeError(f"{path}: expected an object with 'n' and 'parents'")
    parents = doc["parents"]
    if not isinstance(parents, list):
        raise TreeError(f"{path}: 'parents' must be an array")
    if "n" in doc and doc["n"] != len(parents):
        raise TreeError(f"{path}: n={doc['n']} but parents has {len(parents)} entries")
    return build_tree(parents)


def save_tree(tree: ReferralTree, path: str | Path) -> None:
    Path(path).write_text(json.dumps(tree.to_dict()) + "\n")
