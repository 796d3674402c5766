import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from referral_game.tree import (
    Cycle,
    DisconnectedNode,
    IndexOutOfRange,
    MultipleRoots,
    TreeError,
    ZeroNodes,
    build_tree,
    hop_distance,
    load_tree,
    random_tree,
    save_tree,
    subtree,
)

from .strategies import parent_lists


def test_single_node():
    t = build_tree([None])
    assert t.n == 1 and t.depth == (0,) and t.root == 0


def test_small_tree_structure():
    t = build_tree([None, 0, 0, 1])
    assert t.children[0] == (1, 2)
    assert t.children[1] == (3,)
    assert t.parents[3] == 1


def test_chain_depths():
    assert build_tree([None, 0, 1, 2]).depth == (0, 1, 2, 3)


def test_root_need_not_be_zero():
    t = build_tree([1, None, 1])
    assert t.root == 1 and t.depth == (1, 0, 1)


@pytest.mark.parametrize(
    "parents, err",
    [
        ([], ZeroNodes),
        ([None, None], MultipleRoots),
        ([None, 5], IndexOutOfRange),
        ([None, -1], IndexOutOfRange),
        ([None, 2, 1], Cycle),
        ([1, 0], Cycle),
        ([None, 1], Cycle),
        ([None, 0.5], TreeError),
        ([None, "0"], TreeError),
    ],
)
def test_build_rejects(parents, err):
    with pytest.raises(err):
        build_tree(parents)


def test_cycle_is_a_disconnection():
    with pytest.raises(DisconnectedNode):
        build_tree([None, 0, 3, 2])


def test_subtree():
    chain = build_tree([None, 0, 1])
    assert set(subtree(chain, 1)) == {1, 2}
    assert subtree(chain, 2) == [2]
    assert set(subtree(build_tree([None, 0, 0, 1]), 0)) == {0, 1, 2, 3}
    with pytest.raises(IndexOutOfRange):
        subtree(chain, 3)


def test_hop_distance():
    chain = build_tree([None, 0, 1])
    assert hop_distance(chain, 1, 1) == 0
    assert hop_distance(chain, 0, 2) == 2
    assert hop_distance(chain, 2, 0) is None
    sibs = build_tree([None, 0, 0])
    assert hop_distance(sibs, 1, 2) is None
    with pytest.raises(IndexOutOfRange):
        hop_distance(chain, 0, 7)


def test_random_tree_forced_cases():
    for seed in (0, 1, 2**63 - 1):
        assert random_tree(1, seed).parents == (None,)
        assert random_tree(2, seed).parents == (None, 0)
    with pytest.raises(ZeroNodes):
        random_tree(0, 0)


def test_random_tree_deterministic():
    assert random_tree(50, 7).parents == random_tree(50, 7).parents
    assert random_tree(50, 7).parents != random_tree(50, 8).parents


def test_random_tree_attachment_frequency():
    # parent of node 2 is uniform on {0, 1}
    trials = 10_000
    hits = sum(random_tree(3, s).parents[2] == 0 for s in range(trials))
    sigma = math.sqrt(trials * 0.25)
    assert abs(hits - trials / 2) <= 3 * sigma


@given(parent_lists())
def test_edge_count_and_child_consistency(parents):
    t = build_tree(parents)
    assert sum(len(c) for c in t.children) == t.n - 1
    for i in range(t.n):
        for c in t.children[i]:
            assert t.parents[c] == i


@given(parent_lists())
def test_subtree_leaves_first(parents):
    t = build_tree(parents)
    for i in range(t.n):
        nodes = subtree(t, i)
        assert nodes[-1] == i
        pos = {k: p for p, k in enumerate(nodes)}
        for k in nodes:
            if k != i:
                assert pos[k] < pos[t.parents[k]]


@given(parent_lists(min_n=2), st.data())
def test_distance_additive_along_path(parents, data):
    t = build_tree(parents)
    j = data.draw(st.integers(0, t.n - 1))
    path = [j] + [k for k, _ in t.ancestors(j)]
    i = data.draw(st.sampled_from(path))
    k = data.draw(st.sampled_from(path[: path.index(i) + 1]))
    assert hop_distance(t, i, j) == hop_distance(t, i, k) + hop_distance(t, k, j)


@settings(max_examples=30)
@given(st.integers(1, 60), st.integers(0, 2**64 - 1))
def test_random_tree_parents_precede(n, seed):
    t = random_tree(n, seed)
    assert t.root == 0
    assert all(t.parents[i] < i for i in range(1, n))


def test_file_roundtrip(tmp_path):
    t = random_tree(20, 3)
    path = tmp_path / "tree.json"
    save_tree(t, path)
    doc = json.loads(path.read_text())
    assert doc["n"] == 20 and doc["parents"][0] is None
    assert load_tree(path).parents == t.parents


@pytest.mark.parametrize(
    "doc, err",
    [
        ({"n": 2, "parents": [None, None]}, MultipleRoots),
        ({"n": 3, "parents": [None, 0]}, TreeError),
        ({"n": 2, "parents": [None, 4]}, IndexOutOfRange),
        ({"n": 3, "parents": [None, 2, 1]}, Cycle),
        ({"n": 1}, TreeError),
        ([None, 0], TreeError),
    ],
)
def test_load_rejects(tmp_path, doc, err):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(err):
        load_tree(path)


def test_load_rejects_garbage(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("n=3")
    with pytest.raises(TreeError):
        load_tree(path)
