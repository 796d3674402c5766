import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from referral_game.rewards import (
    BudgetViolation,
    InvalidBase,
    NotMonotone,
    OutOfRange,
    anonymous_scheme,
    delta,
    geometric_scheme,
    parse_shares,
    require_budget,
    validate_budget,
)
from referral_game.tree import build_tree, random_tree

from .strategies import parent_lists
from .oracles import dense_delta


def test_geometric_a2():
    s = geometric_scheme(2)
    assert s.gamma == 0.5
    assert s.share(1) == 0.25
    assert s.share(2) == 0.125


def test_geometric_a3():
    s = geometric_scheme(3)
    assert s.gamma == pytest.approx(1 / 3, abs=1e-15)
    assert s.share(1) == pytest.approx(1 / 9, abs=1e-15)


def test_geometric_cap():
    s = geometric_scheme(2, level_cap=1)
    assert s.share(1) == 0.25 and s.share(2) == 0.0


@pytest.mark.parametrize("a", [1.0, 0.5, -2.0, math.inf, math.nan])
def test_geometric_bad_base(a):
    with pytest.raises(InvalidBase):
        geometric_scheme(a)


def test_anonymous_matches_truncated_geometric():
    s = anonymous_scheme(0.5, [0.25, 0.125])
    g = geometric_scheme(2, level_cap=2)
    assert [s.share(d) for d in range(6)] == [g.share(d) for d in range(6)]


def test_anonymous_validation():
    with pytest.raises(NotMonotone):
        anonymous_scheme(0.5, [0.6])
    with pytest.raises(NotMonotone):
        anonymous_scheme(0.5, [0.1, 0.2])
    with pytest.raises(OutOfRange):
        anonymous_scheme(1.0, [])
    with pytest.raises(OutOfRange):
        anonymous_scheme(0.0, [])
    with pytest.raises(OutOfRange):
        anonymous_scheme(0.5, [-0.1])


def test_pure_direct_scheme():
    s = anonymous_scheme(0.5, [])
    t = build_tree([None, 0, 1])
    assert delta(s, t, 0, 1) == 0.0
    assert delta(s, t, 1, 1) == 0.5


def test_delta_examples():
    t = build_tree([None, 0, 1])
    s = geometric_scheme(2)
    assert delta(s, t, 1, 1) == s.gamma
    assert delta(s, t, 2, 0) == 0.0
    # brute force: walk up from 2 and count hops to 0
    hops, k = 0, 2
    while k != 0:
        k, hops = t.parents[k], hops + 1
    assert delta(s, t, 0, 2) == 0.5 ** (hops + 1) == 0.125
    sibs = build_tree([None, 0, 0])
    assert delta(s, sibs, 1, 2) == 0.0


def test_budget_chain_passes():
    rep = validate_budget(geometric_scheme(2), build_tree([None, 0, 1]))
    assert rep.ok and rep.worst_node == 2
    assert rep.worst_sum == pytest.approx(0.875, abs=1e-15)


def test_budget_failure_reports_child():
    s = anonymous_scheme(0.9, [0.2])
    rep = validate_budget(s, build_tree([None, 0]))
    assert not rep.ok and rep.worst_node == 1
    assert rep.worst_sum == pytest.approx(1.1, abs=1e-15)
    with pytest.raises(BudgetViolation):
        require_budget(s, build_tree([None, 0]))


def test_budget_small_base_can_fail():
    # 1 < a < 2 overpays on deep chains
    s = geometric_scheme(1.2)
    assert not validate_budget(s, build_tree([None, 0, 1, 2, 3])).ok


@given(parent_lists(max_n=15), st.floats(2.0, 10.0))
def test_uncapped_geometric_always_in_budget(parents, a):
    t = build_tree(parents)
    rep = validate_budget(geometric_scheme(a), t)
    assert rep.ok
    bound = sum((1 / a) ** (d + 1) for d in range(max(t.depth) + 1))
    assert rep.worst_sum == pytest.approx(bound, rel=1e-12)


@given(parent_lists(max_n=12), st.floats(2.0, 6.0), st.one_of(st.none(), st.integers(1, 4)))
def test_column_sums_match_dense_matrix(parents, a, cap):
    t = build_tree(parents)
    s = geometric_scheme(a, cap)
    D = dense_delta(t, s)
    cols = D.sum(axis=0)
    rep = validate_budget(s, t)
    assert rep.worst_sum == pytest.approx(cols.max(), rel=1e-12)
    for i in range(t.n):
        for j in range(t.n):
            assert delta(s, t, i, j) == pytest.approx(D[i, j], abs=0)
            if i != j and D[i, j] > 0:
                assert delta(s, t, j, i) == 0.0


def test_parse_shares():
    s = parse_shares("0.5,0.25,0.125")
    assert s.gamma == 0.5 and s.shares == (0.25, 0.125)
