import math
import operator
import random

import pytest
from hypothesis import given, strategies as st

from noisytrees.experiments import call_budget_constant
from noisytrees.oracle import NoisyComparator
from noisytrees.segtree import MAX, MIN, SUM, LeafNavigation, SegCursor, SegTree, build, parent_cursor
from noisytrees.walker import walk


def fold(f, xs):
    acc = xs[0]
    for x in xs[1:]:
        acc = f(acc, x)
    return acc


def test_single_element():
    t = build([5])
    assert t.values[0] == 5 and t.k == 1
    assert t.locate_leaf(1) == SegCursor(0, 1, 1)
    t.update(1, 7)
    assert t.values[0] == 7


def test_padding():
    t = build([1, 2, 3])
    assert t.k == 4 and t.values[0] == 6 and t.values[-1] == 0


def test_random_build_audit():
    vals = [random.Random(1).randrange(100) for _ in range(100)]
    assert build(vals).audit() is None


def test_locate_leaf_moves_noiseless():
    t = build(list(range(8)))
    nav = LeafNavigation(t, 5, 0.1)
    moves = []
    orig = nav.select_child
    nav.select_child = lambda c: moves.append(c) or orig(c)
    leaf = walk(nav, t.walk_config())
    assert (leaf.left, leaf.right) == (5, 5)
    assert len(moves) == 3


def test_update_example():
    t = build([1, 2, 3, 4])
    t.update(3, 10)
    assert t.values[0] == 17 and t.audit() is None


def test_query_examples():
    t = build(list(range(1, 17)))
    assert t.query(3, 11) == 63
    t.update(4, 100)
    assert t.query(4, 4) == 100


def test_bad_indices():
    t = build([1, 2, 3])
    with pytest.raises(IndexError):
        t.update(4, 1)
    with pytest.raises(IndexError):
        t.query(0, 2)
    with pytest.raises(ValueError):
        t.query(3, 2)


@pytest.mark.parametrize("agg", [SUM, MIN, MAX])
def test_neutral_is_identity(agg):
    f, e = agg
    for x in (-3, 0, 7.5):
        assert f(x, e) == x == f(e, x)


seg_ops = st.lists(st.tuples(st.booleans(), st.integers(0, 10**6), st.integers(0, 10**6),
                             st.integers(-50, 50)), max_size=40)


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=40), seg_ops,
       st.sampled_from([SUM, MIN, MAX]))
def test_noiseless_matches_array(values, ops, agg):
    f, e = agg
    t = SegTree(values, f, e)
    ref = list(values)
    n = len(ref)
    for is_update, a, b, x in ops:
        i, j = sorted((a % n + 1, b % n + 1))
        if is_update:
            t.update(i, x)
            ref[i - 1] = x
            assert t.audit() is None
        else:
            assert t.query(i, j) == fold(f, ref[i - 1:j])
    assert t.array() == ref


def test_parent_border_algebra():
    t = build(list(range(37)))
    for v in range(1, 2 * t.k - 1):
        cur = SegCursor(v, *t.segment(v))
        up = parent_cursor(cur)
        assert up == SegCursor((v - 1) // 2, *t.segment((v - 1) // 2))
    assert parent_cursor(SegCursor(0, 1, t.k)) is None


def test_borders_stay_exact_on_noisy_walks():
    t = SegTree(list(range(100)), cmp=NoisyComparator(0.45, seed=2), epsilon=0.2)
    for i in (1, 50, 100):
        nav = LeafNavigation(t, i, 0.4)
        orig = nav.is_node_correct

        def checked(cur, _orig=orig):
            assert (cur.left, cur.right) == t.segment(cur.node)
            return _orig(cur)

        nav.is_node_correct = checked
        walk(nav, t.walk_config())


def test_padding_never_leaks():
    t = SegTree([5, 9, 2], min, math.inf)
    assert t.query(1, 3) == 2
    t2 = SegTree([-5, -9, -2], max, -math.inf)
    assert t2.query(2, 3) == -2


def test_noisy_locate_rate():
    t = SegTree([0] * 1024, cmp=NoisyComparator(1 / 3, seed=6), epsilon=0.01)
    rng = random.Random(0)
    trials = 2000
    wrong = 0
    for _ in range(trials):
        i = rng.randint(1, 1024)
        leaf = t.locate_leaf(i)
        wrong += (leaf.left, leaf.right) != (i, i)
    assert wrong / trials <= 0.01


def test_call_budget():
    n, eps = 256, 0.01
    t = SegTree(list(range(n)), cmp=NoisyComparator(1 / 3, seed=1), epsilon=eps)
    k = call_budget_constant(1 / 3, epsilon=eps)
    rng = random.Random(4)
    for _ in range(100):
        before = t.cmp.calls
        t.update(rng.randint(1, n), 1)
        assert t.cmp.calls - before <= k * math.log2(n / eps)
