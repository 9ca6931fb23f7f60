import bisect
import math
import random

import pytest
from hypothesis import given, strategies as st

from noisytrees.experiments import call_budget_constant, rbtree_ops
from noisytrees.oracle import NoisyComparator, compare_exact
from noisytrees.rbtree import (NEG_INF, POS_INF, RBNode, RBTree, check_rb_invariants,
                               complete_tree, frame_path, rb_violation)


def exact_tree(keys=(), **kw):
    t = RBTree(NoisyComparator(0.0), **kw)
    for k in keys:
        t.insert(k)
    return t


def test_empty_tree():
    t = exact_tree()
    assert t.search(3) is None
    assert not t.remove(3)
    assert check_rb_invariants(t)


def test_first_insert_makes_black_root_without_calls():
    t = exact_tree()
    assert t.insert(10)
    assert t.root.key == 10 and not t.root.red and len(t) == 1
    assert t.cmp.calls == 0


def test_red_root_is_invalid():
    t = exact_tree()
    t.root = RBNode(1, red=True)
    t.size = 1
    assert not check_rb_invariants(t)
    assert "root is red" in rb_violation(t)


def test_duplicate_rejected():
    t = exact_tree([5, 3, 8])
    assert not t.insert(3)
    assert len(t) == 3


def test_noiseless_search_on_1023_keys():
    keys = random.Random(0).sample(range(0, 10**6, 2), 1023)
    t = exact_tree(keys)
    assert all(t.search(k).key == k for k in keys)
    absent = random.Random(1).sample(range(1, 10**6, 2), 1000)
    assert all(t.search(k) is None for k in absent)


def test_sorted_inserts_keep_height_bounded():
    n = 1000
    t = exact_tree(range(n))
    assert check_rb_invariants(t)
    assert t.height() <= 2 * math.log2(n + 1)
    assert list(t) == list(range(n))


def test_insert_then_remove_everything():
    keys = random.Random(5).sample(range(10**5), 300)
    t = exact_tree(keys)
    for k in random.Random(6).sample(keys, len(keys)):
        assert t.remove(k)
        assert check_rb_invariants(t)
    assert t.root is None and len(t) == 0


ops = st.lists(st.tuples(st.sampled_from(["insert", "remove", "search"]), st.integers(0, 60)),
               max_size=120)


@given(ops)
def test_noiseless_matches_sorted_set(seq):
    t = exact_tree()
    ref = set()
    for op, x in seq:
        if op == "insert":
            assert t.insert(x) == (x not in ref)
            ref.add(x)
        elif op == "remove":
            assert t.remove(x) == (x in ref)
            ref.discard(x)
        else:
            assert (t.search(x) is not None) == (x in ref)
        assert rb_violation(t) is None
    assert list(t) == sorted(ref)


def test_rebalancing_makes_no_comparisons():
    t = RBTree(NoisyComparator(0.2, seed=3))
    seen = []
    for name in ("_insert_fixup", "_delete_fixup", "_rotate_left", "_rotate_right"):
        orig = getattr(t, name)

        def wrapped(*a, _orig=orig, **k):
            before = t.cmp.calls
            out = _orig(*a, **k)
            seen.append(t.cmp.calls - before)
            return out

        setattr(t, name, wrapped)
    for k in range(200):
        t.insert(k)
    for k in range(0, 200, 3):
        t.remove(k)
    assert seen and set(seen) == {0}


def test_pop_min_is_comparison_free():
    t = exact_tree([4, 1, 3, 2])
    before = t.cmp.calls
    assert [t.pop_min() for _ in range(4)] == [1, 2, 3, 4]
    assert t.cmp.calls == before


def test_frames_keep_strict_bounds():
    t = complete_tree(7, NoisyComparator(1 / 3, seed=4), epsilon=0.05)

    def below(a, b):
        if a is NEG_INF or b is POS_INF:
            return True
        if a is POS_INF or b is NEG_INF:
            return False
        return compare_exact(a, b) < 0

    for x in (1, 77, 128, 255):
        nav = t.navigation(x)
        orig = nav.is_node_correct

        def checked(f, _orig=orig):
            for g in frame_path(f):
                assert below(g.lo, g.hi)
                assert below(g.lo, g.node.key) and below(g.node.key, g.hi)
            return _orig(f)

        nav.is_node_correct = checked
        from noisytrees.walker import walk
        walk(nav, t.walk_config())


def test_height_bound_covers_height():
    for seed in range(5):
        t = exact_tree(random.Random(seed).sample(range(10**4), 500))
        assert t.height() <= t.height_bound()


def test_noisy_search_rate():
    n = 1023
    t = complete_tree(9, NoisyComparator(1 / 3, seed=9), epsilon=0.01)
    rng = random.Random(2)
    trials = 2000
    fails = 0
    for _ in range(trials):
        x = rng.randint(1, n)
        node = t.search(x)
        fails += node is None or node.key != x
    assert fails / trials <= 0.02


def test_noisy_remove_rate():
    rng = random.Random(3)
    fails = 0
    trials = 400
    base = rng.sample(range(10**6), 200)
    t = exact_tree(base, epsilon=0.01)
    t.cmp = NoisyComparator(1 / 3, seed=8)
    keys = sorted(base)
    for _ in range(trials):
        x = rng.choice(keys)
        if t.remove(x):
            keys.remove(x)
        else:
            fails += 1
        y = rng.randrange(10**6)
        if t.insert(y):
            bisect.insort(keys, y)
    assert fails / trials <= 0.02
    assert rb_violation(t, check_order=False) is None


def test_noisy_build_is_ordered():
    good = 0
    runs = 20
    for seed in range(runs):
        n = 128
        t = RBTree(NoisyComparator(1 / 3, seed=seed), epsilon=1 / n**2)
        for k in random.Random(100 + seed).sample(range(10**6), n):
            t.insert(k)
        assert rb_violation(t, check_order=False) is None
        good += rb_violation(t) is None
    assert good / runs >= 0.95


def test_call_budget_per_operation():
    out = rbtree_ops(n=128, ops=150, p=1 / 3, epsilon=1 / 128**2, seed=5)
    k = call_budget_constant(1 / 3, epsilon=1 / 128**2)
    assert out.max_calls_ratio <= k
    assert out.structural_violations == 0
