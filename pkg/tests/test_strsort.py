import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from noisytrees.oracle import IndexedStringComparator, QuantumCostParams
from noisytrees.rbtree import RBTree
from noisytrees.strsort import (SortVariant, StringInstance, cost_scaling_probe, exact_sort,
                                inorder_collect, is_permutation, sort_strings)


def test_single_string():
    assert sort_strings(["abc"], xi=0.3).permutation == [0]


def test_exact_example():
    res = sort_strings(["ba", "ab", "ab"], xi=0.0)
    assert res.permutation == [1, 2, 0] == exact_sort(["ba", "ab", "ab"])


def test_inorder_collect_small_cases():
    t = RBTree(IndexedStringComparator(QuantumCostParams(0.0)))
    assert inorder_collect(t) == []
    for i, s in [(0, "c"), (1, "a"), (2, "b")]:
        t.insert((s, i))
    calls = t.cmp.calls
    assert inorder_collect(t) == [1, 2, 0]
    assert t.cmp.calls == calls


@given(st.lists(st.text("abc", min_size=1, max_size=4), min_size=1, max_size=30),
       st.integers(0, 1000))
@settings(max_examples=25)
def test_variants_agree_without_noise(strings, seed):
    a = sort_strings(strings, xi=0.0, variant=SortVariant.GETMIN, seed=seed)
    b = sort_strings(strings, xi=0.0, variant=SortVariant.INORDER, seed=seed)
    assert a.permutation == b.permutation == exact_sort(strings)


def test_output_is_permutation_under_heavy_noise():
    rng = random.Random(1)
    for seed in range(5):
        inst = StringInstance.random(30, 5, rng)
        res = sort_strings(inst, xi=0.3, epsilon=0.2, seed=seed, c=4)
        assert is_permutation(res.permutation, 30)


def test_cost_is_deterministic():
    inst = StringInstance.random(20, 16, random.Random(3))
    runs = [sort_strings(inst, xi=0.1, seed=7) for _ in range(2)]
    assert runs[0] == runs[1]


def test_length_one_cost_floor():
    inst = StringInstance(list("babab"))
    res = sort_strings(inst, xi=0.1, seed=1)
    assert res.total_cost == res.comparator_calls * math.ceil(math.log2(10))


def test_instance_validation():
    StringInstance(["ab", "ba"]).validate()
    with pytest.raises(ValueError):
        StringInstance(["ab", "b"]).validate()
    with pytest.raises(ValueError):
        StringInstance([]).validate()
    # the sorter itself accepts ragged input
    assert sort_strings(["b", "ab", "a"], xi=0.0).permutation == [2, 1, 0]


def test_noisy_sort_success_rate():
    cells = cost_scaling_probe([32], [32], xi=0.1, seeds=range(15))
    runs = cells[0].runs
    assert sum(r.correct for r in runs) / len(runs) >= 2 / 3


def test_probe_shape():
    cells = cost_scaling_probe([8, 16], [4, 8], xi=0.1, seeds=range(3))
    assert [(c.n, c.l) for c in cells] == [(8, 4), (8, 8), (16, 4), (16, 8)]
    assert all(len(c.runs) == 3 for c in cells)
