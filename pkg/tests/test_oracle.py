import math
import random

import pytest
from hypothesis import given, strategies as st
from scipy.stats import binom

from noisytrees.oracle import (EQUAL, GREATER, LESS, IndexedStringComparator, NoiseMode,
                               NoiseModel, NoisyComparator, QuantumCostParams,
                               QuantumStringComparator, RandomSource, boosted_compare,
                               compare_exact, derive_seed, majority_error, noisy_compare,
                               plurality, plurality_distribution, plurality_vote,
                               quantum_cost_compare, repetitions_for)


def tail_oracle(k, p):
    # P(at least (k+1)/2 of k votes wrong)
    return binom.sf((k - 1) // 2, k, p)


def test_compare_exact_examples():
    assert compare_exact("abc", "abd") is LESS
    assert compare_exact(5, 5) is EQUAL
    assert compare_exact("b", "abc") is GREATER
    assert -LESS is GREATER and -EQUAL is EQUAL


def test_noiseless_compare_is_exact():
    cmp = NoisyComparator(0.0, seed=3)
    assert all(noisy_compare(cmp, "x", "y") is LESS for _ in range(200))
    assert cmp.calls == 200


def test_noisy_error_rate():
    cmp = NoisyComparator(1 / 3, seed=11)
    n = 100_000
    wrong = sum(cmp.compare("x", "y") is not LESS for _ in range(n))
    assert abs(wrong / n - 1 / 3) <= 0.006


def test_flip_uniform_on_equal_pair():
    cmp = NoisyComparator(1 / 3, mode=NoiseMode.FLIP_UNIFORM, seed=12)
    n = 100_000
    eq = sum(cmp.compare("x", "x") is EQUAL for _ in range(n))
    assert abs(eq / n - 2 / 3) <= 0.01


def test_flip_adjacent_only_reports_equal_when_wrong():
    cmp = NoisyComparator(0.3, mode=NoiseMode.FLIP_ADJACENT, seed=2)
    outs = {cmp.compare(1, 2) for _ in range(2000)}
    assert outs == {LESS, EQUAL}


@pytest.mark.parametrize("p", [-0.1, 0.5, 0.7])
def test_noise_model_rejects_bad_p(p):
    with pytest.raises(ValueError):
        NoiseModel(p)


@given(st.floats(0, 0.49), st.sampled_from([LESS, EQUAL, GREATER]),
       st.sampled_from(list(NoiseMode)))
def test_output_distribution_is_a_law(p, true, mode):
    dist = NoiseModel(p, mode).output_distribution(true)
    assert math.isclose(sum(dist), 1.0)
    assert dist[int(true) + 1] == pytest.approx(1 - p)


def test_repetitions_examples():
    assert repetitions_for(0, 0.1) == 1
    assert repetitions_for(0.1, 0.1) == 1
    assert repetitions_for(1 / 3, 0.1) == 15


@given(st.floats(0.01, 0.45), st.floats(1e-6, 0.4))
def test_repetitions_is_minimal_odd(p, target):
    k = repetitions_for(p, target)
    assert k % 2 == 1
    assert tail_oracle(k, p) <= target * (1 + 1e-9)
    if k > 1:
        assert tail_oracle(k - 2, p) > target * (1 - 1e-9)


@given(st.integers(0, 40).map(lambda m: 2 * m + 1), st.floats(0, 0.49))
def test_majority_error_matches_binomial_tail(k, p):
    assert majority_error(k, p) == pytest.approx(tail_oracle(k, p), abs=1e-12)


@pytest.mark.parametrize("p,target", [(-0.1, 0.1), (0.5, 0.1), (0.2, 0.0), (0.2, 0.5)])
def test_repetitions_rejects(p, target):
    with pytest.raises(ValueError):
        repetitions_for(p, target)


def test_plurality_tie_break():
    assert plurality({LESS: 2, EQUAL: 2, GREATER: 2}) is EQUAL
    assert plurality({LESS: 3, EQUAL: 1, GREATER: 3}) is LESS
    assert plurality({LESS: 1, EQUAL: 1, GREATER: 4}) is GREATER


def test_plurality_distribution_against_enumeration():
    # brute force over all 3^k vote vectors
    import itertools
    dist = (0.5, 0.2, 0.3)
    k = 5
    acc = {LESS: 0.0, EQUAL: 0.0, GREATER: 0.0}
    for votes in itertools.product(range(3), repeat=k):
        w = math.prod(dist[v] for v in votes)
        counts = {o: votes.count(int(o) + 1) for o in (LESS, EQUAL, GREATER)}
        acc[plurality(counts)] += w
    got = plurality_distribution(k, dist)
    assert got == pytest.approx((acc[LESS], acc[EQUAL], acc[GREATER]))


def test_boosted_charges_k_calls():
    cmp = NoisyComparator(1 / 3, seed=1)
    boosted_compare(cmp, "a", "b", 0.1)
    assert cmp.calls == 15
    exact = NoisyComparator(0, seed=1)
    assert exact.boosted("a", "b", 0.1) is LESS and exact.calls == 1


def test_boosted_error_within_target():
    cmp = NoisyComparator(1 / 3, seed=5)
    n = 10_000
    wrong = sum(cmp.boosted("a", "b", 0.1) is not LESS for _ in range(n))
    assert wrong / n <= 0.1 + 4 * math.sqrt(0.1 / n)


def test_sampled_plurality_matches_literal_vote():
    # one-draw sampling and k real calls must agree in distribution
    n, k = 20_000, 9
    fast = NoisyComparator(0.3, seed=8)
    slow = NoisyComparator(0.3, seed=9)
    k_fast = repetitions_for(0.3, 0.12)
    assert k_fast == k
    f = [fast.boosted(1, 2, 0.12) for _ in range(n)]
    s = [plurality_vote(slow, 1, 2, k) for _ in range(n)]
    for o in (LESS, EQUAL, GREATER):
        assert abs(f.count(o) / n - s.count(o) / n) <= 0.015
    assert fast.calls == slow.calls == n * k


def test_seed_determinism():
    a = NoisyComparator(0.3, seed=42)
    b = NoisyComparator(0.3, seed=42)
    ra = [a.boosted(i % 3, 1, 0.1) for i in range(500)]
    rb = [b.boosted(i % 3, 1, 0.1) for i in range(500)]
    assert ra == rb and a.calls == b.calls
    assert derive_seed(7, 3) == derive_seed(7, 3)
    assert len({derive_seed(7, i) for i in range(1000)}) == 1000


def test_quantum_cost_example():
    assert QuantumCostParams(0.1).cost(100) == math.ceil(10 * math.log2(10)) == 34
    r, cost = quantum_cost_compare("a" * 100, "b" * 100, QuantumCostParams(0.1), RandomSource(1))
    assert cost == 34


def test_quantum_zero_error_path():
    r, cost = quantum_cost_compare("aaa", "aaa", QuantumCostParams(0.0), RandomSource(0))
    assert r is EQUAL and cost >= 1


def test_quantum_error_rate():
    rng = RandomSource(4)
    params = QuantumCostParams(0.1)
    n = 100_000
    wrong = sum(quantum_cost_compare("ab", "ba", params, rng)[0] is not LESS for _ in range(n))
    assert abs(wrong / n - 0.1) <= 0.004


@given(st.integers(1, 500), st.integers(1, 500), st.floats(0.001, 0.4), st.floats(0.001, 0.4))
def test_quantum_cost_monotone(m1, m2, xi1, xi2):
    a, b = sorted((m1, m2))
    x_hi, x_lo = sorted((xi1, xi2), reverse=True)
    assert QuantumCostParams(xi1).cost(a) <= QuantumCostParams(xi1).cost(b)
    assert QuantumCostParams(x_hi).cost(a) <= QuantumCostParams(x_lo).cost(a)


def test_quantum_comparator_charges_by_shorter_string():
    cmp = QuantumStringComparator(QuantumCostParams(0.25), seed=0)
    cmp.compare("a" * 9, "b" * 400)
    assert cmp.cost == math.ceil(3 * 2)


def test_indexed_comparator_breaks_ties_exactly():
    cmp = IndexedStringComparator(QuantumCostParams(0.0))
    assert cmp.compare(("ab", 2), ("ab", 5)) is LESS
    assert cmp.boosted(("ab", 5), ("ab", 2), 0.01) is GREATER
    assert cmp.compare(("b", 0), ("a", 9)) is GREATER


def test_quantum_params_validation():
    with pytest.raises(ValueError):
        QuantumCostParams(1.0)
    with pytest.raises(ValueError):
        QuantumCostParams(0.1, cost_constant=0)
