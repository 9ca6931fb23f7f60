"""Seeded Monte Carlo experiments shared by the CLI and the acceptance suite.

Every trial draws its randomness from ``derive_seed(seed, trial)``, so the
results do not depend on how trials are split across worker processes.
"""
from __future__ import annotations

import bisect
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from scipy.stats import binomtest

from .autocomplete import Dictionary, LinearScanOracle
from .oracle import (EQUAL, GREATER, NoisyComparator, QuantumCostParams, QuantumStringComparator,
                     RandomSource, derive_seed, repetitions_for)
from .rbtree import RBTree, complete_tree, rb_violation
from .segtree import SegTree
from .walker import WalkConfig, walk


def wilson_interval(failures: int, trials: int) -> Tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    ci = binomtest(failures, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass
class TrialStats:
    trials: int = 0
    failures: int = 0
    calls: int = 0
    cost: int = 0

    def add(self, other: "TrialStats") -> None:
        self.trials += other.trials
        self.failures += other.failures
        self.calls += other.calls
        self.cost += other.cost

    @property
    def failure_rate(self) -> float:
        return self.failures / self.trials if self.trials else 0.0

    @property
    def wilson(self) -> Tuple[float, float]:
        return wilson_interval(self.failures, self.trials)

    @property
    def mean_calls(self) -> float:
        return self.calls / self.trials if self.trials else 0.0

    def summary(self) -> dict:
        lo, hi = self.wilson
        return {"trials": self.trials, "failures": self.failures,
                "failure_rate": self.failure_rate, "wilson_95_interval": [lo, hi],
                "mean_comparator_calls": self.mean_calls,
                "mean_cost": self.cost / self.trials if self.trials else 0.0}


def run_trials(fn: Callable[..., TrialStats], trials: int, jobs: int = 1, **kwargs) -> TrialStats:
    """Run ``fn(start, stop, **kwargs)`` over trial ranges, optionally in processes."""
    total = TrialStats()
    if jobs <= 1 or trials < 2 * jobs:
        total.add(fn(0, trials, **kwargs))
        return total
    bounds = [trials * w // jobs for w in range(jobs + 1)]
    with ProcessPoolExecutor(jobs) as pool:
        futures = [pool.submit(fn, a, b, **kwargs) for a, b in zip(bounds, bounds[1:]) if a < b]
        for f in futures:
            total.add(f.result())
    return total


# -- walks on a complete tree -------------------------------------------------

def walk_trials(start: int, stop: int, h: int, p: float, epsilon: float, c: float,
                seed: int, per_step_boost: float = 0.1, steps_multiplier: float = 1.0) -> TrialStats:
    tree = complete_tree(h, per_step_boost=per_step_boost)
    n = tree.size
    cfg = WalkConfig(epsilon=epsilon, c=c, per_step_boost=per_step_boost, height_hint=h)
    steps = max(1, math.ceil(cfg.steps * steps_multiplier))
    out = TrialStats()
    for t in range(start, stop):
        rng = RandomSource(derive_seed(seed, t))
        x = rng.randint(1, n)
        tree.cmp = NoisyComparator(p, rng=rng)
        found = walk(tree.navigation(x), cfg, steps)
        out.trials += 1
        out.failures += found.node.key != x
        out.calls += tree.cmp.calls
    return out


def baseline_trials(start: int, stop: int, h: int, p: float, epsilon: float,
                    seed: int) -> TrialStats:
    """Plain descent with one three-way comparison per level, boosted to eps/(h+1)."""
    tree = complete_tree(h)
    n = tree.size
    per_level = epsilon / (h + 1)
    out = TrialStats()
    for t in range(start, stop):
        rng = RandomSource(derive_seed(seed, t))
        x = rng.randint(1, n)
        cmp = NoisyComparator(p, rng=rng)
        v = tree.root
        while True:
            r = cmp.boosted(x, v.key, per_level)
            nxt = v.right if r is GREATER else v.left
            if r is EQUAL or nxt is None:
                break
            v = nxt
        out.trials += 1
        out.failures += v.key != x
        out.calls += cmp.calls
    return out


@dataclass
class CalibrationRow:
    c: float
    failures: int
    trials: int
    mean_calls: float


@dataclass
class BaselineComparison:
    h: int
    epsilon: float
    baseline: TrialStats
    walker: TrialStats
    c: Optional[float]
    grid: List[CalibrationRow] = field(default_factory=list)

    @property
    def ratio(self) -> float:
        return self.baseline.mean_calls / self.walker.mean_calls if self.walker.trials else math.inf

    def summary(self) -> dict:
        return {"h": self.h, "epsilon": self.epsilon, "calibrated_c": self.c,
                "baseline": self.baseline.summary(), "walker": self.walker.summary(),
                "call_ratio": self.ratio, "grid": [asdict(r) for r in self.grid]}


C_GRID = (0.5, 1, 1.5, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 108)


def compare_with_baseline(h: int, p: float, epsilon: float, trials: int, seed: int,
                          c_grid: Sequence[float] = C_GRID, jobs: int = 1) -> BaselineComparison:
    """Baseline vs. the walker at the smallest c whose failures do not exceed the baseline's.

    Both methods see the same targets (paired seeds).
    """
    base = run_trials(baseline_trials, trials, jobs, h=h, p=p, epsilon=epsilon, seed=seed)
    grid = []
    for c in c_grid:
        st = run_trials(walk_trials, trials, jobs, h=h, p=p, epsilon=epsilon, c=c, seed=seed)
        grid.append(CalibrationRow(c, st.failures, st.trials, st.mean_calls))
        if st.failures <= base.failures:
            return BaselineComparison(h, epsilon, base, st, c, grid)
    return BaselineComparison(h, epsilon, base, TrialStats(), None, grid)


# -- red-black tree operations ------------------------------------------------

@dataclass
class OpsOutcome:
    stats: TrialStats
    max_calls_per_op: int = 0
    max_calls_ratio: float = 0.0
    structural_violations: int = 0
    first_violation: Optional[str] = None


def _rebuild(tree: RBTree, keys: Sequence) -> None:
    """Reset ``tree`` to hold exactly ``keys`` without spending noisy calls."""
    noisy = tree.cmp
    tree.cmp = NoisyComparator()
    tree.root, tree.size = None, 0
    for k in keys:
        tree.insert(k)
    tree.cmp = noisy


def rbtree_ops(n: int, ops: int, p: float, epsilon: float, seed: int,
               check_structure: bool = True, universe: int = 10**9) -> OpsOutcome:
    """Random search/insert/remove mix around ``n`` keys, scored against a sorted list.

    An op fails when its answer differs from the oracle's or it leaves the
    key sequence wrong; the tree is then reset to the oracle's keys.
    """
    rng = random.Random(derive_seed(seed, 0))
    keys = sorted(rng.sample(range(universe), n))
    tree = RBTree(NoisyComparator(), epsilon=epsilon)
    _rebuild(tree, keys)
    tree.cmp = NoisyComparator(p, seed=derive_seed(seed, 1))
    out = OpsOutcome(TrialStats())
    for _ in range(ops):
        before = tree.cmp.calls
        u = rng.random()
        if u < 0.3 or not keys:
            kind, x = "insert", rng.randrange(universe)
        elif u < 0.6:
            kind, x = "remove", rng.choice(keys)
        elif u < 0.8:
            kind, x = "search", rng.choice(keys)
        else:
            kind, x = "search", rng.randrange(universe)
        i = bisect.bisect_left(keys, x)
        present = i < len(keys) and keys[i] == x
        if kind == "insert":
            ok = tree.insert(x) == (not present)
            if not present:
                keys.insert(i, x)
        elif kind == "remove":
            ok = tree.remove(x) == present
            if present:
                del keys[i]
        else:
            ok = (tree.search(x) is not None) == present
        if check_structure:
            bad = rb_violation(tree, check_order=False)
            if bad is not None:
                out.structural_violations += 1
                out.first_violation = out.first_violation or bad
        if kind != "search" and ok:
            ok = list(tree) == keys
        used = tree.cmp.calls - before
        out.max_calls_per_op = max(out.max_calls_per_op, used)
        out.max_calls_ratio = max(out.max_calls_ratio, used / math.log2(max(2, len(keys)) / epsilon))
        out.stats.trials += 1
        out.stats.calls += used
        if not ok:
            out.stats.failures += 1
            _rebuild(tree, keys)
    return out


def call_budget_constant(p: float, c: float = 108, per_step_boost: float = 0.1,
                         epsilon: float = 0.01) -> float:
    """K with calls per op <= K·log2(n/eps) for walks with budget c·(h + log2(1/eps)).

    A step consults at most two bound checks at boost/2 and two predicates at
    boost; the height bound 2·log2(n+1) and the final checks at eps account for
    the remaining factor.
    """
    step = 2 * repetitions_for(p, per_step_boost / 2) + 2 * repetitions_for(p, per_step_boost) if p else 4
    final = 3 * repetitions_for(p, epsilon / 3) if p else 3
    return 2 * c * step + final


# -- segment tree --------------------------------------------------------------

@dataclass
class SegOutcome:
    updates: TrialStats
    queries: TrialStats


def segtree_trials(n: int, trials: int, p: float, epsilon: float, seed: int,
                   max_value: int = 1000) -> SegOutcome:
    """``trials`` single updates and ``trials`` range-sum queries against a plain list."""
    rng = random.Random(derive_seed(seed, 0))
    arr = [rng.randrange(max_value) for _ in range(n)]
    cmp = NoisyComparator(p, seed=derive_seed(seed, 1))
    tree = SegTree(arr, cmp=cmp, epsilon=epsilon)
    upd, qry = TrialStats(), TrialStats()
    for _ in range(trials):
        i, x = rng.randint(1, n), rng.randrange(max_value)
        before = cmp.calls
        tree.update(i, x)
        arr[i - 1] = x
        upd.trials += 1
        upd.calls += cmp.calls - before
        if tree.array() != arr or tree.values[0] != sum(arr) or tree.audit() is not None:
            upd.failures += 1
            tree = SegTree(arr, cmp=cmp, epsilon=epsilon)
    prefix = [0]
    for v in arr:
        prefix.append(prefix[-1] + v)
    for _ in range(trials):
        i, j = sorted((rng.randint(1, n), rng.randint(1, n)))
        before = cmp.calls
        got = tree.query(i, j)
        qry.trials += 1
        qry.calls += cmp.calls - before
        qry.failures += got != prefix[j] - prefix[i - 1]
    return SegOutcome(upd, qry)


# -- auto-complete -------------------------------------------------------------

def autocomplete_trials(strings: int, queries: int, xi: float, epsilon: float, seed: int,
                        alphabet: str = "abcd", max_len: int = 6) -> TrialStats:
    """Fill a dictionary with ``strings`` adds, then score ``queries`` prefix queries."""
    rng = random.Random(derive_seed(seed, 0))
    cmp = QuantumStringComparator(QuantumCostParams(xi), seed=derive_seed(seed, 1))
    d = Dictionary(cmp, epsilon=epsilon, alphabet=alphabet)
    ref = LinearScanOracle()

    def word(lo: int, hi: int) -> str:
        return "".join(rng.choice(alphabet) for _ in range(rng.randint(lo, hi)))

    for _ in range(strings):
        s = word(1, max_len)
        d.add_string(s)
        ref.add_string(s)
    out = TrialStats()
    for _ in range(queries):
        t = word(1, 3)
        before_calls, before_cost = cmp.calls, cmp.cost
        got = d.query_complement(t)
        out.trials += 1
        out.failures += got != ref.query_complement(t)
        out.calls += cmp.calls - before_calls
        out.cost += cmp.cost - before_cost
    return out

