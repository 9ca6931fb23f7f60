"""Three-way comparators with injected noise, repetition boosting and a
classical stand-in for the quantum string comparator's cost model."""
from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np


class Ordering3(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1

    def __neg__(self) -> "Ordering3":
        return Ordering3(-int(self))


LESS = Ordering3.LESS
EQUAL = Ordering3.EQUAL
GREATER = Ordering3.GREATER

# plurality tie-break priority
_PRIORITY = (EQUAL, LESS, GREATER)


def compare_exact(a: Any, b: Any) -> Ordering3:
    if a < b:
        return LESS
    if b < a:
        return GREATER
    return EQUAL


class RandomSource(random.Random):
    """Seeded generator; the same seed always replays the same draws."""

    def __init__(self, seed: int = 0):
        self.seed_value = int(seed) & 0xFFFFFFFFFFFFFFFF
        super().__init__(self.seed_value)


def derive_seed(seed: int, index: int) -> int:
    """Independent 64-bit seed for trial ``index`` of a run seeded with ``seed``."""
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(int(index),))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return (int(hi) << 32) | int(lo)


class NoiseMode(enum.Enum):
    FLIP_UNIFORM = "uniform"
    FLIP_ADJACENT = "adjacent"


@dataclass(frozen=True)
class NoiseModel:
    p: float = 0.0
    mode: NoiseMode = NoiseMode.FLIP_UNIFORM

    def __post_init__(self):
        if not 0.0 <= self.p < 0.5:
            raise ValueError(f"error rate must lie in [0, 0.5), got {self.p}")

    def output_distribution(self, true: Ordering3) -> Tuple[float, float, float]:
        """Probabilities of a single noisy call answering (LESS, EQUAL, GREATER)."""
        p = self.p
        dist = {LESS: 0.0, EQUAL: 0.0, GREATER: 0.0}
        dist[true] = 1.0 - p
        if self.mode is NoiseMode.FLIP_UNIFORM or true is EQUAL:
            for o in (LESS, EQUAL, GREATER):
                if o is not true:
                    dist[o] += p / 2
        else:
            dist[EQUAL] += p
        return dist[LESS], dist[EQUAL], dist[GREATER]


def majority_error(k: int, p: float) -> float:
    """P(Binomial(k, p) >= ceil(k/2)), the chance a k-fold majority is wrong."""
    need = (k + 1) // 2
    if p == 0.0:
        return 0.0
    return math.fsum(math.exp(_log_comb(k, j) + j * math.log(p) + (k - j) * math.log1p(-p))
                     for j in range(need, k + 1))


def _log_comb(n: int, r: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1)


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


@lru_cache(maxsize=None)
def repetitions_for(p: float, target: float) -> int:
    """Smallest odd k whose majority vote errs with probability <= target."""
    if not 0.0 <= p < 0.5:
        raise ValueError(f"majority voting needs p < 0.5, got {p}")
    if not 0.0 < target < 0.5:
        raise ValueError(f"target error must lie in (0, 0.5), got {target}")
    k = 1
    while majority_error(k, p) > target * (1 + 1e-12):
        k += 2
    return k


def plurality(votes: Dict[Ordering3, int]) -> Ordering3:
    best = None
    for o in _PRIORITY:
        if best is None or votes.get(o, 0) > votes.get(best, 0):
            best = o
    return best


@lru_cache(maxsize=None)
def plurality_distribution(k: int, dist: Tuple[float, float, float]) -> Tuple[float, float, float]:
    """Exact law of the plurality of k i.i.d. votes with per-vote law ``dist``.

    Ties go to EQUAL, then LESS, then GREATER.
    """
    ll, le, lg = (_log(x) for x in dist)
    out = {LESS: 0.0, EQUAL: 0.0, GREATER: 0.0}
    for a in range(k + 1):
        if a and ll == -math.inf:
            break
        ca = _log_comb(k, a) + (a * ll if a else 0.0)
        for b in range(k - a + 1):
            g = k - a - b
            if (b and le == -math.inf) or (g and lg == -math.inf):
                continue
            w = math.exp(ca + _log_comb(k - a, b) + (b * le if b else 0.0) + (g * lg if g else 0.0))
            out[plurality({LESS: a, EQUAL: b, GREATER: g})] += w
    return out[LESS], out[EQUAL], out[GREATER]


class NoisyComparator:
    """Exact comparator behind an error-injection model.

    ``compare`` is a single noisy call. ``boosted`` stands for ``k`` such calls
    followed by a plurality vote; it draws the vote's outcome in one step from
    its exact distribution and charges all ``k`` calls.
    """

    def __init__(self, p: float = 0.0, mode: NoiseMode = NoiseMode.FLIP_UNIFORM,
                 seed: int = 0, rng: Optional[random.Random] = None,
                 exact: Callable[[Any, Any], Ordering3] = compare_exact):
        self.noise = NoiseModel(p, mode)
        self.rng = rng if rng is not None else RandomSource(seed)
        self.exact = exact
        self.calls = 0
        self.cost = 0
        self._plans: Dict[float, Tuple[int, Optional[dict]]] = {}

    @property
    def p(self) -> float:
        return self.noise.p

    def unit_cost(self, a: Any, b: Any) -> int:
        return 1

    def _flip(self, true: Ordering3) -> Ordering3:
        rng = self.rng
        if self.noise.mode is NoiseMode.FLIP_ADJACENT and true is not EQUAL:
            return EQUAL
        wrong = [o for o in (LESS, EQUAL, GREATER) if o is not true]
        return wrong[rng.random() < 0.5]

    def compare(self, a: Any, b: Any) -> Ordering3:
        true = self.exact(a, b)
        self.calls += 1
        self.cost += self.unit_cost(a, b)
        if self.noise.p and self.rng.random() < self.noise.p:
            return self._flip(true)
        return true

    def _plan(self, target: float):
        k = repetitions_for(self.noise.p, target)
        table = None
        if self.noise.p:
            table = {}
            for true in (LESS, EQUAL, GREATER):
                pl, pe, _ = plurality_distribution(k, self.noise.output_distribution(true))
                table[true] = (pl, pl + pe)
        plan = self._plans[target] = (k, table)
        return plan

    def boosted(self, a: Any, b: Any, target: float) -> Ordering3:
        true = self.exact(a, b)
        plan = self._plans.get(target)
        if plan is None:
            plan = self._plan(target)
        k, table = plan
        self.calls += k
        self.cost += k * self.unit_cost(a, b)
        if table is None:
            return true
        lo, mid = table[true]
        u = self.rng.random()
        if u < lo:
            return LESS
        if u < mid:
            return EQUAL
        return GREATER


def noisy_compare(cmp: NoisyComparator, a: Any, b: Any) -> Ordering3:
    return cmp.compare(a, b)


def boosted_compare(cmp: NoisyComparator, a: Any, b: Any, target: float) -> Ordering3:
    return cmp.boosted(a, b, target)


def plurality_vote(cmp: NoisyComparator, a: Any, b: Any, k: int) -> Ordering3:
    """Literal k-call plurality vote, one noisy call at a time."""
    votes = {LESS: 0, EQUAL: 0, GREATER: 0}
    for _ in range(k):
        votes[cmp.compare(a, b)] += 1
    return plurality(votes)


@dataclass(frozen=True)
class QuantumCostParams:
    xi: float = 0.1
    cost_constant: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.xi < 1.0:
            raise ValueError(f"xi must lie in [0, 1), got {self.xi}")
        if self.cost_constant <= 0:
            raise ValueError("cost_constant must be positive")

    def cost(self, m: int) -> int:
        """Charge for comparing strings whose shorter one has length m."""
        return _quantum_cost(m, self.xi, self.cost_constant)


@lru_cache(maxsize=4096)
def _quantum_cost(m: int, xi: float, cost_constant: float) -> int:
    # xi == 0 is the exact path; it is charged with a unit log factor
    log_term = math.log2(1.0 / xi) if xi > 0 else 1.0
    return max(1, math.ceil(cost_constant * math.sqrt(m) * log_term))


class QuantumStringComparator(NoisyComparator):
    """String comparator with error xi and sqrt(min length)·log(1/xi) cost per call."""

    def __init__(self, params: QuantumCostParams = QuantumCostParams(), seed: int = 0,
                 rng: Optional[random.Random] = None,
                 mode: NoiseMode = NoiseMode.FLIP_UNIFORM):
        super().__init__(params.xi, mode, seed=seed, rng=rng)
        self.params = params

    def unit_cost(self, a: str, b: str) -> int:
        return _quantum_cost(min(len(a), len(b)), self.params.xi, self.params.cost_constant)


def quantum_cost_compare(s: str, t: str, params: QuantumCostParams,
                         rng: random.Random) -> Tuple[Ordering3, int]:
    true = compare_exact(s, t)
    cost = params.cost(min(len(s), len(t)))
    if params.xi and rng.random() < params.xi:
        wrong = [o for o in (LESS, EQUAL, GREATER) if o is not true]
        return wrong[rng.random() < 0.5], cost
    return true, cost


class IndexedStringComparator(QuantumStringComparator):
    """Orders ``(string, index)`` keys: noisy string part, exact index tie-break."""

    def compare(self, a, b):
        r = QuantumStringComparator.compare(self, a[0], b[0])
        return r if r is not EQUAL else compare_exact(a[1], b[1])

    def boosted(self, a, b, target):
        r = QuantumStringComparator.boosted(self, a[0], b[0], target)
        return r if r is not EQUAL else compare_exact(a[1], b[1])

