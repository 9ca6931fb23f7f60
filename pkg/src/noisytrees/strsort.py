"""String sorting through a noisy red-black tree keyed by ``(string, index)``."""
from __future__ import annotations

import enum
import random
import statistics
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

from .oracle import IndexedStringComparator, QuantumCostParams, RandomSource, derive_seed
from .rbtree import RBNode, RBTree


class SortVariant(enum.Enum):
    GETMIN = "getmin"
    INORDER = "inorder"


@dataclass
class StringInstance:
    strings: List[str]

    @property
    def n(self) -> int:
        return len(self.strings)

    @property
    def l(self) -> int:
        return len(self.strings[0]) if self.strings else 0

    def validate(self) -> None:
        """Require n >= 1 and a common positive length."""
        if not self.strings:
            raise ValueError("instance has no strings")
        lengths = {len(s) for s in self.strings}
        if len(lengths) != 1 or 0 in lengths:
            raise ValueError(f"strings must share one positive length, got {sorted(lengths)}")

    @classmethod
    def random(cls, n: int, l: int, rng: random.Random, alphabet: str = "ab") -> "StringInstance":
        return cls(["".join(rng.choice(alphabet) for _ in range(l)) for _ in range(n)])


@dataclass
class SortResult:
    permutation: List[int]
    total_cost: int
    comparator_calls: int

    def to_dict(self) -> dict:
        return {"permutation": self.permutation, "total_cost": self.total_cost,
                "comparator_calls": self.comparator_calls}


def exact_sort(strings: Sequence[str]) -> List[int]:
    """Stable lexicographic order with index tie-break."""
    return sorted(range(len(strings)), key=lambda i: (strings[i], i))


def is_permutation(perm: Sequence[int], n: int) -> bool:
    return sorted(perm) == list(range(n))


def inorder_collect(tree: RBTree) -> List[int]:
    out: List[int] = []

    def visit(v: Optional[RBNode]) -> None:
        if v is not None:
            visit(v.left)
            out.append(v.key[1])
            visit(v.right)

    visit(tree.root)
    return out


def default_epsilon(n: int) -> float:
    return 1.0 / (10 * n * n)


def sort_strings(instance, xi: float = 0.1, epsilon: Optional[float] = None,
                 variant: SortVariant = SortVariant.INORDER, seed: int = 0,
                 c: float = 108, per_step_boost: float = 0.1,
                 cost_constant: float = 1.0) -> SortResult:
    strings = instance.strings if isinstance(instance, StringInstance) else list(instance)
    n = len(strings)
    if n < 1:
        raise ValueError("nothing to sort")
    eps = default_epsilon(n) if epsilon is None else epsilon
    eps = min(eps, 0.49)
    cmp = IndexedStringComparator(QuantumCostParams(xi, cost_constant), seed=seed)
    tree = RBTree(cmp, epsilon=eps, c=c, per_step_boost=per_step_boost)
    for i, s in enumerate(strings):
        tree.insert((s, i))
    if SortVariant(variant) is SortVariant.GETMIN:
        perm = [tree.pop_min()[1] for _ in range(n)]
    else:
        perm = inorder_collect(tree)
    return SortResult(perm, cmp.cost, cmp.calls)


@dataclass
class ProbeRun:
    n: int
    l: int
    seed: int
    cost: int
    correct: bool


@dataclass
class ProbeCell:
    n: int
    l: int
    mean_cost: float
    runs: List[ProbeRun] = field(default_factory=list)


def cost_scaling_probe(n_list: Iterable[int], l_list: Iterable[int], xi: float = 0.1,
                       seeds: Iterable[int] = range(20), alphabet: str = "ab",
                       variant: SortVariant = SortVariant.INORDER, **kwargs) -> List[ProbeCell]:
    """Mean sorting cost on random instances for every (n, l) grid cell."""
    cells = []
    seeds = list(seeds)
    for n in n_list:
        for l in l_list:
            runs = []
            for s in seeds:
                sub = derive_seed(s, (n << 20) | l)
                inst = StringInstance.random(n, l, RandomSource(sub), alphabet)
                res = sort_strings(inst, xi=xi, variant=variant, seed=derive_seed(sub, 1), **kwargs)
                runs.append(ProbeRun(n, l, s, res.total_cost,
                                     res.permutation == exact_sort(inst.strings)))
            cells.append(ProbeCell(n, l, statistics.fmean(r.cost for r in runs), runs))
    return cells
