"""Segment tree whose index comparisons are noisy.

Nodes live in a flat array (children of ``v`` at ``2v+1`` and ``2v+2``); the
array is padded to a power of two with the neutral element. Segment borders
are never stored: a cursor carries ``(left, right)`` and recomputes them on
every move, including moves to the parent.
"""
from __future__ import annotations

import math
import operator
from typing import Any, Callable, List, NamedTuple, Optional, Sequence

from .oracle import EQUAL, GREATER, LESS, NoisyComparator
from .walker import ProcessOrder, WalkConfig, reconstruct_path, run_operation, walk


class SegCursor(NamedTuple):
    node: int
    left: int
    right: int


# common aggregates with their identities
SUM = (operator.add, 0)
MIN = (min, math.inf)
MAX = (max, -math.inf)


def parent_cursor(cur: SegCursor) -> Optional[SegCursor]:
    v, left, right = cur
    if v == 0:
        return None
    if v & 1:
        return SegCursor((v - 1) >> 1, left, 2 * right - left + 1)
    return SegCursor((v - 2) >> 1, 2 * left - right - 1, right)


class LeafNavigation:
    """Walk towards the leaf of index ``i`` (1-based)."""

    def __init__(self, tree: "SegTree", i: int, boost: float, on_process=None):
        self.tree = tree
        self.i = i
        self.boost = boost
        self.on_process = on_process

    def get_root(self) -> SegCursor:
        return SegCursor(0, 1, self.tree.k)

    def parent(self, cur: SegCursor) -> Optional[SegCursor]:
        return parent_cursor(cur)

    def is_node_correct(self, cur: SegCursor) -> bool:
        boosted = self.tree.cmp.boosted
        half = self.boost / 2
        return (boosted(cur.left, self.i, half) is not GREATER
                and boosted(self.i, cur.right, half) is not GREATER)

    def is_target(self, cur: SegCursor) -> bool:
        # internal nodes are structurally not leaves; a leaf has left == right
        if cur.node < self.tree.k - 1:
            return False
        return self.tree.cmp.boosted(cur.left, self.i, self.boost) is EQUAL

    def select_child(self, cur: SegCursor) -> SegCursor:
        v, left, right = cur
        if v >= self.tree.k - 1:
            return cur
        mid = (left + right) // 2
        if self.tree.cmp.boosted(self.i, mid, self.boost) is GREATER:
            return SegCursor(2 * v + 2, mid + 1, right)
        return SegCursor(2 * v + 1, left, mid)

    def process_node(self, cur: SegCursor) -> None:
        if self.on_process is not None:
            self.on_process(cur)


class SegTree:
    def __init__(self, values: Sequence[Any], f: Callable[[Any, Any], Any] = operator.add,
                 neutral: Any = 0, cmp: Optional[NoisyComparator] = None,
                 epsilon: float = 0.01, c: float = 108, per_step_boost: float = 0.1):
        n = len(values)
        if n < 1:
            raise ValueError("segment tree needs at least one element")
        self.n = n
        self.k = 1 << (n - 1).bit_length()
        self.f = f
        self.neutral = neutral
        self.cmp = cmp if cmp is not None else NoisyComparator()
        self.epsilon = epsilon
        self.c = c
        self.per_step_boost = per_step_boost
        k = self.k
        vals: List[Any] = [neutral] * (2 * k - 1)
        vals[k - 1:k - 1 + n] = list(values)
        for v in range(k - 2, -1, -1):
            vals[v] = f(vals[2 * v + 1], vals[2 * v + 2])
        self.values = vals

    @property
    def height(self) -> int:
        return self.k.bit_length() - 1

    def walk_config(self, order: ProcessOrder = ProcessOrder.TOP_DOWN) -> WalkConfig:
        return WalkConfig(epsilon=self.epsilon, c=self.c, per_step_boost=self.per_step_boost,
                          height_hint=self.height, process_order=order)

    def _check_index(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise IndexError(f"index {i} outside 1..{self.n}")

    def leaf_value(self, i: int) -> Any:
        return self.values[self.k - 2 + i]

    def array(self) -> List[Any]:
        return self.values[self.k - 1:self.k - 1 + self.n]

    def locate_leaf(self, i: int) -> SegCursor:
        self._check_index(i)
        return walk(LeafNavigation(self, i, self.per_step_boost), self.walk_config())

    def update(self, i: int, x: Any) -> None:
        self._check_index(i)
        vals, f, k = self.values, self.f, self.k

        def process(cur: SegCursor) -> None:
            v = cur.node
            if v >= k - 1:
                vals[v] = x
            else:
                vals[v] = f(vals[2 * v + 1], vals[2 * v + 2])

        nav = LeafNavigation(self, i, self.per_step_boost, on_process=process)
        run_operation(nav, self.walk_config(ProcessOrder.BOTTOM_UP))

    def query(self, i: int, j: int) -> Any:
        """f(b_i, ..., b_j) from two leaf walks and the canonical cover between them."""
        self._check_index(i)
        self._check_index(j)
        if i > j:
            raise ValueError(f"empty range [{i}, {j}]")
        nav_i = LeafNavigation(self, i, self.per_step_boost)
        path_i = reconstruct_path(nav_i, walk(nav_i, self.walk_config()))
        if i == j:
            path_j = path_i
        else:
            nav_j = LeafNavigation(self, j, self.per_step_boost)
            path_j = reconstruct_path(nav_j, walk(nav_j, self.walk_config()))
        return self._cover(path_i, path_j)

    def _cover(self, path_i: List[SegCursor], path_j: List[SegCursor]) -> Any:
        vals, f = self.values, self.f
        if path_i[-1].left > path_j[-1].left:
            path_i, path_j = path_j, path_i
        leaf_i, leaf_j = path_i[-1], path_j[-1]
        if leaf_i.node == leaf_j.node:
            return vals[leaf_i.node]
        split = 0
        while path_i[split + 1].node == path_j[split + 1].node:
            split += 1
        acc_left = vals[leaf_i.node]
        for t in range(len(path_i) - 1, split + 1, -1):
            v, p = path_i[t].node, path_i[t - 1].node
            if v == 2 * p + 1:
                acc_left = f(acc_left, vals[2 * p + 2])
        acc_right = vals[leaf_j.node]
        for t in range(len(path_j) - 1, split + 1, -1):
            v, p = path_j[t].node, path_j[t - 1].node
            if v == 2 * p + 2:
                acc_right = f(vals[2 * p + 1], acc_right)
        return f(acc_left, acc_right)

    def segment(self, v: int) -> tuple:
        """Exact (left, right) of node v, computed from the root down."""
        depth = (v + 1).bit_length() - 1
        pos = v - ((1 << depth) - 1)
        width = self.k >> depth
        return pos * width + 1, (pos + 1) * width

    def audit(self) -> Optional[str]:
        """Check every stored aggregate against a direct fold of its segment."""
        f, arr = self.f, self.values[self.k - 1:]
        for v in range(2 * self.k - 1):
            left, right = self.segment(v)
            acc = arr[left - 1]
            for x in arr[left:right]:
                acc = f(acc, x)
            if acc != self.values[v]:
                return f"node {v} [{left}, {right}] holds {self.values[v]!r}, expected {acc!r}"
        for x in arr[self.n:]:
            if x != self.neutral:
                return "padding holds a non-neutral value"
        return None


def build(values: Sequence[Any], f: Callable[[Any, Any], Any] = operator.add,
          neutral: Any = 0, **kwargs) -> SegTree:
    return SegTree(values, f, neutral, **kwargs)


def locate_leaf(tree: SegTree, i: int) -> SegCursor:
    return tree.locate_leaf(i)


def update(tree: SegTree, i: int, x: Any) -> None:
    tree.update(i, x)


def query(tree: SegTree, i: int, j: int) -> Any:
    return tree.query(i, j)
