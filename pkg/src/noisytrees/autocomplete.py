"""Most-frequent-completion dictionary on a noisy red-black tree.

Every node stores ``(i, c, j, jc)``: the index of its string (the query number
that first added it), that string's frequency, and the index/frequency of
the most frequent string in its subtree. Higher frequency wins; among equal
frequencies the smaller index wins.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

from .oracle import EQUAL, GREATER, LESS, NoisyComparator, QuantumCostParams, QuantumStringComparator
from .rbtree import NEG_INF, POS_INF, Frame, RBNode, RBTree, _Sentinel, frame_path
from .walker import walk

Bound = Union[str, _Sentinel]


class AutoNode(RBNode):
    __slots__ = ("i", "c", "j", "jc")

    def __init__(self, key, red=True):
        super().__init__(key, red)
        self.i = self.j = 0
        self.c = self.jc = 0


@dataclass
class QueryAnswer:
    mi: int = 0
    md: int = 0
    found: bool = False

    def to_dict(self, query_no: int) -> dict:
        if not self.found:
            return {"query_no": query_no, "found": False}
        return {"query_no": query_no, "mi": self.mi, "md": self.md}


def _beats(c1: int, i1: int, c2: int, i2: int) -> bool:
    return c1 > c2 or (c1 == c2 and i1 < i2)


def prefix_successor(t: str, alphabet: Optional[str] = None) -> Optional[str]:
    """Least string above every string with prefix ``t``; None stands for +inf.

    ``alphabet`` must be sorted; by default every code point is a symbol.
    """
    if not t:
        raise ValueError("prefix must be non-empty")
    if alphabet is None:
        top = chr(sys.maxunicode)
        chars = list(t)
        while chars and chars[-1] == top:
            chars.pop()
        if not chars:
            return None
        chars[-1] = chr(ord(chars[-1]) + 1)
        return "".join(chars)
    rank = {ch: r for r, ch in enumerate(alphabet)}
    chars = list(t)
    while chars and rank[chars[-1]] == len(alphabet) - 1:
        chars.pop()
    if not chars:
        return None
    chars[-1] = alphabet[rank[chars[-1]] + 1]
    return "".join(chars)


class _SplitNavigation:
    """Find the highest node whose string lies in [t, t')."""

    def __init__(self, tree: "Dictionary", t: str, t_next: Bound, boost: float):
        self.tree = tree
        self.t = t
        self.t_next = t_next
        self.boost = boost

    def get_root(self) -> Frame:
        return Frame(self.tree.root, NEG_INF, POS_INF, None)

    def parent(self, f: Frame) -> Optional[Frame]:
        return f.up

    def _all(self, pairs, target: float, strict: Tuple[bool, ...]) -> bool:
        ordf = self.tree._ord
        noisy = sum(not (isinstance(a, _Sentinel) or isinstance(b, _Sentinel)) for a, b in pairs)
        t = target / max(1, noisy)
        for (a, b), s in zip(pairs, strict):
            r = ordf(a, b, t)
            if r is GREATER or (s and r is EQUAL):
                return False
        return True

    def is_node_correct(self, f: Frame) -> bool:
        return self._all(((f.lo, self.t), (self.t_next, f.hi)), self.boost, (False, False))

    def check(self, f: Frame, target: float) -> bool:
        key = f.node.key
        return self._all(((self.t, key), (key, self.t_next), (f.lo, self.t), (self.t_next, f.hi)),
                         target, (False, True, False, False))

    def is_target(self, f: Frame) -> bool:
        return self.check(f, self.boost)

    def select_child(self, f: Frame) -> Frame:
        node = f.node
        if self.tree._ord(self.t, node.key, self.boost) is GREATER:
            if node.right is not None:
                return Frame(node.right, node.key, f.hi, f)
        elif node.left is not None:
            return Frame(node.left, f.lo, node.key, f)
        return f

    def process_node(self, f: Frame) -> None:
        pass


class Dictionary(RBTree):
    node_class = AutoNode
    augmented = True

    def __init__(self, cmp: Optional[NoisyComparator] = None, epsilon: float = 0.01,
                 c: float = 108, per_step_boost: float = 0.1, alphabet: Optional[str] = None):
        super().__init__(cmp if cmp is not None else QuantumStringComparator(QuantumCostParams(0.0)),
                         epsilon=epsilon, c=c, per_step_boost=per_step_boost)
        self.alphabet = alphabet
        self.r = 0
        self.strings: Dict[int, str] = {}

    # -- augmentation -------------------------------------------------------

    def _init_node(self, node: AutoNode) -> None:
        node.i = node.j = self.r
        node.c = node.jc = 1
        self.strings[self.r] = node.key

    def _pull(self, node: AutoNode) -> None:
        j, jc = node.i, node.c
        for ch in (node.left, node.right):
            if ch is not None and _beats(ch.jc, ch.j, jc, j):
                j, jc = ch.j, ch.jc
        node.j, node.jc = j, jc

    # -- queries ------------------------------------------------------------

    def add_string(self, s: str) -> None:
        self.r += 1
        node = self.search(s) if self.root is not None else None
        if node is None:
            node, inserted = self.insert_node(s)
            if inserted:
                return
        self._bump(node)

    def _bump(self, v: AutoNode) -> None:
        v.c += 1
        c, i = v.c, v.i
        while v is not None:
            if v.jc < c or (v.jc == c and v.j >= i):
                v.jc, v.j = c, i
            v = v.parent

    def query_complement(self, t: str) -> QueryAnswer:
        self.r += 1
        if self.root is None:
            return QueryAnswer()
        nxt = prefix_successor(t, self.alphabet)
        t_next = POS_INF if nxt is None else nxt
        cfg = self.walk_config()
        nav = _SplitNavigation(self, t, t_next, self.per_step_boost)
        top = walk(nav, cfg)
        if not nav.check(top, self.epsilon):
            return QueryAnswer()
        v = top.node
        best_c, best_i = v.c, v.i

        def offer(c: int, i: int) -> None:
            nonlocal best_c, best_i
            if _beats(c, i, best_c, best_i):
                best_c, best_i = c, i

        # strings >= t in the left subtree
        if v.left is not None:
            start = Frame(v.left, top.lo, v.key, None)
            path = frame_path(walk(self.navigation(t, attach=True, root=start), cfg))
            for f, nxt_f in zip(path, path[1:]):
                if nxt_f.node is f.node.left:
                    self._offer_with(f.node, f.node.right, offer)
            last = path[-1].node
            if self._ord(t, last.key, self.epsilon) is not GREATER:
                self._offer_with(last, last.right, offer)
        # strings < t' in the right subtree
        if v.right is not None:
            # t' equal to the inherited upper bound puts the whole subtree below t'
            if t_next is POS_INF or self._ord(t_next, top.hi, self.epsilon) is EQUAL:
                offer(v.right.jc, v.right.j)
            else:
                start = Frame(v.right, v.key, top.hi, None)
                path = frame_path(walk(self.navigation(t_next, attach=True, root=start), cfg))
                for f, nxt_f in zip(path, path[1:]):
                    if nxt_f.node is f.node.right:
                        self._offer_with(f.node, f.node.left, offer)
                last = path[-1].node
                r = self._ord(last.key, t_next, self.epsilon)
                if r is LESS:
                    self._offer_with(last, last.left, offer)
                elif r is EQUAL and last.left is not None:
                    offer(last.left.jc, last.left.j)
        return QueryAnswer(best_i, best_c, True)

    @staticmethod
    def _offer_with(node: AutoNode, sub: Optional[AutoNode], offer) -> None:
        offer(node.c, node.i)
        if sub is not None:
            offer(sub.jc, sub.j)

    def frequency(self) -> Dict[str, Tuple[int, int]]:
        """string -> (first index, count), read straight off the nodes."""
        return {n.key: (n.i, n.c) for n in self.nodes()}


def augmentation_violation(d: Dictionary) -> Optional[str]:
    """Compare every (j, jc) with a brute-force subtree maximum."""

    def best(node: Optional[AutoNode]):
        if node is None:
            return None
        cand = [(node.c, node.i)]
        for ch in (node.left, node.right):
            b = best(ch)
            if b is not None:
                cand.append(b)
        c, i = min(cand, key=lambda ci: (-ci[0], ci[1]))
        if (node.jc, node.j) != (c, i):
            raise AssertionError(f"node {node.key!r} stores (j={node.j}, jc={node.jc}), "
                                 f"subtree best is (j={i}, jc={c})")
        return c, i

    try:
        best(d.root)
    except AssertionError as e:
        return str(e)
    return None


class LinearScanOracle:
    """Reference answers by scanning every stored string."""

    def __init__(self):
        self.r = 0
        self.first: Dict[str, int] = {}
        self.count: Dict[str, int] = {}

    def add_string(self, s: str) -> None:
        self.r += 1
        self.first.setdefault(s, self.r)
        self.count[s] = self.count.get(s, 0) + 1

    def query_complement(self, t: str) -> QueryAnswer:
        self.r += 1
        cands = [(-self.count[s], self.first[s]) for s in self.first if s.startswith(t)]
        if not cands:
            return QueryAnswer()
        c, i = min(cands)
        return QueryAnswer(i, -c, True)


def add_string(d: Dictionary, s: str) -> None:
    d.add_string(s)


def query_complement(d: Dictionary, t: str) -> QueryAnswer:
    return d.query_complement(t)


def run_script(d, lines: List[str]):
    """Apply ``ADD s`` / ``QUERY t`` lines; yields (query_no, answer) for queries."""
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        op, _, arg = line.partition(" ")
        if op == "ADD" and arg:
            d.add_string(arg)
        elif op == "QUERY" and arg:
            yield d.r + 1, d.query_complement(arg)
        else:
            raise ValueError(f"line {lineno}: expected 'ADD <string>' or 'QUERY <prefix>', got {line!r}")
