"""Red-black tree whose key comparisons go through a noisy comparator.

Search, insert and remove locate their node with the walking-tree engine.
Rebalancing only touches links and colours, so it never compares keys.
"""
from __future__ import annotations

from typing import Any, Iterator, List, Optional, Tuple

from .oracle import EQUAL, GREATER, LESS, NoisyComparator, Ordering3, compare_exact
from .walker import WalkConfig, reconstruct_path, walk


class _Sentinel:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __repr__(self):
        return self.name


NEG_INF = _Sentinel("-inf")
POS_INF = _Sentinel("+inf")

MAX_INSERT_ATTEMPTS = 16


class RBNode:
    __slots__ = ("key", "red", "left", "right", "parent")

    def __init__(self, key: Any, red: bool = True):
        self.key = key
        self.red = red
        self.left: Optional[RBNode] = None
        self.right: Optional[RBNode] = None
        self.parent: Optional[RBNode] = None

    @property
    def color(self) -> str:
        return "red" if self.red else "black"

    def __repr__(self):
        return f"RBNode({self.key!r}, {self.color})"


class Frame:
    """Walk position: a node plus the key bounds inherited from its ancestors.

    Frames form a linked stack through ``up``; moving down pushes a frame,
    moving up pops one, so bounds are never stored on nodes.
    """

    __slots__ = ("node", "lo", "hi", "up")

    def __init__(self, node: RBNode, lo: Any, hi: Any, up: Optional["Frame"]):
        self.node = node
        self.lo = lo
        self.hi = hi
        self.up = up


class SearchNavigation:
    """Navigation towards key ``x``.

    With ``attach=True`` the target is the node whose child slot on ``x``'s
    side is empty (an insertion point) or a node holding ``x``.
    """

    def __init__(self, tree: "RBTree", x: Any, boost: float, attach: bool = False,
                 root: Optional[Frame] = None):
        self.tree = tree
        self.x = x
        self.boost = boost
        self.attach = attach
        self.root = root

    def get_root(self) -> Frame:
        if self.root is not None:
            return self.root
        return Frame(self.tree.root, NEG_INF, POS_INF, None)

    def parent(self, f: Frame) -> Optional[Frame]:
        return f.up

    def is_node_correct(self, f: Frame) -> bool:
        lo, hi, x = f.lo, f.hi, self.x
        cmp = self.tree.cmp
        if lo is NEG_INF:
            if hi is POS_INF:
                return True
            return cmp.boosted(x, hi, self.boost) is LESS
        if hi is POS_INF:
            return cmp.boosted(lo, x, self.boost) is LESS
        half = self.boost / 2
        return cmp.boosted(lo, x, half) is LESS and cmp.boosted(x, hi, half) is LESS

    def is_target(self, f: Frame) -> bool:
        if self.attach:
            return self.attach_side(f, self.boost) is not None
        return self.tree.cmp.boosted(self.x, f.node.key, self.boost) is EQUAL

    def attach_side(self, f: Frame, target: float) -> Optional[Ordering3]:
        """EQUAL if ``f`` holds ``x``; the side of an empty slot that must receive
        ``x`` (bounds included); None if ``f`` is not the insertion point."""
        node, lo, hi, x = f.node, f.lo, f.hi, self.x
        cmp = self.tree.cmp
        t = target / (1 + (lo is not NEG_INF) + (hi is not POS_INF))
        r = cmp.boosted(x, node.key, t)
        if r is EQUAL:
            return r
        if (node.left if r is LESS else node.right) is not None:
            return None
        if lo is not NEG_INF and cmp.boosted(lo, x, t) is not LESS:
            return None
        if hi is not POS_INF and cmp.boosted(x, hi, t) is not LESS:
            return None
        return r

    def select_child(self, f: Frame) -> Frame:
        node = f.node
        r = self.tree.cmp.boosted(self.x, node.key, self.boost)
        if r is LESS:
            if node.left is not None:
                return Frame(node.left, f.lo, node.key, f)
        elif r is GREATER:
            if node.right is not None:
                return Frame(node.right, node.key, f.hi, f)
        return f

    def process_node(self, f: Frame) -> None:
        pass


class RBTree:
    node_class = RBNode
    augmented = False

    def __init__(self, cmp: Optional[NoisyComparator] = None, epsilon: float = 0.01,
                 c: float = 108, per_step_boost: float = 0.1):
        self.root: Optional[RBNode] = None
        self.cmp = cmp if cmp is not None else NoisyComparator()
        self.size = 0
        self.epsilon = epsilon
        self.c = c
        self.per_step_boost = per_step_boost

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[Any]:
        for node in self.nodes():
            yield node.key

    def nodes(self) -> Iterator[RBNode]:
        stack: List[RBNode] = []
        node = self.root
        while stack or node is not None:
            while node is not None:
                stack.append(node)
                node = node.left
            node = stack.pop()
            yield node
            node = node.right

    def height(self) -> int:
        """Edges on the longest root-to-node path (exact, O(n))."""
        if self.root is None:
            return 0
        best = 0
        stack = [(self.root, 0)]
        while stack:
            node, d = stack.pop()
            best = max(best, d)
            for ch in (node.left, node.right):
                if ch is not None:
                    stack.append((ch, d + 1))
        return best

    def height_bound(self) -> int:
        """2 * black height of the left spine; bounds the depth of every node."""
        bh = 0
        node = self.root
        while node is not None:
            bh += not node.red
            node = node.left
        return 2 * bh

    def walk_config(self) -> WalkConfig:
        return WalkConfig(epsilon=self.epsilon, c=self.c, per_step_boost=self.per_step_boost,
                          height_hint=self.height_bound())

    def _ord(self, a: Any, b: Any, target: float) -> Ordering3:
        if a is b and isinstance(a, _Sentinel):
            return EQUAL
        if a is NEG_INF or b is POS_INF:
            return LESS
        if a is POS_INF or b is NEG_INF:
            return GREATER
        return self.cmp.boosted(a, b, target)

    # -- walks --------------------------------------------------------------

    def navigation(self, x: Any, attach: bool = False,
                   root: Optional[Frame] = None) -> SearchNavigation:
        return SearchNavigation(self, x, self.per_step_boost, attach=attach, root=root)

    def locate(self, x: Any, attach: bool = False, root: Optional[Frame] = None) -> Frame:
        return walk(self.navigation(x, attach, root), self.walk_config())

    def search(self, x: Any) -> Optional[RBNode]:
        if self.root is None:
            return None
        f = self.locate(x)
        if self.cmp.boosted(f.node.key, x, self.epsilon) is EQUAL:
            return f.node
        return None

    def __contains__(self, x: Any) -> bool:
        return self.search(x) is not None

    def insert(self, x: Any) -> bool:
        return self.insert_node(x)[1]

    def insert_node(self, x: Any) -> Tuple[RBNode, bool]:
        """Insert ``x``; returns ``(node, inserted)``, the node holding ``x`` either way."""
        if self.root is None:
            z = self.root = self.node_class(x, red=False)
            self.size = 1
            self._init_node(z)
            return z, True
        for _ in range(MAX_INSERT_ATTEMPTS):
            nav = self.navigation(x, attach=True)
            f = walk(nav, self.walk_config())
            node = f.node
            r = nav.attach_side(f, self.epsilon)
            if r is None:
                continue
            if r is EQUAL:
                return node, False
            if r is LESS:
                z = node.left = self.node_class(x)
            else:
                z = node.right = self.node_class(x)
            z.parent = node
            self.size += 1
            self._init_node(z)
            if self.augmented:
                self._pull_path(z)
            self._insert_fixup(z)
            return z, True
        raise RuntimeError(f"no insertion point found for {x!r} after "
                           f"{MAX_INSERT_ATTEMPTS} attempts")

    def remove(self, x: Any) -> bool:
        node = self.search(x)
        if node is None:
            return False
        self.delete_node(node)
        return True

    def min_node(self) -> Optional[RBNode]:
        node = self.root
        if node is None:
            return None
        while node.left is not None:
            node = node.left
        return node

    def pop_min(self) -> Any:
        """Remove and return the leftmost key; uses no comparisons."""
        node = self.min_node()
        if node is None:
            raise KeyError("pop_min from an empty tree")
        self.delete_node(node)
        return node.key

    def path_to(self, node: RBNode) -> List[RBNode]:
        path = []
        while node is not None:
            path.append(node)
            node = node.parent
        path.reverse()
        return path

    # -- augmentation hooks -------------------------------------------------

    def _init_node(self, node: RBNode) -> None:
        pass

    def _pull(self, node: RBNode) -> None:
        pass

    def _pull_path(self, node: Optional[RBNode]) -> None:
        while node is not None:
            self._pull(node)
            node = node.parent

    # -- structural maintenance (comparison free) ---------------------------

    def _replace_child(self, parent: Optional[RBNode], old: RBNode, new: Optional[RBNode]):
        if parent is None:
            self.root = new
        elif parent.left is old:
            parent.left = new
        else:
            parent.right = new
        if new is not None:
            new.parent = parent

    def _rotate_left(self, x: RBNode) -> None:
        y = x.right
        x.right = y.left
        if y.left is not None:
            y.left.parent = x
        self._replace_child(x.parent, x, y)
        y.left = x
        x.parent = y
        self._pull(x)
        self._pull(y)

    def _rotate_right(self, x: RBNode) -> None:
        y = x.left
        x.left = y.right
        if y.right is not None:
            y.right.parent = x
        self._replace_child(x.parent, x, y)
        y.right = x
        x.parent = y
        self._pull(x)
        self._pull(y)

    def _insert_fixup(self, z: RBNode) -> None:
        while z.parent is not None and z.parent.red:
            p = z.parent
            g = p.parent
            if p is g.left:
                u = g.right
                if u is not None and u.red:
                    p.red = u.red = False
                    g.red = True
                    z = g
                    continue
                if z is p.right:
                    z = p
                    self._rotate_left(z)
                    p = z.parent
                p.red = False
                g.red = True
                self._rotate_right(g)
            else:
                u = g.left
                if u is not None and u.red:
                    p.red = u.red = False
                    g.red = True
                    z = g
                    continue
                if z is p.left:
                    z = p
                    self._rotate_right(z)
                    p = z.parent
                p.red = False
                g.red = True
                self._rotate_left(g)
        self.root.red = False

    def delete_node(self, z: RBNode) -> None:
        removed_red = z.red
        if z.left is None:
            x, xp = z.right, z.parent
            self._replace_child(z.parent, z, z.right)
        elif z.right is None:
            x, xp = z.left, z.parent
            self._replace_child(z.parent, z, z.left)
        else:
            y = z.right
            while y.left is not None:
                y = y.left
            removed_red = y.red
            x = y.right
            if y.parent is z:
                xp = y
            else:
                xp = y.parent
                self._replace_child(y.parent, y, y.right)
                y.right = z.right
                y.right.parent = y
            self._replace_child(z.parent, z, y)
            y.left = z.left
            y.left.parent = y
            y.red = z.red
        z.left = z.right = z.parent = None
        self.size -= 1
        if self.augmented:
            self._pull_path(xp)
        if not removed_red:
            self._delete_fixup(x, xp)

    def _delete_fixup(self, x: Optional[RBNode], xp: Optional[RBNode]) -> None:
        while x is not self.root and (x is None or not x.red):
            if x is xp.left:
                w = xp.right
                if w.red:
                    w.red = False
                    xp.red = True
                    self._rotate_left(xp)
                    w = xp.right
                if not _is_red(w.left) and not _is_red(w.right):
                    w.red = True
                    x, xp = xp, xp.parent
                else:
                    if not _is_red(w.right):
                        w.left.red = False
                        w.red = True
                        self._rotate_right(w)
                        w = xp.right
                    w.red = xp.red
                    xp.red = False
                    w.right.red = False
                    self._rotate_left(xp)
                    x, xp = self.root, None
            else:
                w = xp.left
                if w.red:
                    w.red = False
                    xp.red = True
                    self._rotate_right(xp)
                    w = xp.left
                if not _is_red(w.left) and not _is_red(w.right):
                    w.red = True
                    x, xp = xp, xp.parent
                else:
                    if not _is_red(w.left):
                        w.right.red = False
                        w.red = True
                        self._rotate_left(w)
                        w = xp.left
                    w.red = xp.red
                    xp.red = False
                    w.left.red = False
                    self._rotate_right(xp)
                    x, xp = self.root, None
        if x is not None:
            x.red = False


def _is_red(node: Optional[RBNode]) -> bool:
    return node is not None and node.red


def search(tree: RBTree, x: Any) -> Optional[RBNode]:
    return tree.search(x)


def insert(tree: RBTree, x: Any) -> bool:
    return tree.insert(x)


def remove(tree: RBTree, x: Any) -> bool:
    return tree.remove(x)


def rb_violation(tree: RBTree, check_order: bool = True) -> Optional[str]:
    """First violated red-black property, or None. Uses exact comparisons only."""
    root = tree.root
    if root is None:
        return None if tree.size == 0 else f"empty tree reports size {tree.size}"
    if root.parent is not None:
        return "root has a parent"
    if root.red:
        return "root is red"
    count = 0
    black_height = None
    stack = [(root, 0)]
    while stack:
        node, blacks = stack.pop()
        count += 1
        blacks += not node.red
        for ch in (node.left, node.right):
            if ch is None:
                if black_height is None:
                    black_height = blacks
                elif blacks != black_height:
                    return f"unequal black height below {node!r}"
                continue
            if ch.parent is not node:
                return f"broken parent pointer at {ch!r}"
            if node.red and ch.red:
                return f"red node {node!r} has a red child"
            stack.append((ch, blacks))
    if count != tree.size:
        return f"size is {tree.size} but tree holds {count} nodes"
    if check_order:
        prev = None
        for node in tree.nodes():
            if prev is not None and compare_exact(prev.key, node.key) is not LESS:
                return f"keys out of order: {prev.key!r} before {node.key!r}"
            prev = node
    return None


def check_rb_invariants(tree: RBTree, check_order: bool = True) -> bool:
    return rb_violation(tree, check_order) is None


def complete_tree(h: int, cmp: Optional[NoisyComparator] = None, **kwargs) -> RBTree:
    """Perfect tree of height h holding keys 1 .. 2**(h+1)-1, all black."""
    tree = RBTree(cmp, **kwargs)

    def build(lo: int, hi: int, parent: Optional[RBNode]) -> Optional[RBNode]:
        if lo > hi:
            return None
        mid = (lo + hi) // 2
        node = RBNode(mid, red=False)
        node.parent = parent
        node.left = build(lo, mid - 1, node)
        node.right = build(mid + 1, hi, node)
        return node

    n = (1 << (h + 1)) - 1
    tree.root = build(1, n, None)
    tree.size = n
    return tree


def frame_path(f: Frame) -> List[Frame]:
    """Frames from the walk root down to ``f``."""
    return reconstruct_path(_FrameParent, f)


class _FrameParent:
    @staticmethod
    def parent(f: Frame) -> Optional[Frame]:
        return f.up
