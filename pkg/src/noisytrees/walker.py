"""Generic walking-tree engine for trees with noisy navigation predicates.

A tree plugs in through :class:`WalkNavigation`. The walk starts at the root
and runs a fixed number of steps; at each step it either climbs out of a
branch that looks wrong, descends towards the target, or adjusts a
confidence counter while anchored at a node believed to be the target.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any, List, Optional, Protocol


class WalkNavigation(Protocol):
    def get_root(self) -> Any: ...

    def parent(self, v: Any) -> Optional[Any]: ...

    def select_child(self, v: Any) -> Any: ...

    def is_target(self, v: Any) -> bool: ...

    def is_node_correct(self, v: Any) -> bool: ...

    def process_node(self, v: Any) -> None: ...


class ProcessOrder(enum.Enum):
    TOP_DOWN = "top-down"
    BOTTOM_UP = "bottom-up"


def steps_budget(h: int, epsilon: float, c: float = 108) -> int:
    """ceil(c * (h + log2(1/epsilon)))."""
    if not 0.0 < epsilon < 0.5:
        raise ValueError(f"epsilon must lie in (0, 0.5), got {epsilon}")
    if h < 0:
        raise ValueError("height must be non-negative")
    if c <= 0:
        raise ValueError("c must be positive")
    return max(1, math.ceil(c * (h + math.log2(1.0 / epsilon))))


@dataclass
class WalkConfig:
    epsilon: float = 0.05
    c: float = 108
    per_step_boost: float = 0.1
    height_hint: int = 0
    process_order: ProcessOrder = ProcessOrder.TOP_DOWN

    @property
    def steps(self) -> int:
        return steps_budget(self.height_hint, self.epsilon, self.c)


@dataclass
class WalkState:
    current: Any
    counter: int = 0


def _advance(nav: WalkNavigation, u: Any, counter: int, cap: int):
    if counter == 0:
        if not nav.is_node_correct(u):
            up = nav.parent(u)
            return (u if up is None else up), 0
        if nav.is_target(u):
            return u, 1
        return nav.select_child(u), 0
    if nav.is_target(u):
        return u, counter + 1 if counter < cap else cap
    return u, counter - 1


def one_step(nav: WalkNavigation, state: WalkState, cap: Optional[int] = None) -> WalkState:
    """One step of the walk. ``cap`` caps the counter; the walk uses s + 1."""
    if cap is None:
        cap = 1 << 62
    u, counter = _advance(nav, state.current, state.counter, cap)
    return WalkState(u, counter)


def walk(nav: WalkNavigation, config: WalkConfig, steps: Optional[int] = None) -> Any:
    """Run exactly ``steps`` (default ``config.steps``) steps from the root."""
    s = config.steps if steps is None else steps
    cap = s + 1
    is_target = nav.is_target
    is_node_correct = nav.is_node_correct
    select_child = nav.select_child
    parent = nav.parent
    u = nav.get_root()
    counter = 0
    for _ in range(s):
        if counter:
            if is_target(u):
                if counter < cap:
                    counter += 1
            else:
                counter -= 1
        elif not is_node_correct(u):
            up = parent(u)
            if up is not None:
                u = up
        elif is_target(u):
            counter = 1
        else:
            u = select_child(u)
    return u


def reconstruct_path(nav: WalkNavigation, target: Any) -> List[Any]:
    """Root-to-target path following exact parent links."""
    path = [target]
    v = nav.parent(target)
    while v is not None:
        path.append(v)
        v = nav.parent(v)
    path.reverse()
    return path


def run_operation(nav: WalkNavigation, config: WalkConfig, steps: Optional[int] = None) -> Any:
    target = walk(nav, config, steps)
    path = reconstruct_path(nav, target)
    if config.process_order is ProcessOrder.BOTTOM_UP:
        path.reverse()
    for v in path:
        nav.process_node(v)
    return target
