"""Search trees, segment trees and string algorithms that tolerate noisy comparisons."""
from .autocomplete import Dictionary, LinearScanOracle, QueryAnswer, prefix_successor
from .oracle import (EQUAL, GREATER, LESS, IndexedStringComparator, NoiseMode, NoisyComparator,
                     Ordering3, QuantumCostParams, QuantumStringComparator, RandomSource,
                     derive_seed, repetitions_for)
from .rbtree import RBTree, check_rb_invariants, complete_tree, rb_violation
from .segtree import SegTree
from .strsort import SortResult, SortVariant, StringInstance, cost_scaling_probe, sort_strings
from .walker import ProcessOrder, WalkConfig, WalkNavigation, WalkState, one_step, run_operation, steps_budget, walk

__all__ = [
    "Dictionary", "LinearScanOracle", "QueryAnswer", "prefix_successor",
    "EQUAL", "GREATER", "LESS", "IndexedStringComparator", "NoiseMode", "NoisyComparator",
    "Ordering3", "QuantumCostParams", "QuantumStringComparator", "RandomSource", "derive_seed",
    "repetitions_for", "RBTree", "check_rb_invariants", "complete_tree", "rb_violation",
    "SegTree", "SortResult", "SortVariant", "StringInstance", "cost_scaling_probe",
    "sort_strings", "ProcessOrder", "WalkConfig", "WalkNavigation", "WalkState", "one_step",
    "run_operation", "steps_budget", "walk",
]
