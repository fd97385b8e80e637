"""CART classification trees grown best-first on Gini impurity.

The frontier leaf with the largest size-weighted impurity decrease is split
next, until ``max_leaf_nodes`` is reached or no leaf can be split. A leaf can
be split when it is impure and some candidate feature takes two distinct
values in it. A zero-decrease split still counts, because splitting XOR-like
cells needs one. Once every leaf is pure growth stops, so raising
``max_leaf_nodes`` past that point returns the same tree.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

GAIN_TIE_TOL = 1e-12


@dataclass
class _Split:
    gain: float
    feature: int
    threshold: float
    left: np.ndarray
    right: np.ndarray


@dataclass
class CartTree:
    feature: list[int] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    value: list[int] = field(default_factory=list)
    num_classes: int = 2

    @property
    def n_leaves(self) -> int:
        return sum(1 for f in self.feature if f < 0)

    def _add_leaf(self, value: int) -> int:
        self.feature.append(-1)
        self.threshold.append(math.nan)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        return len(self.feature) - 1

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Index of the leaf each row of ``X`` falls into."""
        X = np.asarray(X, dtype=np.float64)
        node = np.zeros(X.shape[0], dtype=np.int64)
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold)
        left, right = np.asarray(self.left), np.asarray(self.right)
        active = feature[node] >= 0
        while active.any():
            idx = np.nonzero(active)[0]
            cur = node[idx]
            go_left = X[idx, feature[cur]] <= threshold[cur]
            node[idx] = np.where(go_left, left[cur], right[cur])
            active = feature[node] >= 0
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(self.value)[self.apply(X)]


def _gini_counts(counts: np.ndarray, n) -> np.ndarray:
    return n - np.sum(counts * counts, axis=-1) / n


def _best_split_on_feature(x: np.ndarray, Y: np.ndarray):
    """Return ``(weighted_child_impurity, threshold)`` for the best cut, or None.

    Impurities here are unnormalized (``n * gini``); smaller is better.
    """
    order = np.argsort(x, kind="stable")
    xs = x[order]
    valid = xs[:-1] < xs[1:]
    if not valid.any():
        return None
    cum = np.cumsum(Y[order], axis=0)
    total = cum[-1]
    n = xs.size
    n_left = np.arange(1, n, dtype=np.float64)
    left = cum[:-1]
    right = total - left
    child = _gini_counts(left, n_left) + _gini_counts(right, n - n_left)
    child = np.where(valid, child, np.inf)
    best = child.min()
    # first position within tolerance of the optimum is the smallest threshold
    pos = int(np.argmax(child <= best + GAIN_TIE_TOL))
    lo, hi = xs[pos], xs[pos + 1]
    thr = lo + (hi - lo) / 2.0
    if not lo <= thr < hi:
        thr = lo
    return float(child[pos]), float(thr)


def _find_split(X, Y, idx, n_total, n_candidates, rng) -> _Split | None:
    counts = Y[idx].sum(axis=0)
    n = idx.size
    parent = float(_gini_counts(counts, n))
    if parent <= 0.0:
        return None
    d = X.shape[1]
    order = np.arange(d) if rng is None else rng.permutation(d)
    best = None
    for pos, f in enumerate(order):
        if pos >= n_candidates and best is not None:
            break
        found = _best_split_on_feature(X[idx, f], Y[idx])
        if found is None:
            continue
        child, thr = found
        gain = (parent - child) / n_total
        key = (gain, f, thr)
        if best is None or gain > best[0] + GAIN_TIE_TOL or (
            abs(gain - best[0]) <= GAIN_TIE_TOL and (f, thr) < (best[1], best[2])
        ):
            best = key
    if best is None:
        return None
    gain, f, thr = best
    mask = X[idx, f] <= thr
    return _Split(max(gain, 0.0), int(f), thr, idx[mask], idx[~mask])


def fit_cart_tree(
    X: np.ndarray,
    y: np.ndarray,
    max_leaf_nodes: int,
    features_per_split: str = "sqrt",
    seed=None,
    num_classes: int | None = None,
) -> CartTree:
    """Grow a classification tree best-first.

    ``features_per_split="sqrt"`` examines ``floor(sqrt(d))`` features drawn
    at random per node. It keeps drawing from that node's permutation when
    none of them can split the node. ``"all"`` examines every feature.
    """
    if max_leaf_nodes < 2:
        raise ValueError("max_leaf_nodes must be at least 2")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    K = int(num_classes) if num_classes is not None else int(y.max()) + 1
    n, d = X.shape
    if features_per_split == "all":
        n_candidates, rng = d, None
    elif features_per_split == "sqrt":
        n_candidates = max(1, int(math.isqrt(d)))
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    else:
        raise ValueError("features_per_split must be 'all' or 'sqrt'")
    Y = np.zeros((n, K))
    Y[np.arange(n), y] = 1.0

    tree = CartTree(num_classes=K)
    root_idx = np.arange(n)
    root = tree._add_leaf(int(np.argmax(Y.sum(axis=0))))
    frontier: list = []
    counter = 0

    def push(node, idx):
        nonlocal counter
        split = _find_split(X, Y, idx, n, n_candidates, rng)
        if split is not None:
            heapq.heappush(frontier, (-split.gain, counter, node, split))
            counter += 1

    push(root, root_idx)
    n_leaves = 1
    while frontier and n_leaves < max_leaf_nodes:
        _, _, node, split = heapq.heappop(frontier)
        lnode = tree._add_leaf(int(np.argmax(Y[split.left].sum(axis=0))))
        rnode = tree._add_leaf(int(np.argmax(Y[split.right].sum(axis=0))))
        tree.feature[node] = split.feature
        tree.threshold[node] = split.threshold
        tree.left[node], tree.right[node] = lnode, rnode
        n_leaves += 1
        push(lnode, split.left)
        push(rnode, split.right)
    return tree
