"""Two-class decision tree in the C4.5 family.

Splits are binary: numeric attributes test ``x <= threshold`` (midpoints
between consecutive distinct values), nominal attributes test
``x == value`` against the rest.  Within an attribute the candidate is
chosen by information gain; attributes then compete on gain ratio (the
C4.5 convention) unless ``use_gain_ratio`` is off.  Ties break to the
lowest attribute index, then the lowest threshold / value index.  Leaves
report the weighted class frequency with no smoothing.

When a node is impure but no candidate split has positive gain (XOR-like
data), the lowest-indexed feasible split is taken anyway; recursion still
terminates because both sides must receive at least the per-leaf minimum.

Pruning is pessimistic-error pruning: a subtree collapses to a leaf when
the leaf's upper-confidence error estimate does not exceed the subtree's.
No subtree raising, no missing-value handling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from ..data import Dataset
from .base import BinaryModel, binary_class_info

_EPS = 1e-12


@dataclass(frozen=True)
class TreeParams:
    min_instances_per_leaf: int = 2
    pruning_confidence: float = 0.25
    use_gain_ratio: bool = True
    prune: bool = True

    def __post_init__(self):
        if self.min_instances_per_leaf < 1:
            raise ValueError("min_instances_per_leaf must be >= 1")
        if not 0.0 < self.pruning_confidence <= 0.5:
            raise ValueError("pruning_confidence must be in (0, 0.5]")


class _Node:
    __slots__ = ("attr", "threshold", "nominal", "left", "right", "w_first", "w_second")

    def __init__(self, attr, threshold, nominal, left, right, w_first, w_second):
        self.attr = attr
        self.threshold = threshold
        self.nominal = nominal
        self.left = left
        self.right = right
        self.w_first = w_first
        self.w_second = w_second


class _Leaf:
    __slots__ = ("w_first", "w_second")

    def __init__(self, w_first, w_second):
        self.w_first = w_first
        self.w_second = w_second

    @property
    def p_first(self) -> float:
        total = self.w_first + self.w_second
        return self.w_first / total if total > 0 else 0.5


def _xlog2x(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    out = np.zeros_like(a)
    pos = a > 0
    out[pos] = a[pos] * np.log2(a[pos])
    return out


def _ent(w_first, w_second):
    """Unnormalized entropy (weight * bits) of a two-class count pair."""
    return _xlog2x(w_first + w_second) - _xlog2x(w_first) - _xlog2x(w_second)


def add_errs(n: float, e: float, cf: float) -> float:
    """Extra errors granted by the pessimistic upper confidence bound,
    following the C4.5 convention (normal approximation with continuity
    correction, linear interpolation below one error)."""
    if n <= 0:
        return 0.0
    if e < 1:
        base = n * (1.0 - cf ** (1.0 / n))
        if e == 0:
            return base
        return base + e * (add_errs(n, 1.0, cf) - base)
    if e + 0.5 >= n:
        return max(n - e, 0.0)
    z = ndtri(1.0 - cf)
    f = (e + 0.5) / n
    r = (f + z * z / (2.0 * n) + z * np.sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (
        1.0 + z * z / n
    )
    return r * n - e


class TreeModel(BinaryModel):
    kind = "tree"

    def __init__(self, root, attributes, class_attribute, class_pair):
        self.root = root
        self.attributes = attributes
        self.class_attribute = class_attribute
        self.class_pair = tuple(class_pair)
        self.n_attributes = len(attributes)

    def predict_prob_batch(self, rows: np.ndarray) -> np.ndarray:
        rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        self._check_width(rows)
        out = np.empty(rows.shape[0])
        stack = [(self.root, np.arange(rows.shape[0]))]
        while stack:
            node, idx = stack.pop()
            if idx.size == 0:
                continue
            if isinstance(node, _Leaf):
                out[idx] = node.p_first
                continue
            col = rows[idx, node.attr]
            go_left = col == node.threshold if node.nominal else col <= node.threshold
            stack.append((node.left, idx[go_left]))
            stack.append((node.right, idx[~go_left]))
        return out

    # -- inspection ---------------------------------------------------

    def n_nodes(self) -> int:
        def count(node):
            if isinstance(node, _Leaf):
                return 1
            return 1 + count(node.left) + count(node.right)

        return count(self.root)

    def depth(self) -> int:
        def d(node):
            if isinstance(node, _Leaf):
                return 0
            return 1 + max(d(node.left), d(node.right))

        return d(self.root)

    def to_lines(self) -> list[str]:
        lines = [
            "tree",
            f"classes {self.class_pair[0]} {self.class_pair[1]}",
        ]

        def walk(node, depth):
            pad = "  " * depth
            if isinstance(node, _Leaf):
                lines.append(f"{pad}leaf {node.w_first!r} {node.w_second!r}")
                return
            name = self.attributes[node.attr].name
            if node.nominal:
                val = self.attributes[node.attr].values[int(node.threshold)]
                lines.append(f"{pad}split {name} == {val}")
            else:
                lines.append(f"{pad}split {name} <= {node.threshold!r}")
            walk(node.left, depth + 1)
            walk(node.right, depth + 1)

        walk(self.root, 0)
        return lines


def _best_numeric(col, target, weights, min_leaf):
    """Best threshold for one numeric column.

    Returns (gain_u, split_info_u, threshold) in unnormalized weight*bits
    units, or None when no feasible threshold exists.
    """
    order = np.argsort(col, kind="stable")
    v = col[order]
    boundaries = np.flatnonzero(v[:-1] < v[1:])
    if boundaries.size == 0:
        return None
    w = weights[order]
    wt = w * target[order]
    cw = np.cumsum(w)[boundaries]
    cw1 = np.cumsum(wt)[boundaries]
    total_w = w.sum()
    total_1 = wt.sum()

    ok = (cw >= min_leaf) & (total_w - cw >= min_leaf)
    if not ok.any():
        return None
    cw, cw1 = cw[ok], cw1[ok]
    boundaries = boundaries[ok]
    parent = _ent(total_1, total_w - total_1)
    children = _ent(cw1, cw - cw1) + _ent(total_1 - cw1, (total_w - cw) - (total_1 - cw1))
    gains = parent - children
    split_info = _xlog2x(total_w) - _xlog2x(cw) - _xlog2x(total_w - cw)
    best = _argbest(gains, split_info)
    i = boundaries[best]
    thr = (v[i] + v[i + 1]) / 2.0
    return float(gains[best]), float(split_info[best]), thr


def _best_nominal(col, target, weights, n_values, min_leaf):
    """Best ``value vs rest`` test for one nominal column."""
    cats = col.astype(np.intp)
    w_all = np.bincount(cats, weights=weights, minlength=n_values)
    w_one = np.bincount(cats, weights=weights * target, minlength=n_values)
    total_w = w_all.sum()
    total_1 = w_one.sum()
    ok = (w_all >= min_leaf) & (total_w - w_all >= min_leaf)
    if not ok.any():
        return None
    idx = np.flatnonzero(ok)
    lw, lw1 = w_all[idx], w_one[idx]
    parent = _ent(total_1, total_w - total_1)
    children = _ent(lw1, lw - lw1) + _ent(total_1 - lw1, (total_w - lw) - (total_1 - lw1))
    gains = parent - children
    split_info = _xlog2x(total_w) - _xlog2x(lw) - _xlog2x(total_w - lw)
    best = _argbest(gains, split_info)
    return float(gains[best]), float(split_info[best]), float(idx[best])


def _argbest(gains, split_info):
    """Index of the best candidate within one attribute: highest gain,
    ties to the lowest threshold (arrays come in ascending order)."""
    top = gains.max()
    return int(np.flatnonzero(gains >= top - _EPS)[0])


def _score(gain, split_info, use_ratio):
    if not use_ratio:
        return gain
    return gain / split_info if split_info > _EPS else 0.0


def _grow(values, target, weights, feature_cols, nominal_sizes, params):
    w1 = float(weights @ target)
    w_total = float(weights.sum())
    w2 = w_total - w1
    min_leaf = float(params.min_instances_per_leaf)

    if w1 <= 0 or w2 <= 0 or w_total < 2 * min_leaf:
        return _Leaf(w1, w2)

    candidates = []
    for attr in feature_cols:
        col = values[:, attr]
        if nominal_sizes[attr]:
            cand = _best_nominal(col, target, weights, nominal_sizes[attr], min_leaf)
        else:
            cand = _best_numeric(col, target, weights, min_leaf)
        if cand is not None:
            candidates.append((attr, *cand))
    if not candidates:
        return _Leaf(w1, w2)

    gain_floor = _EPS * max(1.0, w_total)
    positive = [c for c in candidates if c[1] > gain_floor]
    pool = positive if positive else candidates
    if positive:
        scores = [_score(g / w_total, si / w_total, params.use_gain_ratio) for _, g, si, _ in pool]
        top = max(scores)
        tied = [c for s, c in zip(scores, pool) if s >= top - _EPS]
    else:
        tied = pool  # no informative split: fall back to position order
    attr, _gain, _si, thr = min(tied, key=lambda c: (c[0], c[3]))

    col = values[:, attr]
    go_left = col == thr if nominal_sizes[attr] else col <= thr
    left = _grow(
        values[go_left], target[go_left], weights[go_left],
        feature_cols, nominal_sizes, params,
    )
    right = _grow(
        values[~go_left], target[~go_left], weights[~go_left],
        feature_cols, nominal_sizes, params,
    )
    return _Node(attr, thr, bool(nominal_sizes[attr]), left, right, w1, w2)


def _pessimistic_errors(node, cf: float) -> float:
    if isinstance(node, _Leaf):
        n = node.w_first + node.w_second
        e = min(node.w_first, node.w_second)
        return e + add_errs(n, e, cf)
    return _pessimistic_errors(node.left, cf) + _pessimistic_errors(node.right, cf)


def _prune(node, cf: float):
    if isinstance(node, _Leaf):
        return node
    node.left = _prune(node.left, cf)
    node.right = _prune(node.right, cf)
    n = node.w_first + node.w_second
    e = min(node.w_first, node.w_second)
    as_leaf = e + add_errs(n, e, cf)
    subtree = _pessimistic_errors(node.left, cf) + _pessimistic_errors(node.right, cf)
    if as_leaf <= subtree + 0.1:
        return _Leaf(node.w_first, node.w_second)
    return node


def fit_tree(d: Dataset, params: TreeParams = TreeParams()) -> TreeModel:
    """Fit on a dataset with exactly two classes present."""
    lo, hi, target = binary_class_info(d)
    feature_cols = tuple(
        j for j in range(d.n_attributes) if j != d.class_attribute
    )
    nominal_sizes = tuple(
        len(spec.values) if spec.is_nominal else 0 for spec in d.attributes
    )
    root = _grow(d.values, target, d.weights, feature_cols, nominal_sizes, params)
    if params.prune:
        root = _prune(root, params.pruning_confidence)
    return TreeModel(root, d.attributes, d.class_attribute, (lo, hi))
