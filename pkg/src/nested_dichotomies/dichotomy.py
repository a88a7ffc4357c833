"""Nested dichotomies: recursive class-set splitting with a binary model
per internal node, and product-rule probability estimates.

Construction walks down from the full class set.  At each internal node
the strategy picks a two-block partition of the node's classes, a binary
model is trained on all of the node's instances relabeled by block, and
the two blocks recurse.  Each node draws randomness from a stream derived
from (seed, root-to-node path), so identical inputs give identical trees
regardless of evaluation order.

A class probability is the product of the branch probabilities along the
root-to-leaf path for that class; the per-class vector always sums to one
because each node's two branch probabilities do.
"""

from __future__ import annotations

import numpy as np

from .data import Dataset, Instance
from .errors import NDError, TrainingError
from .learners import ConstantModel, LearnerParams, fit_binary_model
from .seeds import node_rng
from .selection import SplitDecision, SubsetSelector


class NDNode:
    """Either a leaf (single class) or an internal node holding a binary
    model and the two child nodes over its class-subset blocks."""

    __slots__ = ("class_subset", "model", "left", "right")

    def __init__(self, class_subset, model=None, left=None, right=None):
        self.class_subset = tuple(sorted(class_subset))
        self.model = model
        self.left = left
        self.right = right
        if self.is_leaf:
            assert model is None and left is None and right is None
        else:
            assert model is not None and left is not None and right is not None

    @property
    def is_leaf(self) -> bool:
        return len(self.class_subset) == 1

    def structure(self):
        """Hashable identity of the split structure (model-free)."""
        if self.is_leaf:
            return self.class_subset[0]
        return frozenset((self.left.structure(), self.right.structure()))


class NestedDichotomy:
    def __init__(self, root: NDNode, class_names, build_seed: int, strategy_id: str):
        self.root = root
        self.class_names = tuple(class_names)
        self.build_seed = build_seed
        self.strategy_id = strategy_id

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    # -- prediction ----------------------------------------------------

    def predict_distribution_batch(self, rows) -> np.ndarray:
        rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        out = np.zeros((rows.shape[0], self.n_classes))

        def descend(node: NDNode, mass: np.ndarray):
            if node.is_leaf:
                out[:, node.class_subset[0]] = mass
                return
            p = node.model.predict_prob_batch(rows)
            descend(node.left, mass * p)
            descend(node.right, mass * (1.0 - p))

        descend(self.root, np.ones(rows.shape[0]))
        return out

    def predict_distribution(self, x) -> np.ndarray:
        if isinstance(x, Instance):
            x = x.values
        return self.predict_distribution_batch(x)[0]

    def predict_class_batch(self, rows) -> np.ndarray:
        return np.argmax(self.predict_distribution_batch(rows), axis=1)

    def predict_class(self, x) -> int:
        if isinstance(x, Instance):
            x = x.values
        return int(self.predict_class_batch(x)[0])

    # -- inspection ----------------------------------------------------

    def structure(self):
        return self.root.structure()

    def internal_nodes(self) -> list[NDNode]:
        out = []

        def walk(node):
            if not node.is_leaf:
                out.append(node)
                walk(node.left)
                walk(node.right)

        walk(self.root)
        return out

    def to_text(self) -> str:
        lines = []

        def walk(node, depth):
            names = ",".join(self.class_names[c] for c in node.class_subset)
            lines.append("  " * depth + f"[{names}]")
            if not node.is_leaf:
                walk(node.left, depth + 1)
                walk(node.right, depth + 1)

        walk(self.root, 0)
        return "\n".join(lines) + "\n"

    def to_model_text(self) -> str:
        """Full line-oriented dump: split structure plus every node model."""
        lines = [f"nested_dichotomy strategy={self.strategy_id} seed={self.build_seed}"]
        lines.append("classes " + ",".join(self.class_names))

        def walk(node, path):
            tag = "".join(map(str, path)) or "root"
            subset = ",".join(str(c) for c in node.class_subset)
            if node.is_leaf:
                lines.append(f"leaf {tag} classes={subset}")
                return
            lines.append(f"node {tag} classes={subset}")
            lines.extend("  " + line for line in node.model.to_lines())
            walk(node.left, path + (0,))
            walk(node.right, path + (1,))

        walk(self.root, ())
        return "\n".join(lines) + "\n"

    def to_dot(self) -> str:
        lines = ["digraph nested_dichotomy {", "  node [shape=ellipse];"]
        counter = [0]

        def walk(node):
            my_id = counter[0]
            counter[0] += 1
            label = ", ".join(self.class_names[c] for c in node.class_subset)
            lines.append(f'  n{my_id} [label="{label}"];')
            if not node.is_leaf:
                for child in (node.left, node.right):
                    child_id = walk(child)
                    lines.append(f"  n{my_id} -> n{child_id};")
            return my_id

        walk(self.root)
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_nd(
    d: Dataset,
    strategy: SubsetSelector,
    learner: LearnerParams,
    seed: int,
    class_ids=None,
    structure_only: bool = False,
) -> NestedDichotomy:
    """Build one nested dichotomy over ``class_ids`` (default: the classes
    present in ``d``).

    The structural split is made even when the node's data is missing
    classes of its subset (bootstrap resamples can drop classes): a block
    with no instances gets a constant-probability node model at the
    empirical prior, and a node where fewer than two subset classes have
    instances falls back to splitting off the lowest class.

    ``structure_only`` skips training the final per-node models (constant
    placeholders are stored instead); split selection, and any model it
    needs, runs exactly as usual.  Structure studies over many trees use
    this, since node models never influence the splits.
    """
    if class_ids is None:
        class_ids = d.classes_present()
    class_ids = tuple(sorted(class_ids))
    if len(class_ids) < 2:
        raise NDError(f"need at least 2 classes to build, got {len(class_ids)}")

    data_free = strategy.strategy_id in ("random", "class_balanced")

    def build(subset, node_data: Dataset, path) -> NDNode:
        if len(subset) == 1:
            return NDNode(subset)
        rng = node_rng(seed, path)
        counts = node_data.class_counts()
        present = [c for c in subset if counts[c] > 0]
        if len(subset) > 2 and len(present) < 2 and not data_free:
            decision = SplitDecision([subset[0]], subset[1:])
        else:
            try:
                decision = strategy.select(subset, node_data, learner, rng)
            except NDError as exc:
                raise TrainingError(subset, exc) from exc
        if structure_only:
            model = ConstantModel(0.5, node_data.n_attributes)
        else:
            model = _node_model(node_data, decision, learner, subset)
        left = build(decision.s1, node_data.restrict_to_classes(decision.s1), path + (0,))
        right = build(decision.s2, node_data.restrict_to_classes(decision.s2), path + (1,))
        return NDNode(subset, model, left, right)

    root = build(class_ids, d.restrict_to_classes(class_ids), ())
    return NestedDichotomy(root, d.class_names, seed, strategy.strategy_id)


def _node_model(node_data: Dataset, decision: SplitDecision, learner, subset):
    """Binary model over the full node data relabeled by block; degenerate
    one-sided nodes get a constant model at the empirical prior."""
    counts = node_data.class_counts()
    w1 = counts[list(decision.s1)].sum()
    w2 = counts[list(decision.s2)].sum()
    if w1 <= 0 or w2 <= 0:
        total = w1 + w2
        prior = w1 / total if total > 0 else 0.5
        return ConstantModel(prior, node_data.n_attributes)
    try:
        return fit_binary_model(node_data.relabel_binary(decision.s1), learner)
    except NDError as exc:
        raise TrainingError(subset, exc) from exc


def predict_distribution(nd: NestedDichotomy, x) -> np.ndarray:
    return nd.predict_distribution(x)


def predict_class(nd: NestedDichotomy, x) -> int:
    return nd.predict_class(x)
