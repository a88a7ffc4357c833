import numpy as np
import pytest

from conftest import gaussian_dataset
from nested_dichotomies.data import AttributeSpec, Dataset, bootstrap_sample
from nested_dichotomies.dichotomy import NDNode, NestedDichotomy, build_nd
from nested_dichotomies.errors import NDError
from nested_dichotomies.learners import LogisticParams, TreeParams
from nested_dichotomies.selection import SubsetSelector


class StubModel:
    """Fixed-probability node model for product-rule tests."""

    def __init__(self, p_first: float):
        self.p_first = p_first

    def predict_prob_batch(self, rows):
        return np.full(np.atleast_2d(rows).shape[0], self.p_first)

    def predict_prob(self, x):
        return self.p_first


def leaf(c):
    return NDNode((c,))


def four_class_data(seed=0, per_class=8):
    centers = np.array([[0, 0], [3, 0], [0, 3], [3, 3]], dtype=float)
    return gaussian_dataset(centers, per_class=per_class, spread=0.6, seed=seed)


def test_two_class_tree_single_internal_node():
    d = gaussian_dataset(np.array([[0.0], [4.0]]), per_class=10, seed=1)
    for strategy in ("random", "class_balanced", "centroid", "random_pair"):
        nd = build_nd(d, SubsetSelector(strategy), LogisticParams(), seed=3)
        assert not nd.root.is_leaf
        assert nd.root.left.is_leaf and nd.root.right.is_leaf
        assert len(nd.internal_nodes()) == 1


def test_leaf_and_internal_node_counts():
    for c in (3, 5, 7):
        d = gaussian_dataset(np.random.default_rng(c).normal(size=(c, 2)) * 4,
                             per_class=6, seed=c)
        nd = build_nd(d, SubsetSelector("random"), TreeParams(min_instances_per_leaf=1),
                      seed=11)
        leaves = []

        def walk(node):
            if node.is_leaf:
                leaves.append(node.class_subset[0])
            else:
                walk(node.left)
                walk(node.right)

        walk(nd.root)
        assert sorted(leaves) == list(range(c))
        assert len(nd.internal_nodes()) == c - 1


def test_random_strategy_reaches_all_15_structures():
    d = four_class_data(per_class=3)
    seen = set()
    for seed in range(10_000):
        nd = build_nd(d, SubsetSelector("random"),
                      TreeParams(min_instances_per_leaf=1, prune=False),
                      seed, structure_only=True)
        seen.add(nd.structure())
        if len(seen) == 15 and seed > 200:
            break
    assert len(seen) == 15  # published count of dichotomies for 4 classes


def test_fig_shape_product_rule():
    # root splits {1} off; right child splits {3} off; deepest splits {2},{4}
    root = NDNode(
        (0, 1, 2, 3),
        StubModel(0.6),
        leaf(0),
        NDNode(
            (1, 2, 3),
            StubModel(0.5),
            leaf(2),
            NDNode((1, 3), StubModel(0.25), leaf(1), leaf(3)),
        ),
    )
    nd = NestedDichotomy(root, ("c1", "c2", "c3", "c4"), 0, "stub")
    dist = nd.predict_distribution(np.zeros(5))
    np.testing.assert_allclose(dist, [0.6, 0.05, 0.2, 0.15], atol=1e-15)


def test_all_half_probabilities_uniform():
    root = NDNode(
        (0, 1, 2, 3),
        StubModel(0.5),
        NDNode((0, 1), StubModel(0.5), leaf(0), leaf(1)),
        NDNode((2, 3), StubModel(0.5), leaf(2), leaf(3)),
    )
    nd = NestedDichotomy(root, tuple("abcd"), 0, "stub")
    np.testing.assert_allclose(nd.predict_distribution(np.zeros(3)), [0.25] * 4)


def random_stub_tree(rng, class_ids):
    if len(class_ids) == 1:
        return leaf(class_ids[0])
    cut = rng.integers(1, len(class_ids))
    shuffled = list(class_ids)
    rng.shuffle(shuffled)
    return NDNode(
        tuple(class_ids),
        StubModel(float(rng.random())),
        random_stub_tree(rng, sorted(shuffled[:cut])),
        random_stub_tree(rng, sorted(shuffled[cut:])),
    )


def brute_force_distribution(node, n_classes):
    out = np.zeros(n_classes)

    def walk(n, acc):
        if n.is_leaf:
            out[n.class_subset[0]] = acc
            return
        walk(n.left, acc * n.model.p_first)
        walk(n.right, acc * (1.0 - n.model.p_first))

    walk(node, 1.0)
    return out


def test_distribution_sums_to_one_and_matches_brute_force():
    rng = np.random.default_rng(42)
    for _ in range(300):
        c = int(rng.integers(2, 9))
        root = random_stub_tree(rng, list(range(c)))
        nd = NestedDichotomy(root, tuple(f"k{i}" for i in range(c)), 0, "stub")
        dist = nd.predict_distribution(np.zeros(4))
        assert abs(dist.sum() - 1.0) < 1e-12
        np.testing.assert_allclose(dist, brute_force_distribution(root, c), atol=1e-12)


def test_predict_class_is_argmax_with_low_tie():
    root = NDNode((0, 1), StubModel(0.5), leaf(0), leaf(1))
    nd = NestedDichotomy(root, ("a", "b"), 0, "stub")
    assert nd.predict_class(np.zeros(2)) == 0  # exact tie: lowest index

    root2 = NDNode((0, 1), StubModel(0.4), leaf(0), leaf(1))
    nd2 = NestedDichotomy(root2, ("a", "b"), 0, "stub")
    assert nd2.predict_class(np.zeros(2)) == 1


def test_predict_class_agrees_with_distribution():
    d = four_class_data(seed=5, per_class=10)
    nd = build_nd(d, SubsetSelector("random_pair"), LogisticParams(), seed=2)
    rng = np.random.default_rng(0)
    rows = rng.normal(1.5, 2.0, size=(1000, d.n_attributes))
    dists = nd.predict_distribution_batch(rows)
    np.testing.assert_array_equal(
        nd.predict_class_batch(rows), np.argmax(dists, axis=1)
    )


def test_build_deterministic():
    d = four_class_data(seed=7)
    for strategy in ("random", "class_balanced", "random_pair"):
        a = build_nd(d, SubsetSelector(strategy), LogisticParams(), seed=13)
        b = build_nd(d, SubsetSelector(strategy), LogisticParams(), seed=13)
        assert a.structure() == b.structure()
        rows = d.values[:5]
        np.testing.assert_array_equal(
            a.predict_distribution_batch(rows), b.predict_distribution_batch(rows)
        )


def test_build_requires_two_classes():
    attrs = [AttributeSpec("x"), AttributeSpec("c", ("a", "b"))]
    d = Dataset(attrs, np.array([[0.0, 0.0]]), 1)
    with pytest.raises(NDError):
        build_nd(d, SubsetSelector("random"), LogisticParams(), seed=0)


def test_learner_failure_annotated_with_class_subset():
    from nested_dichotomies.errors import TrainingError

    d = four_class_data(seed=11)
    # an impossible convergence demand fails at the first trained node
    bad = LogisticParams(max_iterations=0, gradient_tolerance=1e-300)
    with pytest.raises(TrainingError) as err:
        build_nd(d, SubsetSelector("class_balanced"), bad, seed=1)
    assert set(err.value.class_subset) <= {0, 1, 2, 3}
    assert len(err.value.class_subset) >= 2


def test_missing_class_keeps_total_structure():
    # force a resample that drops at least one class, then verify the
    # tree still has one leaf per original class and predicts a proper
    # distribution over all of them
    d = gaussian_dataset(np.random.default_rng(3).normal(size=(6, 2)) * 3,
                         per_class=3, seed=9)
    class_ids = d.classes_present()
    for seed in range(40):
        sample = bootstrap_sample(d, seed)
        if len(sample.classes_present()) < 6:
            nd = build_nd(sample, SubsetSelector("random_pair"),
                          TreeParams(min_instances_per_leaf=1), seed, class_ids=class_ids)
            leaves = sorted(
                node.class_subset[0]
                for node in _all_nodes(nd.root)
                if node.is_leaf
            )
            assert leaves == list(range(6))
            dist = nd.predict_distribution(d.instance(0))
            assert abs(dist.sum() - 1.0) < 1e-9
            break
    else:
        pytest.fail("no bootstrap dropped a class in 40 seeds")


def _all_nodes(root):
    out = [root]
    if not root.is_leaf:
        out += _all_nodes(root.left) + _all_nodes(root.right)
    return out


def test_class_balanced_height():
    for c in (4, 6, 8):
        d = gaussian_dataset(np.random.default_rng(c).normal(size=(c, 2)) * 4,
                             per_class=4, seed=c)
        nd = build_nd(d, SubsetSelector("class_balanced"),
                      TreeParams(min_instances_per_leaf=1), seed=1)

        def height(node):
            if node.is_leaf:
                return 0
            return 1 + max(height(node.left), height(node.right))

        assert height(nd.root) == int(np.ceil(np.log2(c)))
        for node in nd.internal_nodes():
            assert abs(len(node.left.class_subset) - len(node.right.class_subset)) <= 1


def test_text_and_dot_exports():
    d = four_class_data(seed=8)
    nd = build_nd(d, SubsetSelector("class_balanced"), LogisticParams(), seed=4)
    text = nd.to_text()
    assert text.count("[") == 7  # 4 leaves + 3 internal
    dot = nd.to_dot()
    assert dot.startswith("digraph")
    assert dot.count("->") == 6
    model_text = nd.to_model_text()
    assert "node root" in model_text
    assert "logistic" in model_text
