import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lzcausal.data import LabeledDataset
from lzcausal.tree import (
    Criterion,
    DecisionTree,
    causal_strength,
    fit,
    predict,
    score_split_gini,
    score_split_lz_causal,
    score_split_lz_distance,
)

from oracles import brute_force_causal_strength, naive_penalty

ALL = list(Criterion)


def toy():
    return LabeledDataset([[1], [2], [3], [4]], [0, 0, 1, 1], ["f"], [0, 1])


def random_dataset(rng, n_rows=None, n_features=None, n_classes=None, distinct=6):
    n_rows = n_rows or int(rng.integers(1, 25))
    n_features = n_features or int(rng.integers(1, 4))
    n_classes = n_classes or int(rng.integers(1, 4))
    X = rng.integers(0, distinct, size=(n_rows, n_features)).astype(float)
    y = rng.integers(0, n_classes, size=n_rows)
    return LabeledDataset(X, y, [f"f{i}" for i in range(n_features)], list(range(n_classes)))


def brute_force_root_split(data, criterion):
    """Exhaustive argmin over every candidate using the public scorers."""
    y = data.targets.tolist()
    present = [c for c in data.class_labels if c in y]
    best = None
    for f in range(data.n_features):
        col = data.features[:, f].tolist()
        for t in sorted(set(col))[1:]:
            if criterion is Criterion.GINI:
                cands = [(score_split_gini(col, t, y), None)]
            elif criterion is Criterion.CAUSAL:
                cands = [(score_split_lz_causal(col, t, y, lab), lab) for lab in present]
            else:
                cands = [(score_split_lz_distance(col, t, y, lab), lab) for lab in present]
            for score, lab in cands:
                if best is None or score < best[0] - 1e-12:
                    best = (score, f, t, lab)
    return best


# -- scorers ------------------------------------------------------------------

def test_causal_score_worked_example():
    feature = [1.0, 0.0, 1.0, 1.0, 1.0, 0.0]  # "101110" at threshold 0.5
    targets = ["a", "a", "b", "a", "a", "a"]  # label "a" -> "110111"
    assert score_split_lz_causal(feature, 0.5, targets, "a") == 1


def test_causal_score_self_penalty():
    targets = [0, 1, 1, 0, 2, 1, 0, 1]
    feature = [float(t == 1) for t in targets]
    assert score_split_lz_causal(feature, 1.0, targets, 1) == 0


def test_causal_score_matches_oracle_random():
    rng = np.random.default_rng(1)
    for _ in range(50):
        col = rng.normal(size=20)
        t = float(rng.choice(col))
        y = rng.integers(0, 3, size=20)
        expected = naive_penalty([int(v >= t) for v in col], [int(v == 1) for v in y])
        assert score_split_lz_causal(col, t, y, 1) == expected


def test_distance_score_examples():
    targets = [0, 1, 1, 0]
    assert score_split_lz_distance([0, 1, 1, 0], 1, targets, 1) == 0
    feature = [1.0, 0.0, 1.0, 1.0, 1.0, 0.0]
    assert score_split_lz_distance(feature, 0.5, [1, 1, 0, 1, 1, 1], 1) == 1


def test_gini_score_examples():
    assert score_split_gini([1, 2, 3, 4], 3, [1, 1, 1, 1]) == 0.0
    assert score_split_gini([1, 2, 3, 4], 3, [0, 0, 1, 1]) == 0.0
    assert score_split_gini([1, 1, 2, 2], 2, [0, 1, 0, 1]) == pytest.approx(0.5)


# -- fit / predict ------------------------------------------------------------

@pytest.mark.parametrize("criterion", ALL)
def test_single_class_gives_leaf(criterion):
    data = LabeledDataset([[1], [5], [2]], [1, 1, 1], ["f"], [0, 1])
    tree = fit(data, criterion)
    assert tree.root.is_leaf and tree.root.prediction == 1


@pytest.mark.parametrize("criterion", ALL)
def test_toy_separable_depth_one(criterion):
    tree = fit(toy(), criterion)
    assert tree.depth == 1
    assert tree.root.threshold == 3.0
    assert list(tree.predict(toy().features)) == [0, 0, 1, 1]
    assert predict(tree, [1.5]) == 0
    assert predict(tree, [3.0]) == 1  # at the threshold -> right


def test_predict_leaf_only_and_length_check():
    tree = fit(LabeledDataset([[1, 2]], [0], ["a", "b"], [0, 1]))
    assert tree.predict_row([9, 9]) == 0
    with pytest.raises(ValueError):
        tree.predict_row([1])


def test_fit_rejects_empty():
    with pytest.raises(ValueError):
        fit(LabeledDataset(np.zeros((0, 1)), [], ["f"], [0]))


def test_no_candidate_split_is_leaf():
    data = LabeledDataset([[1], [1], [1]], [0, 1, 0], ["f"], [0, 1])
    tree = fit(data, Criterion.CAUSAL)
    assert tree.root.is_leaf and tree.root.prediction == 0


def test_majority_tie_goes_to_lowest_class():
    data = LabeledDataset([[1], [1]], [2, 1], ["f"], [1, 2])
    assert fit(data).root.prediction == 1


@pytest.mark.parametrize("criterion", ALL)
def test_root_split_matches_brute_force(criterion):
    rng = np.random.default_rng(7)
    for _ in range(40):
        data = random_dataset(rng, n_rows=int(rng.integers(2, 30)))
        tree = fit(data, criterion, max_depth=1)
        expected = brute_force_root_split(data, criterion)
        if tree.root.is_leaf:
            assert expected is None or len(set(data.targets.tolist())) == 1
            continue
        _, f, t, lab = expected
        assert (tree.root.feature, tree.root.threshold, tree.root.label) == (f, t, lab)


def check_structure(tree, data):
    for node in tree.nodes():
        if not node.is_leaf:
            assert node.left.depth == node.depth + 1 == node.right.depth
            assert node.left.n_samples + node.right.n_samples == node.n_samples
            assert node.n_samples >= tree.min_samples
            if tree.max_depth is not None:
                assert node.depth < tree.max_depth
    assert tree.root.depth == 0
    assert sum(leaf.n_samples for leaf in tree.leaves()) == data.n_rows
    # every row reaches exactly one leaf, and the leaf tallies agree
    hits = {}
    for row in data.features:
        node = tree.root
        while not node.is_leaf:
            node = node.left if row[node.feature] < node.threshold else node.right
        hits[id(node)] = hits.get(id(node), 0) + 1
    assert all(hits.get(id(leaf), 0) == leaf.n_samples for leaf in tree.leaves())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(ALL), st.one_of(st.none(), st.integers(0, 4)),
       st.integers(1, 5))
def test_structural_invariants(seed, criterion, max_depth, min_samples):
    data = random_dataset(np.random.default_rng(seed))
    tree = fit(data, criterion, max_depth=max_depth, min_samples=min_samples)
    check_structure(tree, data)
    raw = brute_force_causal_strength(tree)
    cs = causal_strength(tree)
    assert cs.raw == pytest.approx(raw, abs=0)
    if any(raw):
        assert abs(math.fsum(cs.scores) - 1.0) <= 1e-12
    else:
        assert cs.scores == [0.0] * tree.n_features


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(ALL), st.integers(0, 5), st.integers(1, 6))
def test_truncation_equals_refit(seed, criterion, max_depth, min_samples):
    data = random_dataset(np.random.default_rng(seed))
    full = fit(data, criterion)
    direct = fit(data, criterion, max_depth=max_depth, min_samples=min_samples)
    assert full.truncated(max_depth, min_samples).to_dict() == direct.to_dict()


@pytest.mark.parametrize("criterion", ALL)
def test_fit_is_deterministic(criterion):
    data = random_dataset(np.random.default_rng(3), n_rows=40, n_features=3, n_classes=3)
    assert fit(data, criterion, seed=5).to_dict() == fit(data, criterion, seed=5).to_dict()


@pytest.mark.parametrize("criterion", ALL)
def test_serialization_roundtrip(criterion):
    data = random_dataset(np.random.default_rng(4), n_rows=30, n_features=2, n_classes=3)
    tree = fit(data, criterion, max_depth=4)
    again = DecisionTree.from_dict(tree.to_dict())
    assert again.to_dict() == tree.to_dict()
    assert list(again.predict(data.features)) == list(tree.predict(data.features))


def test_lz_trees_are_order_sensitive():
    rng = np.random.default_rng(0)
    found = False
    for _ in range(200):
        data = random_dataset(rng, n_rows=12, n_features=2, n_classes=2)
        perm = rng.permutation(data.n_rows)
        a = fit(data, Criterion.CAUSAL, max_depth=1).root
        b = fit(data.subset(perm), Criterion.CAUSAL, max_depth=1).root
        if not a.is_leaf and not b.is_leaf and (a.feature, a.threshold) != (b.feature, b.threshold):
            found = True
            break
    assert found


def test_gini_is_order_invariant():
    rng = np.random.default_rng(1)
    for _ in range(30):
        X = rng.normal(size=(30, 3))
        y = rng.integers(0, 3, size=30)
        data = LabeledDataset(X, y, ["a", "b", "c"], [0, 1, 2])
        perm = rng.permutation(30)
        a = fit(data, Criterion.GINI, max_depth=1).root
        b = fit(data.subset(perm), Criterion.GINI, max_depth=1).root
        assert (a.feature, a.threshold) == (b.feature, b.threshold)


def test_gini_monotone_transform_keeps_partition():
    rng = np.random.default_rng(2)
    for _ in range(30):
        x = rng.normal(size=25)
        y = rng.integers(0, 2, size=25)
        base = fit(LabeledDataset(x[:, None], y, ["x"], [0, 1]), Criterion.GINI, max_depth=1).root
        moved = fit(LabeledDataset(np.exp(x)[:, None], y, ["x"], [0, 1]), Criterion.GINI,
                    max_depth=1).root
        if base.is_leaf:
            assert moved.is_leaf
            continue
        assert np.array_equal(x < base.threshold, np.exp(x) < moved.threshold)


# -- causal strength ------------------------------------------------------------

def test_causal_strength_examples():
    from lzcausal.tree import Node

    leaf = Node(depth=1, n_samples=1, prediction=0, class_counts=[1, 0])
    root_only = DecisionTree(
        root=Node(0, 2, 0, [1, 1], feature=0, threshold=1.0, left=leaf, right=leaf),
        criterion=Criterion.CAUSAL, class_labels=[0, 1], feature_names=["A", "B"])
    assert causal_strength(root_only).scores == [1.0, 0.0]

    child = Node(1, 2, 0, [1, 1], feature=1, threshold=1.0,
                 left=Node(2, 1, 0, [1, 0]), right=Node(2, 1, 1, [0, 1]))
    two_level = DecisionTree(
        root=Node(0, 3, 0, [2, 1], feature=0, threshold=1.0, left=child, right=leaf),
        criterion=Criterion.CAUSAL, class_labels=[0, 1], feature_names=["A", "B"])
    cs = causal_strength(two_level)
    assert cs.raw == [1.0, 0.5]
    assert cs.scores == pytest.approx([2 / 3, 1 / 3], abs=1e-15)
    assert cs.ranking() == [("A", cs.scores[0]), ("B", cs.scores[1])]


def test_causal_strength_leaf_only():
    tree = fit(LabeledDataset([[1, 2]], [0], ["a", "b"], [0, 1]))
    assert causal_strength(tree).scores == [0.0, 0.0]
    assert causal_strength(tree).ranking() == []
