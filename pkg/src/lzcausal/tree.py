"""Binary decision trees split by LZ penalty, LZ grammar distance or Gini.

Rows with ``feature < threshold`` go left, the rest go right. Candidate
thresholds are the distinct feature values at the node except the smallest
(which would leave the left child empty). The LZ criteria read the node's
rows in dataset order as symbol sequences, so they are sensitive to row
order; Gini is not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from .data import LabeledDataset
from .lz import lz_distance, lz_grammar, lz_penalty
from .symbolize import binarize_feature, binarize_target

__all__ = [
    "CausalStrengthRanking",
    "Criterion",
    "DecisionTree",
    "Node",
    "causal_strength",
    "fit",
    "predict",
    "score_split_gini",
    "score_split_lz_causal",
    "score_split_lz_distance",
]


class Criterion(str, Enum):
    CAUSAL = "causal"
    DISTANCE = "distance"
    GINI = "gini"


def score_split_lz_causal(feature_column, threshold, targets, label) -> int:
    """LZ penalty from the thresholded feature to the one-vs-rest target."""
    return lz_penalty(binarize_feature(feature_column, threshold), binarize_target(targets, label))


def score_split_lz_distance(feature_column, threshold, targets, label) -> int:
    """Grammar distance between the thresholded feature and the target indicator."""
    return lz_distance(
        lz_grammar(binarize_feature(feature_column, threshold)),
        lz_grammar(binarize_target(targets, label)),
    )


def _gini(counts: np.ndarray, n: int) -> float:
    if n == 0:
        return 0.0
    p = counts / n
    return 1.0 - float(np.sum(p * p))


def score_split_gini(feature_column, threshold, targets) -> float:
    """Size-weighted Gini impurity of the two children."""
    col = np.asarray(feature_column, dtype=float)
    y = np.asarray(targets)
    left = col < threshold
    n = len(y)
    n_left = int(left.sum())
    classes = np.unique(y)
    cl = np.array([np.sum(y[left] == c) for c in classes])
    cr = np.array([np.sum(y[~left] == c) for c in classes])
    return n_left / n * _gini(cl, n_left) + (n - n_left) / n * _gini(cr, n - n_left)


@dataclass
class Node:
    """Tree node; a leaf when ``left``/``right`` are None.

    Every node keeps its majority class and counts so that a tree can be cut
    back to a smaller depth or larger ``min_samples`` without refitting.
    """

    depth: int
    n_samples: int
    prediction: int
    class_counts: list[int]
    feature: int | None = None
    threshold: float | None = None
    score: float | None = None
    label: int | None = None
    left: Node | None = None
    right: Node | None = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def as_leaf(self) -> "Node":
        return replace(self, feature=None, threshold=None, score=None, label=None,
                       left=None, right=None)


@dataclass
class DecisionTree:
    root: Node
    criterion: Criterion
    class_labels: list[int]
    feature_names: list[str]
    max_depth: int | None = None
    min_samples: int = 1
    seed: int = 0
    dataset_name: str = ""

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def nodes(self) -> Iterator[Node]:
        """Pre-order traversal."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if not node.is_leaf:
                stack.append(node.right)
                stack.append(node.left)

    def leaves(self) -> list[Node]:
        return [n for n in self.nodes() if n.is_leaf]

    @property
    def depth(self) -> int:
        return max(n.depth for n in self.nodes())

    def predict_row(self, row: Sequence[float]) -> int:
        if len(row) != self.n_features:
            raise ValueError(f"row has {len(row)} values, tree expects {self.n_features}")
        node = self.root
        while not node.is_leaf:
            node = node.left if row[node.feature] < node.threshold else node.right
        return node.prediction

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        return np.array([self.predict_row(row) for row in X], dtype=int)

    def truncated(self, max_depth: int | None, min_samples: int) -> "DecisionTree":
        """The tree ``fit`` would have grown with stricter stopping limits.

        Valid when this tree was grown with limits at least as loose, because
        the split chosen at a node never depends on the limits.
        """
        if min_samples < self.min_samples or (
            self.max_depth is not None and (max_depth is None or max_depth > self.max_depth)
        ):
            raise ValueError("can only truncate to tighter limits")

        def cut(node: Node) -> Node:
            if node.is_leaf:
                return node
            if (max_depth is not None and node.depth >= max_depth) or node.n_samples < min_samples:
                return node.as_leaf()
            return replace(node, left=cut(node.left), right=cut(node.right))

        return replace(self, root=cut(self.root), max_depth=max_depth, min_samples=min_samples)

    def to_dict(self) -> dict:
        ids = {id(n): i for i, n in enumerate(self.nodes())}
        nodes = []
        for node in self.nodes():
            entry = {
                "id": ids[id(node)],
                "depth": node.depth,
                "n_samples": node.n_samples,
                "class": node.prediction,
                "class_counts": list(node.class_counts),
            }
            if not node.is_leaf:
                entry.update(
                    feature_index=node.feature,
                    threshold=node.threshold,
                    score=node.score,
                    label=node.label,
                    left=ids[id(node.left)],
                    right=ids[id(node.right)],
                )
            nodes.append(entry)
        return {
            "criterion": self.criterion.value,
            "max_depth": self.max_depth,
            "min_samples": self.min_samples,
            "seed": self.seed,
            "dataset": self.dataset_name,
            "feature_names": list(self.feature_names),
            "class_labels": list(self.class_labels),
            "nodes": nodes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionTree":
        raw = {entry["id"]: entry for entry in d["nodes"]}

        def build(i: int) -> Node:
            e = raw[i]
            node = Node(
                depth=int(e["depth"]),
                n_samples=int(e["n_samples"]),
                prediction=int(e["class"]),
                class_counts=[int(c) for c in e["class_counts"]],
            )
            if "feature_index" in e:
                node.feature = int(e["feature_index"])
                node.threshold = float(e["threshold"])
                node.score = None if e.get("score") is None else float(e["score"])
                node.label = None if e.get("label") is None else int(e["label"])
                node.left = build(int(e["left"]))
                node.right = build(int(e["right"]))
            return node

        return cls(
            root=build(0),
            criterion=Criterion(d["criterion"]),
            class_labels=[int(c) for c in d["class_labels"]],
            feature_names=list(d["feature_names"]),
            max_depth=d["max_depth"],
            min_samples=int(d["min_samples"]),
            seed=int(d["seed"]),
            dataset_name=d.get("dataset", ""),
        )


# -- induction ----------------------------------------------------------------

def _best_lz_split(X: np.ndarray, y: np.ndarray, labels: list[int], use_distance: bool):
    targets = [np.asarray(y == lab, dtype=np.uint8).tobytes() for lab in labels]
    target_grammars = [lz_grammar(t) for t in targets] if use_distance else None
    best = None
    for f in range(X.shape[1]):
        col = X[:, f]
        for t in np.unique(col)[1:]:
            fseq = (col >= t).astype(np.uint8).tobytes()
            fgram = lz_grammar(fseq) if use_distance else None
            for k, lab in enumerate(labels):
                if use_distance:
                    score = lz_distance(fgram, target_grammars[k])
                else:
                    score = lz_penalty(fseq, targets[k])
                if best is None or score < best[0]:
                    best = (score, f, float(t), lab)
    return best


def _best_gini_split(X: np.ndarray, y: np.ndarray, labels: list[int]):
    n = len(y)
    onehot = (y[:, None] == np.asarray(labels)[None, :]).astype(float)
    total = onehot.sum(axis=0)
    best = None
    for f in range(X.shape[1]):
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        sorted_col = col[order]
        cum = np.vstack([np.zeros(len(labels)), np.cumsum(onehot[order], axis=0)])
        for t in np.unique(col)[1:]:
            n_left = int(np.searchsorted(sorted_col, t, side="left"))
            left = cum[n_left]
            right = total - left
            n_right = n - n_left
            score = (n_left - float(left @ left) / n_left + n_right - float(right @ right) / n_right) / n
            if best is None or score < best[0]:
                best = (score, f, float(t), None)
    return best


def _majority(counts: list[int], labels: list[int]) -> int:
    # labels are sorted ascending, so argmax's first hit is the lowest class id
    return labels[int(np.argmax(counts))]


def fit(
    data: LabeledDataset,
    criterion: Criterion | str = Criterion.CAUSAL,
    max_depth: int | None = None,
    min_samples: int = 1,
    seed: int = 0,
) -> DecisionTree:
    """Grow a tree greedily.

    At each node the split minimizing the criterion is chosen over
    (feature, threshold, label) for the LZ criteria, or (feature, threshold)
    for Gini. Labels are the classes present at the node. Ties go to the
    first candidate in feature, threshold, label order. A node becomes a leaf
    when it is pure, at ``max_depth``, holds fewer than ``min_samples`` rows,
    or has no threshold that leaves both children non-empty.

    ``seed`` is recorded with the tree; induction itself has no randomness.
    """
    criterion = Criterion(criterion)
    if data.n_rows == 0:
        raise ValueError("cannot fit a tree on an empty dataset")
    if min_samples < 1:
        raise ValueError(f"min_samples must be >= 1, got {min_samples}")
    if max_depth is not None and max_depth < 0:
        raise ValueError(f"max_depth must be >= 0, got {max_depth}")
    labels = list(data.class_labels)

    def grow(rows: np.ndarray, depth: int) -> Node:
        X = data.features[rows]
        y = data.targets[rows]
        counts = [int(np.sum(y == c)) for c in labels]
        node = Node(depth=depth, n_samples=len(rows), prediction=_majority(counts, labels),
                    class_counts=counts)
        present = [c for c, k in zip(labels, counts) if k]
        if len(present) <= 1 or len(rows) < min_samples:
            return node
        if max_depth is not None and depth >= max_depth:
            return node
        if criterion is Criterion.GINI:
            best = _best_gini_split(X, y, labels)
        else:
            best = _best_lz_split(X, y, present, criterion is Criterion.DISTANCE)
        if best is None:
            return node
        score, f, t, lab = best
        go_left = X[:, f] < t
        node.feature, node.threshold, node.score, node.label = f, t, float(score), lab
        node.left = grow(rows[go_left], depth + 1)
        node.right = grow(rows[~go_left], depth + 1)
        return node

    root = grow(np.arange(data.n_rows), 0)
    return DecisionTree(
        root=root,
        criterion=criterion,
        class_labels=labels,
        feature_names=list(data.feature_names),
        max_depth=max_depth,
        min_samples=min_samples,
        seed=seed,
        dataset_name=data.name,
    )


def predict(tree: DecisionTree, row: Sequence[float]) -> int:
    return tree.predict_row(row)


# -- feature ranking ----------------------------------------------------------

@dataclass
class CausalStrengthRanking:
    """Per-feature causal strength from a fitted tree.

    ``raw`` holds the sum of ``2**-depth`` over the split nodes using each
    feature; ``scores`` is ``raw`` normalized to sum 1 (all zeros for a tree
    without splits).
    """

    feature_names: list[str]
    raw: list[float]
    scores: list[float] = field(default_factory=list)

    def ranking(self, include_unused: bool = False) -> list[tuple[str, float]]:
        pairs = [(name, s) for name, s in zip(self.feature_names, self.scores)
                 if include_unused or s > 0]
        return sorted(pairs, key=lambda p: -p[1])

    def to_dict(self) -> dict:
        return {"feature_names": list(self.feature_names), "raw": list(self.raw),
                "scores": list(self.scores)}

    @classmethod
    def from_dict(cls, d: dict) -> "CausalStrengthRanking":
        return cls(list(d["feature_names"]), [float(v) for v in d["raw"]],
                   [float(v) for v in d["scores"]])


def causal_strength(tree: DecisionTree) -> CausalStrengthRanking:
    raw = [0.0] * tree.n_features
    for node in tree.nodes():
        if not node.is_leaf:
            raw[node.feature] += math.ldexp(1.0, -node.depth)
    total = math.fsum(raw)
    scores = [r / total for r in raw] if total > 0 else list(raw)
    return CausalStrengthRanking(list(tree.feature_names), raw, scores)
