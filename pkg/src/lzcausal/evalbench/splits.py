"""Train/test splitting and cross-validation folds."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from ..data import LabeledDataset

__all__ = ["CVKind", "CVScheme", "split_train_test", "stratified_kfold", "timeseries_split"]


def split_train_test(data: LabeledDataset, ratio: float = 0.8, ordered: bool = True,
                     seed: int = 0) -> tuple[LabeledDataset, LabeledDataset]:
    """Hold out ``1 - ratio`` of the rows.

    ``ordered`` keeps the leading rows for training (temporal data); otherwise
    rows are shuffled with ``seed`` first. Each side keeps its rows in the
    order they were drawn. The test side gets ``ceil(n * (1 - ratio))`` rows,
    so 297 rows at 0.8 split 237/60.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    n = data.n_rows
    # round() first so 150 * 0.2 does not ceil to 31 through float error.
    n_train = n - math.ceil(round(n * (1.0 - ratio), 9))
    if n_train == 0 or n_train == n:
        raise ValueError(f"a {ratio} split of {n} rows leaves one side empty")
    rows = np.arange(n) if ordered else np.random.default_rng(seed).permutation(n)
    return data.subset(rows[:n_train]), data.subset(rows[n_train:])


class CVKind(str, Enum):
    STRATIFIED = "stratified"
    TIMESERIES = "timeseries"


@dataclass(frozen=True)
class CVScheme:
    kind: CVKind = CVKind.STRATIFIED
    k: int = 5
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", CVKind(self.kind))
        if self.k < 2:
            raise ValueError(f"need at least 2 folds, got {self.k}")

    def folds(self, targets) -> list[tuple[np.ndarray, np.ndarray]]:
        if self.kind is CVKind.STRATIFIED:
            return stratified_kfold(targets, self.k, self.seed)
        return timeseries_split(len(targets), self.k)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        return d


def stratified_kfold(targets, k: int = 5, seed: int = 0) -> list[tuple[np.ndarray, np.ndarray]]:
    """Shuffled stratified folds as ``(train_idx, val_idx)`` pairs.

    Each class's rows are shuffled and dealt round-robin across folds,
    continuing where the previous class stopped, so per-fold class counts are
    within one of ``count / k`` and fold sizes within one of each other.
    """
    targets = np.asarray(targets)
    n = len(targets)
    if n < k:
        raise ValueError(f"cannot make {k} folds from {n} rows")
    rng = np.random.default_rng(seed)
    assignment = np.empty(n, dtype=int)
    offset = 0
    for cls in np.unique(targets):
        idx = rng.permutation(np.flatnonzero(targets == cls))
        assignment[idx] = (offset + np.arange(len(idx))) % k
        offset = (offset + len(idx)) % k
    folds = []
    for i in range(k):
        val = np.flatnonzero(assignment == i)
        train = np.flatnonzero(assignment != i)
        folds.append((train, val))
    return folds


def timeseries_split(n: int, k: int = 5) -> list[tuple[np.ndarray, np.ndarray]]:
    """Expanding-window folds: ``k + 1`` contiguous blocks, fold ``i`` trains
    on blocks ``0..i`` and validates on block ``i + 1``."""
    if n < k + 1:
        raise ValueError(f"cannot make {k} time-series folds from {n} rows")
    blocks = np.array_split(np.arange(n), k + 1)
    return [(np.concatenate(blocks[: i + 1]), blocks[i + 1]) for i in range(k)]
