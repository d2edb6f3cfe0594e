from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["LabeledDataset"]


@dataclass
class LabeledDataset:
    """Feature matrix plus integer class targets.

    Row order is meaningful: the LZ split criteria read columns as sequences.
    ``class_names`` optionally maps a class id to its original token and
    ``encodings`` keeps the token -> code maps of categorical feature columns.
    """

    features: np.ndarray
    targets: np.ndarray
    feature_names: list[str]
    class_labels: list[int]
    name: str = ""
    class_names: dict[int, str] = field(default_factory=dict)
    encodings: dict[str, dict] = field(default_factory=dict)
    n_dropped: int = 0

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        if self.features.ndim == 1:
            self.features = self.features[:, None]
        self.targets = np.asarray(self.targets, dtype=int)
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-d matrix")
        if len(self.targets) != len(self.features):
            raise ValueError(
                f"{len(self.features)} feature rows but {len(self.targets)} targets"
            )
        if len(self.feature_names) != self.features.shape[1]:
            raise ValueError(
                f"{self.features.shape[1]} feature columns but "
                f"{len(self.feature_names)} names"
            )
        self.class_labels = sorted(int(c) for c in self.class_labels)
        unknown = set(self.targets.tolist()) - set(self.class_labels)
        if unknown:
            raise ValueError(f"targets {sorted(unknown)} not among class_labels")

    @property
    def n_rows(self) -> int:
        return len(self.targets)

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, rows) -> "LabeledDataset":
        """Rows ``rows`` (in the given order); metadata is shared."""
        rows = np.asarray(rows, dtype=int)
        return LabeledDataset(
            features=self.features[rows],
            targets=self.targets[rows],
            feature_names=list(self.feature_names),
            class_labels=list(self.class_labels),
            name=self.name,
            class_names=dict(self.class_names),
            encodings=self.encodings,
        )

    def class_counts(self) -> dict[int, int]:
        return {c: int(np.sum(self.targets == c)) for c in self.class_labels}
