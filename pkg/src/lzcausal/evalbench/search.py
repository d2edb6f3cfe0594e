from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial

import numpy as np

from ..data import LabeledDataset
from ..parallel import parallel_map
from ..tree import Criterion, fit
from .metrics import compute_metrics
from .splits import CVScheme

__all__ = ["GridSearchResult", "grid_search", "MIN_SAMPLES_GRID", "MAX_DEPTH_GRID"]

MIN_SAMPLES_GRID = tuple(range(1, 11))
MAX_DEPTH_GRID = tuple(range(1, 21))


@dataclass
class GridSearchResult:
    criterion: str
    scheme: dict
    best_min_samples: int
    best_max_depth: int
    best_mean_f1: float
    cells: list[dict] = field(default_factory=list)

    def cell(self, min_samples: int, max_depth: int) -> dict:
        for c in self.cells:
            if c["min_samples"] == min_samples and c["max_depth"] == max_depth:
                return c
        raise KeyError((min_samples, max_depth))

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "scheme": dict(self.scheme),
            "best_min_samples": self.best_min_samples,
            "best_max_depth": self.best_max_depth,
            "best_mean_f1": self.best_mean_f1,
            "cells": [dict(c) for c in self.cells],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GridSearchResult":
        return cls(
            criterion=str(d["criterion"]),
            scheme=dict(d["scheme"]),
            best_min_samples=int(d["best_min_samples"]),
            best_max_depth=int(d["best_max_depth"]),
            best_mean_f1=float(d["best_mean_f1"]),
            cells=[{"min_samples": int(c["min_samples"]), "max_depth": int(c["max_depth"]),
                    "mean_f1": float(c["mean_f1"]), "var_f1": float(c["var_f1"])}
                   for c in d["cells"]],
        )


def _fold_scores(fold, data, criterion, min_samples_grid, max_depth_grid):
    train_idx, val_idx = fold
    # Split choice never depends on the limits, so one loose tree per fold
    # can be cut back to every grid cell.
    full = fit(data.subset(train_idx), criterion,
               max_depth=max(max_depth_grid), min_samples=min(min_samples_grid))
    val = data.subset(val_idx)
    scores = {}
    for ms in min_samples_grid:
        for md in max_depth_grid:
            pred = full.truncated(md, ms).predict(val.features)
            scores[(ms, md)] = compute_metrics(val.targets, pred).macro_f1
    return scores


def grid_search(
    data: LabeledDataset,
    criterion: Criterion | str,
    scheme: CVScheme = CVScheme(),
    min_samples_grid=MIN_SAMPLES_GRID,
    max_depth_grid=MAX_DEPTH_GRID,
    jobs: int = 1,
) -> GridSearchResult:
    """Cross-validated macro-F1 over a (min_samples, max_depth) grid.

    The best cell has the highest mean fold F1; ties go to the smaller
    ``max_depth``, then the smaller ``min_samples``. Variances are population
    variances over folds.
    """
    criterion = Criterion(criterion)
    folds = scheme.folds(data.targets)
    if any(len(tr) == 0 or len(va) == 0 for tr, va in folds):
        raise ValueError(f"{data.n_rows} rows are too few for {scheme.k} folds")
    work = partial(_fold_scores, data=data, criterion=criterion,
                   min_samples_grid=tuple(min_samples_grid), max_depth_grid=tuple(max_depth_grid))
    per_fold = parallel_map(work, folds, jobs)

    cells = []
    best = None
    for md in sorted(max_depth_grid):
        for ms in sorted(min_samples_grid):
            values = np.array([s[(ms, md)] for s in per_fold])
            mean, var = float(values.mean()), float(values.var())
            cells.append({"min_samples": ms, "max_depth": md, "mean_f1": mean, "var_f1": var})
            if best is None or mean > best[0]:
                best = (mean, ms, md)
    cells.sort(key=lambda c: (c["min_samples"], c["max_depth"]))
    return GridSearchResult(
        criterion=criterion.value,
        scheme=scheme.to_dict(),
        best_min_samples=best[1],
        best_max_depth=best[2],
        best_mean_f1=best[0],
        cells=cells,
    )
