"""Turning real-valued series and table columns into symbol sequences."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .lz import SymbolSequence

__all__ = [
    "BinningSpec",
    "binarize_feature",
    "binarize_target",
    "encode_categorical",
    "equiwidth_bin",
]


@dataclass(frozen=True)
class BinningSpec:
    """Equi-width bins. ``lo``/``hi`` default to the data range."""

    n_bins: int = 2
    lo: float | None = None
    hi: float | None = None

    def __post_init__(self):
        if self.n_bins < 2:
            raise ValueError(f"n_bins must be >= 2, got {self.n_bins}")
        if self.n_bins > 256:
            raise ValueError(f"n_bins must be <= 256, got {self.n_bins}")
        if self.lo is not None and self.hi is not None and not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got lo={self.lo} hi={self.hi}")


def equiwidth_bin(series: Sequence[float], spec: BinningSpec | int = 2) -> SymbolSequence:
    """Map each value to its equi-width bin index.

    Bin ``k`` covers ``[lo + k*w, lo + (k+1)*w)``; ``hi`` itself goes to the
    last bin and values outside ``[lo, hi]`` are clipped to the end bins. A
    constant series (zero width) maps entirely to bin 0.
    """
    if isinstance(spec, int):
        spec = BinningSpec(spec)
    values = np.asarray(series, dtype=float)
    if values.size == 0:
        raise ValueError("cannot bin an empty series")
    lo = float(values.min()) if spec.lo is None else spec.lo
    hi = float(values.max()) if spec.hi is None else spec.hi
    if not hi > lo:
        return SymbolSequence(bytes(values.size), spec.n_bins)
    width = (hi - lo) / spec.n_bins
    codes = np.floor((values - lo) / width)
    codes = np.clip(codes, 0, spec.n_bins - 1).astype(np.uint8)
    return SymbolSequence(codes.tobytes(), spec.n_bins)


def binarize_feature(column: Sequence[float], threshold: float) -> SymbolSequence:
    """1 where ``value >= threshold``, else 0."""
    values = np.asarray(column, dtype=float)
    return SymbolSequence((values >= threshold).astype(np.uint8).tobytes(), 2)


def binarize_target(labels: Sequence[Hashable], positive_label: Hashable) -> SymbolSequence:
    """One-vs-rest indicator of ``positive_label``."""
    return SymbolSequence(bytes(1 if v == positive_label else 0 for v in labels), 2)


def encode_categorical(column: Sequence[Hashable]) -> tuple[list[float], dict]:
    """Ordinal codes by first appearance, plus the token -> code map."""
    mapping: dict = {}
    codes = []
    for token in column:
        if token not in mapping:
            mapping[token] = len(mapping)
        codes.append(float(mapping[token]))
    return codes, mapping
