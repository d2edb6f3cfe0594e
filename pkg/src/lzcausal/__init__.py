"""Lempel-Ziv penalty causality, grammar distance and LZ-criterion decision trees."""

from .data import LabeledDataset
from .lz import (
    Direction,
    PenaltyReport,
    SymbolSequence,
    causality_report,
    lz_distance,
    lz_grammar,
    lz_parse,
    lz_penalty,
)
from .tree import Criterion, DecisionTree, causal_strength, fit, predict

__version__ = "0.1.0"

__all__ = [
    "Criterion",
    "DecisionTree",
    "Direction",
    "LabeledDataset",
    "PenaltyReport",
    "SymbolSequence",
    "causal_strength",
    "causality_report",
    "fit",
    "lz_distance",
    "lz_grammar",
    "lz_parse",
    "lz_penalty",
    "predict",
]
