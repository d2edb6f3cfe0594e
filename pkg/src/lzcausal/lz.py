"""Lempel-Ziv grammars, the lockstep penalty and the grammar distance.

Sequences are handled as ``str`` or ``bytes``. A ``str`` keeps its
characters as symbols (handy for literals such as ``"101110"``); every other
input (lists, tuples, numpy arrays, :class:`SymbolSequence`) is turned into
``bytes`` so each small-integer symbol is one byte. Phrases in a grammar have
the same type as the coerced input.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "Direction",
    "PenaltyReport",
    "SymbolSequence",
    "causality_report",
    "lz_distance",
    "lz_grammar",
    "lz_parse",
    "lz_penalty",
]


@dataclass(frozen=True)
class SymbolSequence:
    """Ordered symbols over ``range(alphabet_size)``."""

    symbols: bytes
    alphabet_size: int

    def __post_init__(self):
        if self.alphabet_size < 1 or self.alphabet_size > 256:
            raise ValueError(f"alphabet_size must be in [1, 256], got {self.alphabet_size}")
        if self.symbols and max(self.symbols) >= self.alphabet_size:
            raise ValueError(
                f"symbol {max(self.symbols)} outside alphabet of size {self.alphabet_size}"
            )

    @classmethod
    def from_iterable(cls, values: Iterable[int], alphabet_size: int | None = None) -> "SymbolSequence":
        symbols = bytes(int(v) for v in values)
        if alphabet_size is None:
            alphabet_size = max(2, max(symbols) + 1) if symbols else 2
        return cls(symbols, alphabet_size)

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __str__(self) -> str:
        if self.alphabet_size <= 10:
            return "".join(str(s) for s in self.symbols)
        return " ".join(str(s) for s in self.symbols)


Symbols = Union[str, bytes, SymbolSequence, Sequence[int], np.ndarray]


def _coerce(seq: Symbols) -> str | bytes:
    if isinstance(seq, (str, bytes)):
        return seq
    if isinstance(seq, SymbolSequence):
        return seq.symbols
    if isinstance(seq, np.ndarray):
        return np.asarray(seq, dtype=np.uint8).tobytes()
    return bytes(seq)


def _next_phrase(seq, start: int, grammar: set) -> int:
    # Shortest phrase starting at `start` not yet in `grammar`; may hit the end.
    stop = start + 1
    while seq[start:stop] in grammar and stop < len(seq):
        stop += 1
    return stop


def lz_parse(x: Symbols) -> list:
    """Phrases of ``x`` in parse order.

    Only the last phrase can repeat an earlier one (the input ran out while
    extending it). Joining the phrases gives back ``x``.
    """
    x = _coerce(x)
    grammar: set = set()
    phrases = []
    i = 0
    while i < len(x):
        j = _next_phrase(x, i, grammar)
        phrases.append(x[i:j])
        grammar.add(x[i:j])
        i = j
    return phrases


def lz_grammar(x: Symbols) -> frozenset:
    """Set of distinct LZ phrases of ``x``.

    >>> sorted(lz_grammar("101110"))
    ['0', '1', '10', '11']
    """
    return frozenset(lz_parse(x))


def lz_penalty(x: Symbols, y: Symbols) -> int:
    """Penalty of explaining ``y`` with the grammar of ``x`` built in real time.

    Both sequences are parsed in lockstep. Each round first adds the next
    phrase of ``x`` (until ``x`` runs out, after which its grammar is frozen),
    then parses the next phrase of ``y``. A new ``y`` phrase that is already
    in the grammar of ``x`` counts as an overlap. The result is
    ``|G_y| - overlap``, between 0 and ``|G_y|``.

    A terminal ``y`` phrase that repeats an earlier ``y`` phrase adds nothing
    to ``G_y`` and is not counted as overlap either.
    """
    x = _coerce(x)
    y = _coerce(y)
    gx: set = set()
    gy: set = set()
    ix = iy = 0
    overlap = 0
    while iy < len(y):
        if ix < len(x):
            jx = _next_phrase(x, ix, gx)
            gx.add(x[ix:jx])
            ix = jx
        jy = _next_phrase(y, iy, gy)
        phrase = y[iy:jy]
        if phrase not in gy:
            if phrase in gx:
                overlap += 1
            gy.add(phrase)
        iy = jy
    return len(gy) - overlap


def lz_distance(gx: Iterable, gy: Iterable) -> int:
    """Size of the symmetric difference of two grammars. A metric on sets."""
    gx = gx if isinstance(gx, (set, frozenset)) else set(gx)
    gy = gy if isinstance(gy, (set, frozenset)) else set(gy)
    return len(gx - gy) + len(gy - gx)


class Direction(str, Enum):
    X_TO_Y = "XtoY"
    Y_TO_X = "YtoX"
    TIE = "Tie"


@dataclass(frozen=True)
class PenaltyReport:
    """Both directional penalties and the direction they imply.

    ``direction`` is the outcome after tie breaking; ``tie_broken_by_coin``
    tells whether a coin flip produced it (the raw comparison was a tie).
    """

    penalty_x_to_y: int
    penalty_y_to_x: int
    direction: Direction
    strength: int
    tie_broken_by_coin: bool

    @property
    def raw_direction(self) -> Direction:
        return Direction.TIE if self.tie_broken_by_coin else self.direction

    def to_dict(self) -> dict:
        return {
            "penalty_x_to_y": self.penalty_x_to_y,
            "penalty_y_to_x": self.penalty_y_to_x,
            "direction": self.direction.value,
            "raw_direction": self.raw_direction.value,
            "strength": self.strength,
            "tie_broken_by_coin": self.tie_broken_by_coin,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PenaltyReport":
        return cls(
            penalty_x_to_y=int(d["penalty_x_to_y"]),
            penalty_y_to_x=int(d["penalty_y_to_x"]),
            direction=Direction(d["direction"]),
            strength=int(d["strength"]),
            tie_broken_by_coin=bool(d["tie_broken_by_coin"]),
        )


def causality_report(x: Symbols, y: Symbols, rng_seed: int | None = 0) -> PenaltyReport:
    """Infer the causal direction between ``x`` and ``y``.

    The lower penalty wins: ``lz_penalty(x, y) < lz_penalty(y, x)`` means
    ``x`` causes ``y``. Equal penalties are settled by a fair coin seeded
    with ``rng_seed``.
    """
    p_xy = lz_penalty(x, y)
    p_yx = lz_penalty(y, x)
    coin = False
    if p_xy < p_yx:
        direction = Direction.X_TO_Y
    elif p_yx < p_xy:
        direction = Direction.Y_TO_X
    else:
        coin = True
        direction = random.Random(rng_seed).choice((Direction.X_TO_Y, Direction.Y_TO_X))
    return PenaltyReport(p_xy, p_yx, direction, abs(p_xy - p_yx), coin)
