"""Synthetic coupled systems: AR(p) pairs, master-slave logistic maps and
the AR classification dataset.

In every generator ``Y`` is the driver and ``X`` the driven series.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .data import LabeledDataset
from .symbolize import BinningSpec, equiwidth_bin

__all__ = [
    "ARConfig",
    "LogisticConfig",
    "gen_ar_classification",
    "gen_coupled_ar",
    "gen_coupled_logistic",
    "simulate_coupled_ar",
]


@dataclass(frozen=True)
class ARConfig:
    p: int = 1
    a: float = 0.9
    b: float = 0.9
    eta: float = 0.5
    noise: float = 0.03
    total_steps: int = 2500
    transient_steps: int = 500
    seed: int = 0
    x0: float = 0.0
    y0: float = 0.0

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"lag p must be >= 1, got {self.p}")
        if self.total_steps < 1:
            raise ValueError("total_steps must be positive")
        if not 0 <= self.transient_steps < self.total_steps:
            raise ValueError(
                f"transient_steps ({self.transient_steps}) must be in [0, total_steps={self.total_steps})"
            )
        if self.p >= self.total_steps:
            raise ValueError(f"lag p={self.p} must be below total_steps={self.total_steps}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must be in [0, 1], got {self.eta}")
        if self.noise < 0:
            raise ValueError(f"noise intensity must be non-negative, got {self.noise}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class LogisticConfig:
    A1: float = 4.0
    A2: float = 3.82
    eta: float = 0.1
    total_steps: int = 2500
    transient_steps: int = 500
    seed: int = 0
    x0: float | None = None
    y0: float | None = None

    def __post_init__(self):
        if self.total_steps < 1:
            raise ValueError("total_steps must be positive")
        if not 0 <= self.transient_steps < self.total_steps:
            raise ValueError(
                f"transient_steps ({self.transient_steps}) must be in [0, total_steps={self.total_steps})"
            )
        for name in ("A1", "A2"):
            value = getattr(self, name)
            if not 0.0 < value <= 4.0:
                raise ValueError(f"{name} must be in (0, 4], got {value}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must be in [0, 1], got {self.eta}")
        for name in ("x0", "y0"):
            value = getattr(self, name)
            if value is not None and not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {value}")

    def to_dict(self) -> dict:
        return asdict(self)


def simulate_coupled_ar(cfg: ARConfig, noise_x: np.ndarray, noise_y: np.ndarray):
    """Run the AR recursion on given standard-normal draws (no transient cut).

    ``noise_x[t]``/``noise_y[t]`` drive step ``t``; index 0 is unused since
    ``X(0)``/``Y(0)`` are the initial values. ``Y(t - p)`` before time 0 is 0.
    """
    n = cfg.total_steps
    x = np.empty(n)
    y = np.empty(n)
    x[0], y[0] = cfg.x0, cfg.y0
    ex = cfg.noise * np.asarray(noise_x, dtype=float)
    ey = cfg.noise * np.asarray(noise_y, dtype=float)
    for t in range(1, n):
        y[t] = cfg.b * y[t - 1] + ey[t]
        lagged = y[t - cfg.p] if t >= cfg.p else 0.0
        x[t] = cfg.a * x[t - 1] + cfg.eta * lagged + ex[t]
    return x, y


def _streams(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def gen_coupled_ar(cfg: ARConfig) -> tuple[np.ndarray, np.ndarray]:
    """Coupled AR(p) pair ``(X, Y)`` with ``Y`` driving ``X`` at lag ``p``.

    The two noise terms come from independent child streams of ``cfg.seed``.
    Returns ``total_steps - transient_steps`` samples of each series.
    """
    rng_x, rng_y = _streams(cfg.seed, 2)
    noise_x = rng_x.standard_normal(cfg.total_steps)
    noise_y = rng_y.standard_normal(cfg.total_steps)
    x, y = simulate_coupled_ar(cfg, noise_x, noise_y)
    return x[cfg.transient_steps:], y[cfg.transient_steps:]


def _random_start(rng: np.random.Generator, A: float) -> float:
    fixed = 1.0 - 1.0 / A
    while True:
        v = rng.uniform(0.0, 1.0)
        if v > 0.0 and abs(v - fixed) > 1e-9:
            return float(v)


def gen_coupled_logistic(cfg: LogisticConfig) -> tuple[np.ndarray, np.ndarray]:
    """Master-slave logistic maps.

    ``Y(t) = A1 Y(t-1)(1 - Y(t-1))`` and
    ``X(t) = (1 - eta) A2 X(t-1)(1 - X(t-1)) + eta Y(t-1)``.
    Unpinned initial values are drawn uniformly from (0, 1), avoiding the
    map's fixed points.
    """
    rng = np.random.default_rng(cfg.seed)
    y0 = cfg.y0 if cfg.y0 is not None else _random_start(rng, cfg.A1)
    x0 = cfg.x0 if cfg.x0 is not None else _random_start(rng, cfg.A2)
    n = cfg.total_steps
    x = np.empty(n)
    y = np.empty(n)
    x[0], y[0] = x0, y0
    for t in range(1, n):
        y[t] = cfg.A1 * y[t - 1] * (1.0 - y[t - 1])
        x[t] = (1.0 - cfg.eta) * cfg.A2 * x[t - 1] * (1.0 - x[t - 1]) + cfg.eta * y[t - 1]
    return x[cfg.transient_steps:], y[cfg.transient_steps:]


def gen_ar_classification(seed: int = 0, noise: float = 0.03, n_bins: int = 2) -> LabeledDataset:
    """AR(1) classification set: feature ``Y``, target ``X`` binned into classes.

    450 steps with a = b = 0.8, eta = 0.7 from X(0) = Y(0) = 0; the first 150
    are dropped, leaving 300 rows in time order.
    """
    cfg = ARConfig(p=1, a=0.8, b=0.8, eta=0.7, noise=noise,
                   total_steps=450, transient_steps=150, seed=seed)
    x, y = gen_coupled_ar(cfg)
    target = np.frombuffer(equiwidth_bin(x, BinningSpec(n_bins)).symbols, dtype=np.uint8)
    return LabeledDataset(
        features=y[:, None],
        targets=target.astype(int),
        feature_names=["Y"],
        class_labels=list(range(n_bins)),
        name="ar",
    )
