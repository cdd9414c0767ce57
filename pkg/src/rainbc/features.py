"""Two-feature design (same-day and previous-day SRE) shared by GPR and SVR."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DailySeries, PairedSeries

DEFAULT_CAP = 2000
MIN_CLASS_ROWS = 5


@dataclass(frozen=True)
class MinMax:
    """Min-max scaling to [0, 1]; a zero range scales by 1."""

    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def fit(cls, a) -> MinMax:
        a = np.asarray(a, dtype=float)
        return cls(np.atleast_1d(a.min(axis=0)), np.atleast_1d(a.max(axis=0)))

    @property
    def span(self) -> np.ndarray:
        s = self.hi - self.lo
        return np.where(s > 0, s, 1.0)

    def forward(self, a):
        return (np.asarray(a, dtype=float) - self.lo) / self.span

    def inverse(self, a):
        return np.asarray(a, dtype=float) * self.span + self.lo

    def to_dict(self) -> dict:
        return {"lo": self.lo.tolist(), "hi": self.hi.tolist()}

    @classmethod
    def from_dict(cls, d) -> MinMax:
        return cls(np.array(d["lo"], float), np.array(d["hi"], float))


def design(series: DailySeries) -> np.ndarray:
    """``(n, 2)`` matrix of same-day and previous-day values."""
    return np.column_stack([series.values, series.lagged()])


def training_rows(pair: PairedSeries):
    """Features and gauge targets for the training partition."""
    X = design(pair.sre)
    mask = pair.train_mask
    return X[mask], pair.gauge.values[mask]


def subsample(n: int, cap: int, rng: np.random.Generator) -> np.ndarray:
    """Sorted row indices, uniformly subsampled without replacement above ``cap``."""
    if n <= cap:
        return np.arange(n)
    return np.sort(rng.choice(n, size=cap, replace=False))


def class_seed(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))
