"""Rain-occurrence seasonality and season-level totals.

Occurrence is a zero-order Markov chain: the probability that day-of-year
``d`` is wet is ``expit(b0 + sum_h a_h sin(2 pi h d / T) + b_h cos(2 pi h d / T))``
with ``T = 365.25``, fitted by logistic regression on the wet/dry indicator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .core import WET_THRESHOLD, DailySeries, day_of_year, season_year
from .numerics.logistic import irls_logistic

PERIOD = 365.25
DEFAULT_HARMONICS = 2
MAX_MISSING_FRACTION = 0.10


def fourier_design(doy, harmonics: int) -> np.ndarray:
    """Columns ``[1, sin(w d), cos(w d), sin(2 w d), cos(2 w d), ...]``."""
    d = np.asarray(doy, dtype=float).ravel()
    cols = [np.ones_like(d)]
    for h in range(1, harmonics + 1):
        w = 2.0 * np.pi * h * d / PERIOD
        cols += [np.sin(w), np.cos(w)]
    return np.column_stack(cols)


@dataclass(frozen=True)
class OccurrenceModel:
    coef: np.ndarray
    threshold: float = WET_THRESHOLD

    @property
    def harmonics(self) -> int:
        return (self.coef.size - 1) // 2

    def __call__(self, doy):
        return occurrence_curve(self, doy)


def fit_occurrence(series: DailySeries, threshold: float = WET_THRESHOLD,
                   harmonics: int = DEFAULT_HARMONICS) -> OccurrenceModel:
    if not 1 <= harmonics <= 4:
        raise ValueError("harmonics must be between 1 and 4")
    ok = series.valid
    if ok.sum() < 2 * 365:
        raise ValueError(f"{series.station_id}: need at least two years of data")
    X = fourier_design(day_of_year(series.dates[ok]), harmonics)
    y = (series.values[ok] >= threshold).astype(float)
    return OccurrenceModel(irls_logistic(X, y), float(threshold))


def occurrence_curve(model: OccurrenceModel, doy=None):
    """Wet-day probability at ``doy`` (default: every day 1..366)."""
    if doy is None:
        doy = np.arange(1, 367)
    p = expit(fourier_design(doy, model.harmonics) @ model.coef)
    return float(p[0]) if np.ndim(doy) == 0 else p


@dataclass(frozen=True)
class AnnualStats:
    season: np.ndarray
    rainy_days: np.ndarray
    total_mm: np.ndarray
    mean_per_rainy_day: np.ndarray   # NaN when there are no rainy days

    def __len__(self) -> int:
        return self.season.size


def _season_length(label: int, start_month: int) -> int:
    start = np.datetime64(f"{label:04d}-{start_month:02d}-01")
    end = np.datetime64(f"{label + 1:04d}-{start_month:02d}-01")
    return int((end - start).astype(int))


def annual_stats(series: DailySeries, threshold: float = WET_THRESHOLD,
                 season_start_month: int = 1,
                 max_missing: float = MAX_MISSING_FRACTION) -> AnnualStats:
    """Rainy-day count, total and mean rain per rainy day for each season.

    Seasons missing more than ``max_missing`` of their days (absent dates or
    NaN values) are dropped.
    """
    ok = series.valid
    labels = season_year(series.dates[ok], season_start_month)
    vals = series.values[ok]
    seasons, counts, totals, means = [], [], [], []
    for lab in np.unique(labels):
        v = vals[labels == lab]
        if v.size < (1.0 - max_missing) * _season_length(int(lab), season_start_month):
            continue
        wet = v >= threshold
        c = int(wet.sum())
        total = float(v.sum())
        seasons.append(int(lab))
        counts.append(c)
        totals.append(total)
        means.append(total / c if c else np.nan)
    return AnnualStats(np.array(seasons, dtype=int), np.array(counts, dtype=int),
                       np.array(totals, dtype=float), np.array(means, dtype=float))
