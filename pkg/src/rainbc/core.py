"""Series containers and calendar helpers shared by every corrector.

Missing values are carried as NaN inside float arrays. Sentinels such as
-99 are translated at ingestion and never reach these types.
"""

from __future__ import annotations

import datetime as dt
import enum
from dataclasses import dataclass, field
from itertools import pairwise

import numpy as np

WET_THRESHOLD = 0.85
DEFAULT_SPLIT = np.datetime64("2001-01-01", "D")


class AlignmentError(ValueError):
    pass


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_date(value) -> np.datetime64:
    """Coerce a date-like (str, datetime.date, datetime64) to ``datetime64[D]``."""
    return np.datetime64(value, "D")


@dataclass(frozen=True)
class DailySeries:
    """Daily rainfall (mm/day) for one station.

    ``dates`` are strictly increasing ``datetime64[D]``; ``values`` is a float
    array of the same length where NaN marks a missing day.
    """

    station_id: str
    dates: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        dates = np.array(self.dates, dtype="datetime64[D]").ravel()
        values = np.array(self.values, dtype=float).ravel()
        if dates.shape != values.shape:
            raise ValueError(
                f"{self.station_id}: {dates.size} dates but {values.size} values"
            )
        if dates.size > 1 and not np.all(np.diff(dates) > np.timedelta64(0, "D")):
            raise ValueError(f"{self.station_id}: dates must be strictly increasing")
        if np.any(values[~np.isnan(values)] < 0):
            raise ValueError(f"{self.station_id}: negative rainfall value")
        object.__setattr__(self, "dates", _readonly(dates))
        object.__setattr__(self, "values", _readonly(values))

    def __len__(self) -> int:
        return self.dates.size

    def __eq__(self, other):
        if not isinstance(other, DailySeries):
            return NotImplemented
        return (
            self.station_id == other.station_id
            and np.array_equal(self.dates, other.dates)
            and np.array_equal(self.values, other.values, equal_nan=True)
        )

    __hash__ = None

    @property
    def months(self) -> np.ndarray:
        return month_of(self.dates)

    @property
    def valid(self) -> np.ndarray:
        return ~np.isnan(self.values)

    def select(self, mask: np.ndarray) -> DailySeries:
        return DailySeries(self.station_id, self.dates[mask], self.values[mask])

    def with_values(self, values: np.ndarray) -> DailySeries:
        return DailySeries(self.station_id, self.dates, values)

    def lagged(self) -> np.ndarray:
        """Previous-day values; 0 where the previous calendar day is absent."""
        prev = np.zeros(self.values.shape)
        if self.dates.size > 1:
            contiguous = np.diff(self.dates) == np.timedelta64(1, "D")
            prev[1:] = np.where(contiguous, self.values[:-1], 0.0)
        return np.nan_to_num(prev, nan=0.0)


@dataclass(frozen=True)
class PairedSeries:
    """Gauge and SRE series on identical, fully valid dates, split into train/test."""

    gauge: DailySeries
    sre: DailySeries
    split_date: np.datetime64 = field(default=DEFAULT_SPLIT)

    def __post_init__(self):
        object.__setattr__(self, "split_date", as_date(self.split_date))
        if not np.array_equal(self.gauge.dates, self.sre.dates):
            raise AlignmentError("gauge and SRE dates differ; use align()")
        if not (self.gauge.valid.all() and self.sre.valid.all()):
            raise AlignmentError("paired series may not contain missing values")

    @property
    def station_id(self) -> str:
        return self.gauge.station_id

    @property
    def dates(self) -> np.ndarray:
        return self.gauge.dates

    @property
    def train_mask(self) -> np.ndarray:
        return self.dates < self.split_date

    @property
    def test_mask(self) -> np.ndarray:
        return ~self.train_mask

    def train(self) -> PairedSeries:
        m = self.train_mask
        return PairedSeries(self.gauge.select(m), self.sre.select(m), self.split_date)

    def test(self) -> PairedSeries:
        m = self.test_mask
        return PairedSeries(self.gauge.select(m), self.sre.select(m), self.split_date)

    def check_partitions(self) -> None:
        if not self.train_mask.any():
            raise AlignmentError(f"{self.station_id}: empty training partition")
        if not self.test_mask.any():
            raise AlignmentError(f"{self.station_id}: empty test partition")


@dataclass(frozen=True)
class MonthlyThreshold:
    month: int
    t_gauge: float
    t_sre: float

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise ValueError(f"month out of range: {self.month}")
        if not self.t_gauge > 0:
            raise ValueError("gauge threshold must be positive")
        if not self.t_sre >= 0:
            raise ValueError("SRE threshold must be non-negative")


@dataclass(frozen=True)
class IntensityClass:
    lower: float
    upper: float = np.inf

    def contains(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        return (values >= self.lower) & (values < self.upper)

    def label(self) -> str:
        if np.isinf(self.upper):
            return f">={self.lower:g}"
        return f"[{self.lower:g},{self.upper:g})"


def make_classes(edges=(WET_THRESHOLD, 5.0, 20.0, 40.0)) -> tuple[IntensityClass, ...]:
    """Contiguous classes from ascending lower edges; the last one is unbounded."""
    edges = [float(e) for e in edges]
    if any(b <= a for a, b in pairwise(edges)):
        raise ValueError("class edges must be strictly increasing")
    uppers = edges[1:] + [np.inf]
    return tuple(IntensityClass(lo, hi) for lo, hi in zip(edges, uppers))


DEFAULT_CLASSES = make_classes()


def class_index(classes, values) -> np.ndarray:
    """Index of the class containing each value, -1 below the first edge."""
    lowers = np.array([c.lower for c in classes])
    idx = np.searchsorted(lowers, np.asarray(values, dtype=float), side="right") - 1
    return idx


class EventCategory(enum.Enum):
    DRY = "Dry"
    LIGHT = "Light"
    HEAVY = "Heavy"
    VIOLENT = "Violent"


HEAVY_LOWER = 25.0
VIOLENT_LOWER = 40.0


def classify_event(value: float) -> EventCategory:
    if value < 0 or np.isnan(value):
        raise ValueError(f"rainfall must be non-negative, got {value}")
    if value < WET_THRESHOLD:
        return EventCategory.DRY
    if value >= VIOLENT_LOWER:
        return EventCategory.VIOLENT
    if value >= HEAVY_LOWER:
        return EventCategory.HEAVY
    return EventCategory.LIGHT


def event_mask(values, category: EventCategory) -> np.ndarray:
    """Vectorised membership test matching :func:`classify_event`."""
    v = np.asarray(values, dtype=float)
    if category is EventCategory.DRY:
        return v < WET_THRESHOLD
    if category is EventCategory.LIGHT:
        return (v >= WET_THRESHOLD) & (v < HEAVY_LOWER)
    if category is EventCategory.HEAVY:
        return (v >= HEAVY_LOWER) & (v < VIOLENT_LOWER)
    return v >= VIOLENT_LOWER


def month_of(dates) -> np.ndarray:
    d = np.asarray(dates, dtype="datetime64[D]")
    return (d.astype("datetime64[M]").astype(int) % 12 + 1).astype(int)


def year_of(dates) -> np.ndarray:
    d = np.asarray(dates, dtype="datetime64[D]")
    return d.astype("datetime64[Y]").astype(int) + 1970


def day_of_year(dates) -> np.ndarray:
    d = np.asarray(dates, dtype="datetime64[D]")
    return (d - d.astype("datetime64[Y]")).astype(int) + 1


def season_year(date, season_start_month: int = 1):
    """Label of the season containing ``date``.

    Seasons start on the first day of ``season_start_month``; the label is the
    calendar year in which the season starts. Accepts scalars or arrays.
    """
    if not 1 <= season_start_month <= 12:
        raise ValueError("season_start_month must be in 1..12")
    if isinstance(date, (dt.date, str)):
        date = np.datetime64(date, "D")
    years = year_of(date)
    months = month_of(date)
    labels = np.where(months >= season_start_month, years, years - 1)
    return int(labels) if np.ndim(labels) == 0 else labels


def align(gauge: DailySeries, sre: DailySeries,
          split_date=DEFAULT_SPLIT) -> PairedSeries:
    """Restrict both series to dates where each has a valid value."""
    if len(gauge) == 0 or len(sre) == 0:
        raise AlignmentError("cannot align an empty series")
    common, gi, si = np.intersect1d(gauge.dates, sre.dates,
                                    assume_unique=True, return_indices=True)
    g, s = gauge.values[gi], sre.values[si]
    keep = ~(np.isnan(g) | np.isnan(s))
    if not keep.any():
        raise AlignmentError(
            f"no concurrent valid days for {gauge.station_id}/{sre.station_id}"
        )
    return PairedSeries(
        DailySeries(gauge.station_id, common[keep], g[keep]),
        DailySeries(sre.station_id, common[keep], s[keep]),
        split_date,
    )
