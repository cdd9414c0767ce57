"""CSV ingestion in the long ``station_id,date,rain_mm`` layout."""

from __future__ import annotations

import csv
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import DEFAULT_SPLIT, AlignmentError, DailySeries, align

log = logging.getLogger(__name__)

SERIES_HEADER = ("station_id", "date", "rain_mm")
STATION_HEADER = ("station_id", "lat", "lon", "country")
MISSING_TOKENS = {"", "na", "nan", "null"}


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class StationRecord:
    station_id: str
    latitude: float
    longitude: float
    country: str | None = None

    def __post_init__(self):
        if not -90 <= self.latitude <= 90:
            raise ValueError(f"{self.station_id}: latitude {self.latitude} out of range")
        if not -180 <= self.longitude <= 180:
            raise ValueError(f"{self.station_id}: longitude {self.longitude} out of range")


def _parse_value(text: str, sentinel: float | None) -> float:
    t = text.strip()
    if t.lower() in MISSING_TOKENS:
        return math.nan
    v = float(t)
    if not math.isfinite(v) or v < 0 or (sentinel is not None and v == sentinel):
        return math.nan
    return v


def read_series(path, sentinel: float | None = None) -> dict[str, DailySeries]:
    """Read one :class:`DailySeries` per station from a long-format CSV.

    Empty cells, NA tokens, negative numbers and ``sentinel`` become missing.
    Malformed rows, bad dates and duplicated (station, date) pairs raise
    :class:`IngestError` naming the line.
    """
    path = Path(path)
    rows: dict[str, list] = defaultdict(list)
    seen: set[tuple[str, str]] = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != SERIES_HEADER:
            raise IngestError(f"{path}: expected header {','.join(SERIES_HEADER)}")
        for line, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != 3:
                raise IngestError(f"{path}:{line}: expected 3 fields, got {len(rec)}")
            sid, date, value = (r.strip() for r in rec)
            if not sid:
                raise IngestError(f"{path}:{line}: empty station_id")
            try:
                day = np.datetime64(date, "D")
                if len(date) != 10:
                    raise ValueError
            except ValueError:
                raise IngestError(f"{path}:{line}: unparseable date {date!r}") from None
            if (sid, date) in seen:
                raise IngestError(f"{path}:{line}: duplicate row for {sid} on {date}")
            seen.add((sid, date))
            try:
                v = _parse_value(value, sentinel)
            except ValueError:
                raise IngestError(f"{path}:{line}: bad rainfall value {value!r}") from None
            rows[sid].append((day, v))

    out = {}
    for sid in sorted(rows):
        recs = sorted(rows[sid], key=lambda r: r[0])
        dates = np.array([r[0] for r in recs], dtype="datetime64[D]")
        values = np.array([r[1] for r in recs], dtype=float)
        out[sid] = DailySeries(sid, dates, values)
    return out


def format_value(v: float, decimals: int | None = None) -> str:
    if math.isnan(v):
        return ""
    if decimals is None:
        return repr(float(v))
    return f"{v:.{decimals}f}"


def write_series(path, series, decimals: int | None = None) -> None:
    """Write series in the ingest layout; NaN becomes an empty cell.

    With ``decimals=None`` values are written at full precision so that
    :func:`read_series` restores them exactly.
    """
    if isinstance(series, DailySeries):
        series = [series]
    elif isinstance(series, dict):
        series = list(series.values())
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_HEADER)
        for s in series:
            for d, v in zip(s.dates, s.values):
                w.writerow((s.station_id, str(d), format_value(v, decimals)))


def read_stations(path) -> dict[str, StationRecord]:
    path = Path(path)
    out = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(reader.fieldnames) < set(STATION_HEADER[:3]):
            raise IngestError(f"{path}: expected header {','.join(STATION_HEADER)}")
        for line, rec in enumerate(reader, start=2):
            try:
                out[rec["station_id"]] = StationRecord(
                    rec["station_id"], float(rec["lat"]), float(rec["lon"]),
                    rec.get("country") or None,
                )
            except (TypeError, ValueError) as exc:
                raise IngestError(f"{path}:{line}: {exc}") from None
    return out


def build_pairs(gauge, sre, split_date=DEFAULT_SPLIT, sentinel: float | None = None):
    """Pair every station present in both sources.

    ``gauge`` and ``sre`` are CSV paths or already-read ``{station: series}``
    mappings. Returns ``(pairs, skipped)`` where ``skipped`` maps station ids to
    the reason they were left out (no overlap, empty train or test partition).
    """
    if not isinstance(gauge, dict):
        gauge = read_series(gauge, sentinel)
    if not isinstance(sre, dict):
        sre = read_series(sre, sentinel)
    pairs, skipped = [], {}
    for sid in sorted(set(gauge) & set(sre)):
        try:
            pair = align(gauge[sid], sre[sid], split_date)
            pair.check_partitions()
        except AlignmentError as exc:
            log.warning("skipping station %s: %s", sid, exc)
            skipped[sid] = str(exc)
            continue
        pairs.append(pair)
    return pairs, skipped
