"""Synthetic gauge/SRE pairs with a controlled, known bias.

Gauge occurrence follows a seasonal wet-day probability curve and wet-day
amounts are gamma distributed. The SRE keeps every gauge rain day, multiplies
its amount by a fixed factor and mean-one lognormal noise, and adds extra
light-rain days on gauge-dry days so that the expected number of rain
occurrences is ``inflation`` times the gauge's.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .core import WET_THRESHOLD, DailySeries, day_of_year
from .ingest import write_series

PERIOD = 365.25


@dataclass(frozen=True)
class SynthSpec:
    n_stations: int = 20
    start_year: int = 1981
    end_year: int = 2010
    # wet-day probability p(d) = p_mean + p_amp*sin(w d + phase) + p_amp2*sin(2 w d + phase2)
    p_mean: float = 0.28
    p_amp: float = 0.17
    phase: float = 0.0
    p_amp2: float = 0.0
    phase2: float = 0.0
    gamma_shape: float = 3.0
    gamma_scale: float = 4.0
    inflation: float = 1.5
    multiplier: float = 1.3
    noise_sigma: float = 1.0
    extra_scale: float = 0.7         # inserted-day intensity relative to real SRE rain days
    station_jitter: float = 0.0      # relative spread of p_mean / gamma_scale across stations
    seed: int = 0
    prefix: str = "ST"

    def __post_init__(self):
        positive = ("inflation", "multiplier", "gamma_shape", "gamma_scale", "extra_scale")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.inflation < 1:
            raise ValueError("inflation below 1 is not supported")
        if self.noise_sigma < 0 or self.n_stations < 1 or self.end_year < self.start_year:
            raise ValueError("invalid synthetic spec")


def wet_probability(spec: SynthSpec, doy) -> np.ndarray:
    w = 2 * np.pi * np.asarray(doy, dtype=float) / PERIOD
    p = (spec.p_mean + spec.p_amp * np.sin(w + spec.phase)
         + spec.p_amp2 * np.sin(2 * w + spec.phase2))
    return np.clip(p, 0.0, 1.0)


def station_ids(spec: SynthSpec) -> list[str]:
    width = len(str(spec.n_stations))
    return [f"{spec.prefix}{i + 1:0{width}d}" for i in range(spec.n_stations)]


def generate_station(spec: SynthSpec, index: int):
    """Gauge and SRE series for one station, reproducible from ``(seed, index)``."""
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, index]))
    if spec.station_jitter > 0:
        j = 1 + spec.station_jitter * rng.uniform(-1, 1, size=2)
        spec = replace(spec, p_mean=spec.p_mean * j[0], gamma_scale=spec.gamma_scale * j[1])
    dates = np.arange(np.datetime64(f"{spec.start_year}-01-01"),
                      np.datetime64(f"{spec.end_year + 1}-01-01"), dtype="datetime64[D]")
    n = dates.size
    p = wet_probability(spec, day_of_year(dates))

    occurs = rng.random(n) < p
    amounts = rng.gamma(spec.gamma_shape, spec.gamma_scale, size=n)
    gauge = np.where(occurs, amounts, 0.0)

    noise = np.exp(spec.noise_sigma * rng.standard_normal(n) - 0.5 * spec.noise_sigma ** 2)
    sre = np.where(occurs, spec.multiplier * gauge * noise, 0.0)

    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(p < 1, (spec.inflation - 1) * p / (1 - p), 0.0)
    extra = ~occurs & (rng.random(n) < np.clip(q, 0, 1))
    light = WET_THRESHOLD + spec.extra_scale * spec.multiplier * noise * rng.gamma(
        spec.gamma_shape, spec.gamma_scale, size=n)
    sre = np.where(extra, light, sre)

    sid = station_ids(spec)[index]
    return DailySeries(sid, dates, gauge), DailySeries(sid, dates, sre)


def synth_series(spec: SynthSpec):
    """``({station: gauge}, {station: sre})`` for every station of ``spec``."""
    gauge, sre = {}, {}
    for i in range(spec.n_stations):
        g, s = generate_station(spec, i)
        gauge[g.station_id], sre[s.station_id] = g, s
    return gauge, sre


def synth_generate(spec: SynthSpec, out_dir, decimals: int | None = 6):
    """Write ``gauge.csv`` and ``sre.csv`` in the ingest layout; returns both paths."""
    out_dir = Path(out_dir)
    gauge, sre = synth_series(spec)
    gp, sp = out_dir / "gauge.csv", out_dir / "sre.csv"
    write_series(gp, gauge, decimals)
    write_series(sp, sre, decimals)
    return gp, sp
