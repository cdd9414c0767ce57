"""Local intensity scaling (LOCI).

Per calendar month, the SRE wet-day threshold is matched to the gauge wet-day
frequency through the two empirical CDFs, and a scale factor maps SRE
exceedances over that threshold onto gauge exceedances:

    s_m = (mean(x | x >= Tx) - Tx) / (mean(y | y >= Ty) - Ty)
    y'  = 0                      if y <= Ty
        = Tx + s_m * (y - Ty)    otherwise
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import WET_THRESHOLD, DailySeries, MonthlyThreshold, PairedSeries
from .numerics.ecdf import ecdf_eval, ecdf_fit, ecdf_quantile

MIN_WET_DAYS = 10


class InsufficientData(ValueError):
    """Raised when a monthly sample is too small; callers fall back to pooled data."""


def match_threshold(gauge, sre, t_gauge: float = WET_THRESHOLD,
                    min_wet: int = MIN_WET_DAYS) -> float:
    """SRE threshold with the same exceedance probability as ``t_gauge`` in the gauge.

    ``gauge`` and ``sre`` are the (equal-length) samples for one month.
    Raises :class:`InsufficientData` if either has fewer than ``min_wet`` wet days
    (gauge values at or above ``t_gauge``; SRE values above zero).
    """
    gauge = np.asarray(gauge, dtype=float)
    sre = np.asarray(sre, dtype=float)
    if gauge.size == 0 or sre.size == 0:
        raise InsufficientData("empty monthly sample")
    if np.count_nonzero(gauge >= t_gauge) < min_wet:
        raise InsufficientData("too few gauge wet days")
    if np.count_nonzero(sre > 0) < min_wet:
        raise InsufficientData("too few SRE rain days")
    p = ecdf_eval(ecdf_fit(gauge), t_gauge)
    return float(ecdf_quantile(ecdf_fit(sre), p))


def scale_factor(gauge, sre, t_gauge: float, t_sre: float,
                 min_wet: int = MIN_WET_DAYS) -> float:
    gauge = np.asarray(gauge, dtype=float)
    sre = np.asarray(sre, dtype=float)
    gw = gauge[gauge >= t_gauge]
    sw = sre[sre >= t_sre]
    if gw.size < min_wet or sw.size < min_wet:
        raise InsufficientData("too few wet days for the scale factor")
    denom = sw.mean() - t_sre
    if not denom > 0:
        raise InsufficientData("SRE exceedance mean is not above the threshold")
    return float((gw.mean() - t_gauge) / denom)


@dataclass(frozen=True)
class LociModel:
    t_gauge: np.ndarray      # (12,)
    t_sre: np.ndarray        # (12,)
    scale: np.ndarray        # (12,)
    fallback: np.ndarray     # (12,) bool: month uses the pooled estimate

    def threshold(self, month: int) -> MonthlyThreshold:
        return MonthlyThreshold(month, float(self.t_gauge[month - 1]),
                                float(self.t_sre[month - 1]))

    def apply(self, values, months):
        return loci_apply(self, values, months)

    def correct(self, series: DailySeries) -> DailySeries:
        return series.with_values(self.apply(series.values, series.months))

    def to_dict(self) -> dict:
        return {
            "kind": "loci",
            "t_gauge": self.t_gauge.tolist(),
            "t_sre": self.t_sre.tolist(),
            "scale": self.scale.tolist(),
            "fallback": self.fallback.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> LociModel:
        return cls(np.array(d["t_gauge"], float), np.array(d["t_sre"], float),
                   np.array(d["scale"], float), np.array(d["fallback"], bool))


def _fit_pooled(gauge, sre, t_gauge, min_wet):
    t_sre = match_threshold(gauge, sre, t_gauge, min_wet)
    return t_sre, scale_factor(gauge, sre, t_gauge, t_sre, min_wet)


def loci_fit(pair: PairedSeries, t_gauge: float = WET_THRESHOLD,
             min_wet: int = MIN_WET_DAYS) -> LociModel:
    """Fit monthly thresholds and scale factors on the training partition.

    Months with fewer than ``min_wet`` wet days in either source, or a
    non-positive exceedance mean, use the estimate pooled over all months.
    """
    train = pair.train()
    if len(train.dates) == 0:
        raise ValueError(f"{pair.station_id}: empty training partition")
    g, s, months = train.gauge.values, train.sre.values, train.gauge.months

    pooled = None
    t_sre = np.zeros(12)
    scale = np.ones(12)
    fallback = np.zeros(12, dtype=bool)
    for m in range(1, 13):
        sel = months == m
        try:
            t_sre[m - 1], scale[m - 1] = _fit_pooled(g[sel], s[sel], t_gauge, min_wet)
        except InsufficientData:
            if pooled is None:
                pooled = _fit_pooled(g, s, t_gauge, min_wet)
            t_sre[m - 1], scale[m - 1] = pooled
            fallback[m - 1] = True
    return LociModel(np.full(12, float(t_gauge)), t_sre, scale, fallback)


def loci_apply(model: LociModel, values, months):
    v = np.asarray(values, dtype=float)
    idx = np.asarray(months, dtype=int) - 1
    ty, tx, s = model.t_sre[idx], model.t_gauge[idx], model.scale[idx]
    out = np.where(v <= ty, 0.0, tx + s * (v - ty))
    return float(out) if out.ndim == 0 else out
