"""Gamma quantile mapping with wet-day frequency adjustment.

Days below the matched SRE threshold become dry. Remaining SRE values are
mapped through ``F_gauge^-1(F_sre(y))`` with both CDFs gamma distributions
fitted per calendar month to the training wet days; mapped values are floored
at the gauge wet-day threshold so a wet day stays wet.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import WET_THRESHOLD, DailySeries, PairedSeries
from .loci import MIN_WET_DAYS, InsufficientData, match_threshold
from .numerics.ecdf import ecdf_eval, ecdf_fit, ecdf_quantile
from .numerics.gamma import (
    GammaDist,
    GammaFitError,
    gamma_cdf,
    gamma_mle,
    gamma_quantile,
)

P_CLAMP = 1e-6


@dataclass(frozen=True)
class QmModel:
    t_gauge: np.ndarray                       # (12,)
    t_sre: np.ndarray                         # (12,)
    gauge_dist: tuple                         # 12 x GammaDist | None
    sre_dist: tuple                           # 12 x GammaDist | None
    fallback: np.ndarray                      # (12,) bool: empirical mapping
    pooled_gauge: np.ndarray                  # pooled training wet days (sorted)
    pooled_sre: np.ndarray

    def apply(self, values, months):
        return qm_apply(self, values, months)

    def correct(self, series: DailySeries) -> DailySeries:
        return series.with_values(self.apply(series.values, series.months))

    def to_dict(self) -> dict:
        def dist(d):
            return None if d is None else [d.shape, d.scale]
        return {
            "kind": "qm",
            "t_gauge": self.t_gauge.tolist(),
            "t_sre": self.t_sre.tolist(),
            "gauge_dist": [dist(d) for d in self.gauge_dist],
            "sre_dist": [dist(d) for d in self.sre_dist],
            "fallback": self.fallback.tolist(),
            "pooled_gauge": self.pooled_gauge.tolist(),
            "pooled_sre": self.pooled_sre.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> QmModel:
        def dist(p):
            return None if p is None else GammaDist(*p)
        return cls(
            np.array(d["t_gauge"], float), np.array(d["t_sre"], float),
            tuple(dist(p) for p in d["gauge_dist"]),
            tuple(dist(p) for p in d["sre_dist"]),
            np.array(d["fallback"], bool),
            np.array(d["pooled_gauge"], float), np.array(d["pooled_sre"], float),
        )


def qm_fit(pair: PairedSeries, t_gauge: float = WET_THRESHOLD,
           min_wet: int = MIN_WET_DAYS) -> QmModel:
    train = pair.train()
    if len(train.dates) == 0:
        raise ValueError(f"{pair.station_id}: empty training partition")
    g, s, months = train.gauge.values, train.sre.values, train.gauge.months

    t_sre = np.zeros(12)
    gauge_dist = [None] * 12
    sre_dist = [None] * 12
    fallback = np.zeros(12, dtype=bool)
    pooled_t = None
    for m in range(1, 13):
        sel = months == m
        try:
            t_sre[m - 1] = match_threshold(g[sel], s[sel], t_gauge, min_wet)
        except InsufficientData:
            if pooled_t is None:
                pooled_t = match_threshold(g, s, t_gauge, min_wet)
            t_sre[m - 1] = pooled_t
            fallback[m - 1] = True
            continue
        gw = g[sel][g[sel] >= t_gauge]
        sw = s[sel][s[sel] >= t_sre[m - 1]]
        try:
            gauge_dist[m - 1] = gamma_mle(gw, min_size=min_wet).dist
            sre_dist[m - 1] = gamma_mle(sw, min_size=min_wet).dist
        except GammaFitError:
            gauge_dist[m - 1] = sre_dist[m - 1] = None
            fallback[m - 1] = True

    # pooled wet days for the empirical fallback, each side above its own threshold
    month_t = t_sre[months - 1]
    pooled_gauge = np.sort(g[g >= t_gauge])
    pooled_sre = np.sort(s[s >= month_t])
    if fallback.any() and (pooled_gauge.size == 0 or pooled_sre.size == 0):
        raise InsufficientData(f"{pair.station_id}: no wet days for the pooled fallback")
    return QmModel(np.full(12, float(t_gauge)), t_sre, tuple(gauge_dist),
                   tuple(sre_dist), fallback, pooled_gauge, pooled_sre)


def qm_apply(model: QmModel, values, months):
    v = np.atleast_1d(np.asarray(values, dtype=float))
    mo = np.broadcast_to(np.asarray(months, dtype=int), v.shape)
    out = np.zeros(v.shape)
    for m in np.unique(mo):
        sel = mo == m
        k = m - 1
        x = v[sel]
        wet = x >= model.t_sre[k]
        res = np.zeros(x.shape)
        if wet.any():
            if model.fallback[k]:
                p = ecdf_eval(ecdf_fit(model.pooled_sre), x[wet])
                mapped = ecdf_quantile(ecdf_fit(model.pooled_gauge), p)
            else:
                p = np.clip(gamma_cdf(model.sre_dist[k], x[wet]), P_CLAMP, 1 - P_CLAMP)
                mapped = gamma_quantile(model.gauge_dist[k], p)
            res[wet] = np.maximum(model.t_gauge[k], mapped)
        out[sel] = res
    if np.ndim(values) == 0:
        return float(out[0])
    return out
