"""Verification scores for corrected daily (or annual) rainfall.

Undefined scores (zero variance, empty event sets) are returned as ``None``.
Standard deviations use the population convention (divide by n).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .core import EventCategory, event_mask


@dataclass(frozen=True)
class MetricReport:
    n: int
    me: float
    corr: float | None
    rsd: float | None
    rmse: float
    mae: float
    nse: float | None

    def as_dict(self) -> dict:
        return asdict(self)


def compute_metrics(predicted, observed) -> MetricReport:
    P = np.asarray(predicted, dtype=float)
    O = np.asarray(observed, dtype=float)
    if P.shape != O.shape:
        raise ValueError(f"length mismatch: {P.shape} vs {O.shape}")
    n = P.size
    if n < 2:
        raise ValueError("need at least two pairs")
    err = P - O
    me = float(err.mean())
    rmse = float(np.sqrt(np.mean(err ** 2)))
    mae = float(np.mean(np.abs(err)))

    dp, do = P - P.mean(), O - O.mean()
    ssp, sso = float(dp @ dp), float(do @ do)
    corr = float(dp @ do / np.sqrt(ssp * sso)) if ssp > 0 and sso > 0 else None
    if corr is not None:
        corr = min(1.0, max(-1.0, corr))
    sd_o = np.sqrt(sso / n)
    rsd = float(np.sqrt(ssp / n) / sd_o) if sso > 0 and ssp > 0 else None
    nse = float(1.0 - (err @ err) / sso) if sso > 0 else None
    return MetricReport(n, me, corr, rsd, rmse, mae, nse)


@dataclass(frozen=True)
class Contingency:
    hits: int
    misses: int
    false_alarms: int
    correct_negatives: int

    @property
    def n(self) -> int:
        return self.hits + self.misses + self.false_alarms + self.correct_negatives

    @property
    def predicted_events(self) -> int:
        return self.hits + self.false_alarms


def contingency(predicted, observed, category: EventCategory) -> Contingency:
    P = np.asarray(predicted, dtype=float)
    O = np.asarray(observed, dtype=float)
    if P.shape != O.shape:
        raise ValueError(f"length mismatch: {P.shape} vs {O.shape}")
    p, o = event_mask(P, category), event_mask(O, category)
    return Contingency(
        hits=int(np.count_nonzero(p & o)),
        misses=int(np.count_nonzero(~p & o)),
        false_alarms=int(np.count_nonzero(p & ~o)),
        correct_negatives=int(np.count_nonzero(~p & ~o)),
    )


def pod(c: Contingency) -> float | None:
    denom = c.hits + c.misses
    return c.hits / denom if denom else None


def acceptable_me(me: float, observed_mean_daily: float, fraction: float = 0.2) -> bool:
    """Whether ``|me|`` is strictly below ``fraction`` of the observed daily mean."""
    if not observed_mean_daily > 0:
        raise ValueError("observed mean must be positive")
    return abs(me) < fraction * observed_mean_daily
