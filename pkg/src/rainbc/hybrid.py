"""Two-stage corrections: LOCI or QM first, then GPR on the corrected SRE.

Stage 1 is fitted on the training partition and applied to every date, so
stage 2 is trained and evaluated on a uniformly corrected series.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_CLASSES, WET_THRESHOLD, DailySeries, PairedSeries, month_of
from .features import DEFAULT_CAP
from .gpr import GprModel, gpr_fit_rows, gpr_predict
from .loci import LociModel, loci_fit
from .qm import QmModel, qm_fit

VARIANTS = ("LOCI", "QM")


@dataclass(frozen=True)
class HybridModel:
    variant: str
    stage1: LociModel | QmModel
    stage2: GprModel

    def predict(self, x_t, x_tm1, month_t, month_tm1):
        return hybrid_predict(self, x_t, x_tm1, month_t, month_tm1)

    def correct(self, series: DailySeries) -> DailySeries:
        x_t, x_tm1, m_t, m_tm1 = _inputs(series)
        return series.with_values(self.predict(x_t, x_tm1, m_t, m_tm1))


def _inputs(series: DailySeries):
    prev_months = month_of(series.dates - np.timedelta64(1, "D"))
    return series.values, series.lagged(), series.months, prev_months


def hybrid_fit(pair: PairedSeries, variant: str, t_gauge: float = WET_THRESHOLD,
               classes=DEFAULT_CLASSES, *, seed: int = 0,
               cap: int = DEFAULT_CAP) -> HybridModel:
    variant = variant.upper()
    if variant == "LOCI":
        stage1 = loci_fit(pair, t_gauge)
    elif variant == "QM":
        stage1 = qm_fit(pair, t_gauge)
    else:
        raise ValueError(f"hybrid variant must be one of {VARIANTS}, got {variant!r}")
    x_t, x_tm1, m_t, m_tm1 = _inputs(pair.sre)
    X = np.column_stack([stage1.apply(x_t, m_t), stage1.apply(x_tm1, m_tm1)])
    train = pair.train_mask
    stage2 = gpr_fit_rows(X[train], pair.gauge.values[train], classes,
                          seed=seed, cap=cap)
    return HybridModel(variant, stage1, stage2)


def hybrid_predict(model: HybridModel, x_t, x_tm1, month_t, month_tm1):
    """Stage-1 correction of both features (each with its own month), then GPR."""
    c_t = model.stage1.apply(x_t, month_t)
    c_tm1 = model.stage1.apply(x_tm1, month_tm1)
    return gpr_predict(model.stage2, c_t, c_tm1)
