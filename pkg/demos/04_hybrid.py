"""Two-stage corrections: a statistical pass, then GPR on its output.

Stage 1 (LOCI or QM) fixes the rain-day frequency; stage 2 refines the
intensities. The composition is literal, which the last lines check.
"""

import numpy as np

from rainbc import WET_THRESHOLD, SynthSpec, align, generate_station, hybrid_fit
from rainbc.gpr import gpr_predict

pair = align(*generate_station(SynthSpec(n_stations=1, start_year=1991, end_year=2005), 0))
test = pair.test()
print("method      ME mm/day   wet days (gauge has "
      f"{np.sum(test.gauge.values >= WET_THRESHOLD)})")
for variant in ("LOCI", "QM"):
    model = hybrid_fit(pair, variant, cap=600)
    out = model.correct(pair.sre).values[pair.test_mask]
    print(f"{variant}-GPR    {np.mean(out - test.gauge.values):+8.3f}   "
          f"{np.sum(out >= WET_THRESHOLD):5d}")

x_t, x_prev = np.array([0.4, 3.0, 12.0, 55.0]), np.array([0.0, 8.0, 1.0, 30.0])
months = np.array([1, 4, 7, 11])
direct = model.predict(x_t, x_prev, months, months)
by_hand = gpr_predict(model.stage2, model.stage1.apply(x_t, months),
                      model.stage1.apply(x_prev, months))
print("\nQM-GPR equals GPR(QM(x)) exactly:", np.array_equal(direct, by_hand))
