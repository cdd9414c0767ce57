"""Machine-learning corrections: Gaussian-process and support-vector regression.

Each intensity class (0.85-5, 5-20, 20-40, >= 40 mm) gets its own model on
two features, today's and yesterday's SRE value. Dry SRE days pass through
untouched, so these methods fix intensities but not the rain-day count.
"""

import numpy as np

from rainbc import WET_THRESHOLD, SynthSpec, align, generate_station, gpr_fit, svr_fit

pair = align(*generate_station(SynthSpec(n_stations=1, start_year=1991, end_year=2005), 0))
gpr = gpr_fit(pair, cap=600, seed=1)
svr = svr_fit(pair, cap=600, seed=1)

print("class         GPR kernel (sigma2, rho, noise)    SVR (C, epsilon, lambda)")
for g, s in zip(gpr.classes, svr.classes):
    gk = "pass-through" if g.passthrough else \
        f"({g.kernel.sigma2}, {g.kernel.rho}, {g.noise:g})"
    sk = "pass-through" if s.passthrough else f"({s.C:g}, {s.epsilon:g}, {s.kernel.lam:g})"
    print(f"{g.cls.label():12s}  {gk:33s}  {sk}")

test = pair.test()
raw = test.sre.values
print("\n             ME mm/day   wet days in test")
print(f"gauge                     {np.sum(test.gauge.values >= WET_THRESHOLD):5d}")
for name, model in (("uncorrected", None), ("GPR", gpr), ("SVR", svr)):
    v = raw if model is None else model.correct(pair.sre).values[pair.test_mask]
    print(f"{name:12s} {np.mean(v - test.gauge.values):+8.3f}   "
          f"{np.sum(v >= WET_THRESHOLD):5d}")
