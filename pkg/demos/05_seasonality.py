"""Rain-occurrence seasonality as a logistic regression on Fourier terms.

The fitted curve gives the probability of a wet day for every day of the
year. Comparing curves shows where a product rains too often, and whether a
correction puts the season back in shape.
"""

import numpy as np

from rainbc import (
    SynthSpec,
    align,
    fit_occurrence,
    generate_station,
    loci_fit,
    occurrence_curve,
)

spec = SynthSpec(n_stations=1, p_amp=0.12, p_amp2=0.1)      # two rainy seasons
pair = align(*generate_station(spec, 0))
test = pair.test()
loci = loci_fit(pair)

curves = {
    "gauge": occurrence_curve(fit_occurrence(test.gauge)),
    "uncorrected": occurrence_curve(fit_occurrence(test.sre)),
    "LOCI": occurrence_curve(fit_occurrence(loci.correct(test.sre))),
}
print("doy    " + "  ".join(f"{k:>11s}" for k in curves))
for d in range(1, 367, 30):
    print(f"{d:3d}    " + "  ".join(f"{c[d - 1]:11.3f}" for c in curves.values()))
for k in ("uncorrected", "LOCI"):
    print(f"mean |{k} - gauge| = {np.mean(np.abs(curves[k] - curves['gauge'])):.3f}")
