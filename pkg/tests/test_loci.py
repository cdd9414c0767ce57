import numpy as np
import pytest
from conftest import days, series
from hypothesis import given
from hypothesis import strategies as st

from rainbc.core import WET_THRESHOLD, align
from rainbc.loci import (
    InsufficientData,
    LociModel,
    loci_apply,
    loci_fit,
    match_threshold,
    scale_factor,
)


def zero_inflated(rng, n, wet_frac, scale=8.0):
    x = rng.gamma(0.9, scale, n)
    x[rng.random(n) >= wet_frac] = 0.0
    return x


def test_identical_samples_match_threshold():
    x = zero_inflated(np.random.default_rng(0), 600, 0.3)
    assert match_threshold(x, x, 0.85) == pytest.approx(0.85, abs=1e-12)


def test_doubled_sre_doubles_threshold():
    x = zero_inflated(np.random.default_rng(1), 600, 0.3)
    assert match_threshold(x, 2 * x, 0.85) == pytest.approx(1.7, rel=1e-12)


def test_wet_fraction_is_matched():
    rng = np.random.default_rng(2)
    n = 900
    g = zero_inflated(rng, n, 0.3) + 0.0
    g[g > 0] += WET_THRESHOLD                # every gauge rain day is wet
    s = zero_inflated(rng, n, 0.5)
    t = match_threshold(g, s, WET_THRESHOLD)
    assert abs(np.mean(s > t) - np.mean(g >= WET_THRESHOLD)) <= 1 / n


def test_scale_factor_by_hand():
    g = np.array([0.0, 2.85, 4.85])
    s = np.array([0.1, 1.5, 2.5])
    assert scale_factor(g, s, 0.85, 0.5, min_wet=1) == pytest.approx(2.0)
    assert scale_factor(s, s, 0.5, 0.5, min_wet=1) == 1.0


def test_scale_factor_needs_wet_days():
    with pytest.raises(InsufficientData):
        scale_factor([1.0, 2.0], [0.0, 0.0], 0.85, 0.5, min_wet=1)


def test_apply_by_hand():
    m = LociModel(np.full(12, 0.85), np.full(12, 0.5), np.full(12, 2.0), np.zeros(12, bool))
    assert loci_apply(m, 0.5, 3) == 0.0
    assert loci_apply(m, 1.5, 3) == pytest.approx(2.85)
    assert loci_apply(m, 0.0, 3) == 0.0
    np.testing.assert_allclose(loci_apply(m, [0.2, 1.5], [1, 12]), [0.0, 2.85])


def _months_with(pair, month):
    return pair.train().gauge.months == month


def test_calibration_on_training_data(synth_pair):
    model = loci_fit(synth_pair)
    assert not model.fallback.any()
    train = synth_pair.train()
    corrected = model.correct(train.sre).values
    for m in range(1, 13):
        sel = _months_with(synth_pair, m)
        g, c = train.gauge.values[sel], corrected[sel]
        wet_g, wet_c = g[g >= WET_THRESHOLD], c[c >= WET_THRESHOLD]
        assert wet_c.mean() == pytest.approx(wet_g.mean(), rel=1e-9)
        ties = np.sum(train.sre.values[sel] == model.t_sre[m - 1]) + np.sum(g == WET_THRESHOLD)
        assert abs(wet_c.size - wet_g.size) <= ties


def test_sparse_month_falls_back_to_pooled():
    d = days("1995-01-01", 365 * 4)
    rng = np.random.default_rng(5)
    g = rng.gamma(1.0, 6.0, d.size) * (rng.random(d.size) < 0.4)
    s = 1.4 * g * (rng.random(d.size) < 0.9)
    months = (d.astype("datetime64[M]").astype(int) % 12) + 1
    s[months == 7] = 0.0                         # SRE never rains in July
    pair = align(series(g, "1995-01-01"), series(s, "1995-01-01"), "1998-01-01")
    model = loci_fit(pair)
    assert model.fallback.tolist() == [m == 7 for m in range(1, 13)]
    pooled = model.scale[6]
    assert pooled > 0 and np.isfinite(pooled)


def test_serialization_round_trip(synth_pair):
    model = loci_fit(synth_pair)
    back = LociModel.from_dict(model.to_dict())
    x = synth_pair.sre.values
    np.testing.assert_array_equal(back.apply(x, synth_pair.sre.months),
                                  model.apply(x, synth_pair.sre.months))


@given(st.lists(st.floats(0, 300), min_size=2, max_size=30), st.integers(1, 12))
def test_monotone_and_nonnegative(synth_pair, xs, month):
    model = loci_fit(synth_pair)
    out = loci_apply(model, np.sort(xs), np.full(len(xs), month))
    assert np.all(out >= 0)
    assert np.all(np.diff(out) >= 0)
