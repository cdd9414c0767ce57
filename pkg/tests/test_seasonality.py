import numpy as np
import pytest
from conftest import days, series
from hypothesis import given
from hypothesis import strategies as st

from rainbc.core import day_of_year
from rainbc.numerics.logistic import SeparationError
from rainbc.seasonality import (
    PERIOD,
    OccurrenceModel,
    annual_stats,
    fit_occurrence,
    occurrence_curve,
)


def occurrence_series(p_of_doy, years=40, seed=0):
    d = days("1971-01-01", int(365.25 * years))
    rng = np.random.default_rng(seed)
    p = p_of_doy(day_of_year(d))
    wet = rng.random(d.size) < p
    vals = np.where(wet, 1.0 + rng.gamma(2, 4, d.size), 0.0)
    return series(vals, "1971-01-01")


def sinus(doy):
    return 0.3 + 0.2 * np.sin(2 * np.pi * doy / PERIOD)


def bimodal(doy):
    return 0.35 + 0.15 * np.sin(2 * np.pi * doy / PERIOD) + 0.15 * np.cos(4 * np.pi * doy / PERIOD)


@pytest.mark.parametrize("truth, tol", [(lambda d: np.full(np.shape(d), 0.3), 0.05),
                                        (sinus, 0.05), (bimodal, 0.07)],
                         ids=["flat", "sinusoidal", "bimodal"])
def test_recovers_truth(truth, tol):
    s = occurrence_series(truth)
    doy = np.arange(1, 367)
    curve = occurrence_curve(fit_occurrence(s, harmonics=2), doy)
    assert np.max(np.abs(curve - truth(doy))) <= tol


def test_mean_curve_is_calibrated():
    s = occurrence_series(sinus, seed=4)
    curve = occurrence_curve(fit_occurrence(s))
    assert abs(curve.mean() - np.mean(s.values >= 0.85)) <= 0.02


def test_intercept_only_model():
    m = OccurrenceModel(np.array([0.0, 0.0, 0.0]))
    np.testing.assert_allclose(occurrence_curve(m), 0.5)
    assert m.harmonics == 1


def test_periodic_and_leap_day_finite():
    m = fit_occurrence(occurrence_series(bimodal, years=10))
    d = np.linspace(0, 400, 37)
    np.testing.assert_allclose(m(d), m(d + PERIOD), atol=1e-12)
    assert np.isfinite(m(366))
    assert abs(m(366) - m(1)) < 1e-2          # three quarters of a day apart
    assert np.all((m(np.arange(1, 367)) > 0) & (m(np.arange(1, 367)) < 1))


def test_all_dry_is_separation_error():
    with pytest.raises(SeparationError):
        fit_occurrence(series(np.zeros(3 * 365)))


def test_needs_two_years():
    with pytest.raises(ValueError):
        fit_occurrence(series(np.ones(400)))


def test_annual_arithmetic():
    v = np.zeros(365)
    v[:100] = 8.0
    st_ = annual_stats(series(v, "2001-01-01"))
    assert st_.rainy_days.tolist() == [100]
    assert st_.total_mm[0] == 800.0 and st_.mean_per_rainy_day[0] == 8.0


def test_dry_season_has_missing_mean():
    st_ = annual_stats(series(np.zeros(365), "2001-01-01"))
    assert st_.rainy_days[0] == 0 and np.isnan(st_.mean_per_rainy_day[0])


def test_incomplete_seasons_dropped_and_start_month():
    s = series(np.ones(365 + 200), "2001-01-01")            # 2002 is only 200 days
    assert annual_stats(s).season.tolist() == [2001]
    st_ = annual_stats(series(np.ones(731), "2001-07-01"), season_start_month=7)
    assert st_.season.tolist() == [2001, 2002]


def test_extra_wet_days_show_in_counts():
    rng = np.random.default_rng(1)
    g = np.where(rng.random(3650) < 0.3, 5.0, 0.0)
    s = g.copy()
    for y in range(10):
        dry = np.flatnonzero(g[y * 365:(y + 1) * 365] == 0)[:50] + y * 365
        s[dry] = 2.0
    gs, ss = annual_stats(series(g, "2001-01-01")), annual_stats(series(s, "2001-01-01"))
    assert np.mean(ss.rainy_days - gs.rainy_days) == pytest.approx(50, abs=1)


@given(st.floats(0.1, 20), st.floats(0.1, 20))
def test_raising_threshold_never_adds_rainy_days(a, b):
    lo, hi = sorted((a, b))
    s = occurrence_series(sinus, years=3, seed=2)
    assert np.all(annual_stats(s, hi).rainy_days <= annual_stats(s, lo).rainy_days)
