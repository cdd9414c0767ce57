import numpy as np
import pytest
from conftest import series
from hypothesis import given
from hypothesis import strategies as st

from rainbc.core import DEFAULT_CLASSES, WET_THRESHOLD, align
from rainbc.features import MinMax
from rainbc.gpr import (
    GprClassModel,
    GprFitError,
    GprModel,
    fit_gpr_class,
    gpr_fit,
    gpr_posterior_variance,
    gpr_predict,
)
from rainbc.numerics.kernels import Matern

WET = DEFAULT_CLASSES[1]          # 5-20 mm


def matern15(a, b, sigma2, rho):
    d = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(-1))
    t = np.sqrt(3.0) * d / rho
    return sigma2 * (1 + t) * np.exp(-t)


def dense_posterior(X, y, Xs, sigma2, rho, noise):
    """Textbook GP posterior with an explicit matrix inverse."""
    Kinv = np.linalg.inv(matern15(X, X, sigma2, rho) + noise * np.eye(len(y)))
    Ks = matern15(Xs, X, sigma2, rho)
    mean = Ks @ Kinv @ y
    var = sigma2 - np.einsum("ij,jk,ik->i", Ks, Kinv, Ks)
    return mean, var


def identity_model(X, y, sigma2=1.0, rho=0.5, noise=1e-8):
    return GprClassModel.build(WET, X, y, Matern(sigma2, rho), noise,
                               MinMax(np.zeros(2), np.ones(2)), MinMax(np.zeros(1), np.ones(1)))


def test_five_point_hand_problem_matches_dense_oracle():
    rng = np.random.default_rng(0)
    X, y = rng.random((5, 2)), rng.random(5)
    m = identity_model(X, y, sigma2=0.7, rho=0.3, noise=1e-2)
    Xs = rng.random((7, 2))
    mean, var = m.posterior(Xs)
    o_mean, o_var = dense_posterior(X, y, Xs, 0.7, 0.3, 1e-2)
    np.testing.assert_allclose(mean, o_mean, atol=1e-8)
    np.testing.assert_allclose(var, o_var, atol=1e-8)


def test_two_point_variance_by_hand():
    X, y = np.array([[0.0, 0.0], [0.3, 0.4]]), np.array([0.2, 0.9])
    m = identity_model(X, y, sigma2=1.0, rho=1.0, noise=0.1)
    t = np.sqrt(3.0) * 0.5
    c = (1 + t) * np.exp(-t)                  # k at distance 0.5
    A = np.array([[1.1, c], [c, 1.1]])
    k = np.array([1.0, c])                    # query at the first point
    expected = 1.0 - k @ np.linalg.solve(A, k)
    _, var = m.posterior(X[:1])
    assert var[0] == pytest.approx(expected, abs=1e-8)


def test_interpolates_training_targets_with_tiny_noise():
    rng = np.random.default_rng(1)
    X, y = rng.random((30, 2)), rng.random(30)
    m = identity_model(X, y)
    mean, var = m.posterior(X)
    np.testing.assert_allclose(mean, y, atol=1e-4)
    assert np.all(var <= 1e-6)


def test_far_field_variance_returns_to_prior():
    rng = np.random.default_rng(2)
    m = identity_model(rng.random((10, 2)), rng.random(10), sigma2=0.25, rho=0.1)
    _, var = m.posterior(np.array([[50.0, 50.0]]))
    assert var[0] == pytest.approx(0.25, abs=1e-12)
    assert gpr_posterior_variance(m, [[50.0, 50.0]])[0] == pytest.approx(0.25)


def test_identity_mapping_recovered_at_training_inputs():
    rng = np.random.default_rng(3)
    x = WET.lower + rng.random(40) * (WET.upper - WET.lower)
    X_raw = np.column_stack([x, rng.random(40) * 30])
    m = fit_gpr_class(WET, X_raw, x, kernel=Matern(1.0, 0.5), noise=1e-8)
    np.testing.assert_allclose(m.predict(X_raw[:, 0], X_raw[:, 1]), x, atol=1e-4)


def test_cached_factor_reproduces_covariance():
    rng = np.random.default_rng(4)
    X, y = rng.random((20, 2)), rng.random(20)
    m = identity_model(X, y, noise=1e-2)
    K = matern15(X, X, 1.0, 0.5) + (1e-2 + m.jitter) * np.eye(20)
    np.testing.assert_allclose(m.factor @ m.factor.T, K, atol=1e-8)


def test_small_class_is_passthrough():
    m = fit_gpr_class(WET, np.ones((4, 2)) * 6, np.ones(4))
    assert m.passthrough
    assert m.predict(np.array([7.0]), np.array([1.0]))[0] == 7.0


def test_no_violent_training_days_gives_passthrough(short_pair):
    clipped = short_pair.sre.with_values(np.minimum(short_pair.sre.values, 39.0))
    model = gpr_fit(align(short_pair.gauge, clipped), cap=200)
    assert model.classes[-1].passthrough
    assert not model.classes[0].passthrough
    assert gpr_predict(model, 55.0, 3.0) == 55.0


def test_dry_input_passes_through(short_pair):
    model = gpr_fit(short_pair, cap=200)
    assert gpr_predict(model, 0.3, 10.0) == 0.3
    assert gpr_predict(model, 0.0, 0.0) == 0.0


def test_all_classes_empty_is_an_error():
    pair = align(series(np.zeros(100)), series(np.zeros(100)), "2000-03-01")
    with pytest.raises(GprFitError):
        gpr_fit(pair)


def test_class_models_agree_with_dense_oracle(short_pair):
    model = gpr_fit(short_pair, cap=50)
    rng = np.random.default_rng(5)
    for cm in model.classes:
        if cm.passthrough:
            continue
        assert len(cm.y) <= 50
        Xs = rng.random((10, 2)) * 1.2 - 0.1
        mean, var = cm.posterior(Xs)
        o_mean, o_var = dense_posterior(cm.X, cm.y, Xs, cm.kernel.sigma2, cm.kernel.rho,
                                        cm.noise + cm.jitter)
        np.testing.assert_allclose(mean, o_mean, atol=1e-8)
        np.testing.assert_allclose(var, o_var, atol=1e-8)


def test_fit_is_deterministic(short_pair):
    a = gpr_fit(short_pair, seed=7, cap=60).to_dict()
    b = gpr_fit(short_pair, seed=7, cap=60).to_dict()
    c = gpr_fit(short_pair, seed=8, cap=60).to_dict()
    assert a == b
    assert a != c


def test_round_trip_predictions_identical(short_pair):
    model = gpr_fit(short_pair, cap=100)
    back = GprModel.from_dict(model.to_dict())
    x = short_pair.sre.values
    np.testing.assert_array_equal(back.predict(x, short_pair.sre.lagged()),
                                  model.predict(x, short_pair.sre.lagged()))


@given(st.floats(0, 1e4), st.floats(0, 1e4))
def test_outputs_finite_and_nonnegative(short_pair, x, xp):
    out = gpr_predict(_cached_model(short_pair), x, xp)
    assert np.isfinite(out) and out >= 0
    if x < WET_THRESHOLD:
        assert out == x


_CACHE = {}


def _cached_model(pair):
    if "m" not in _CACHE:
        _CACHE["m"] = gpr_fit(pair, cap=100)
    return _CACHE["m"]
