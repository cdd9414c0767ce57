"""Gaussian-process regression correction, one model per intensity class.

Inputs are the SRE value on day t and on day t-1; the target is the gauge
value on day t. Only days the SRE calls wet are used. Features and targets
are min-max scaled per class, the prior mean is zero in scaled units, and the
Matérn hyperparameters come from a log-marginal-likelihood grid search.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .core import (
    DEFAULT_CLASSES,
    DailySeries,
    IntensityClass,
    PairedSeries,
    class_index,
)
from .features import (
    DEFAULT_CAP,
    MIN_CLASS_ROWS,
    MinMax,
    class_seed,
    design,
    subsample,
    training_rows,
)
from .numerics.kernels import Matern, matern, pairwise_distance
from .numerics.linalg import cho_solve_lower, cholesky_jitter

RHO_GRID = (0.05, 0.1, 0.2, 0.5, 1.0)
SIGMA2_GRID = (0.25, 1.0)
NOISE_GRID = (1e-4, 1e-2, 1e-1)
NU = 1.5


class GprFitError(ValueError):
    pass


@dataclass(frozen=True)
class GprClassModel:
    cls: IntensityClass
    X: np.ndarray | None = None          # scaled features (n, 2)
    y: np.ndarray | None = None          # scaled targets (n,)
    kernel: Matern | None = None
    noise: float = 0.0
    x_scale: MinMax | None = None
    y_scale: MinMax | None = None
    factor: np.ndarray | None = field(default=None, repr=False)
    weights: np.ndarray | None = field(default=None, repr=False)
    jitter: float = 0.0

    @property
    def passthrough(self) -> bool:
        return self.X is None

    @classmethod
    def build(cls, klass, X, y, kernel, noise, x_scale, y_scale):
        """Assemble a class model from scaled data, factorising ``K + noise*I``."""
        K = kernel.gram(X) + noise * np.eye(len(y))
        L, jitter = cholesky_jitter(K)
        w = cho_solve_lower(L, y)
        return cls(klass, X, y, kernel, float(noise), x_scale, y_scale, L, w, jitter)

    def posterior(self, Xs, full_cov: bool = False):
        """Posterior mean and (co)variance at scaled inputs ``Xs``."""
        Xs = np.atleast_2d(np.asarray(Xs, dtype=float))
        Ks = self.kernel.gram(Xs, self.X)
        mean = Ks @ self.weights
        v = solve_triangular(self.factor, Ks.T, lower=True)
        if full_cov:
            cov = self.kernel.gram(Xs) - v.T @ v
            return mean, cov
        var = np.maximum(self.kernel.variance - np.sum(v * v, axis=0), 0.0)
        return mean, var

    def predict(self, x_t, x_tm1):
        x_t = np.asarray(x_t, dtype=float)
        if self.passthrough:
            return x_t.copy()
        Xs = self.x_scale.forward(np.column_stack([x_t, x_tm1]))
        mean, _ = self.posterior(Xs)
        return np.maximum(self.y_scale.inverse(mean), 0.0)

    def to_dict(self) -> dict:
        d = {"lower": self.cls.lower, "upper": _enc(self.cls.upper)}
        if self.passthrough:
            return d
        d.update(
            X=self.X.tolist(), y=self.y.tolist(),
            kernel={"sigma2": self.kernel.sigma2, "rho": self.kernel.rho,
                    "nu": self.kernel.nu},
            noise=self.noise,
            x_scale=self.x_scale.to_dict(), y_scale=self.y_scale.to_dict(),
        )
        return d

    @classmethod
    def from_dict(cls, d) -> GprClassModel:
        klass = IntensityClass(d["lower"], _dec(d["upper"]))
        if "X" not in d:
            return cls(klass)
        return cls.build(klass, np.array(d["X"], float), np.array(d["y"], float),
                         Matern(**d["kernel"]), d["noise"],
                         MinMax.from_dict(d["x_scale"]), MinMax.from_dict(d["y_scale"]))


def _enc(x: float):
    return None if math.isinf(x) else x


def _dec(x):
    return math.inf if x is None else float(x)


@dataclass(frozen=True)
class GprModel:
    classes: tuple[GprClassModel, ...]

    @property
    def partition(self) -> tuple[IntensityClass, ...]:
        return tuple(c.cls for c in self.classes)

    @property
    def wet_threshold(self) -> float:
        return self.classes[0].cls.lower

    def predict(self, x_t, x_tm1):
        return gpr_predict(self, x_t, x_tm1)

    def correct(self, series: DailySeries) -> DailySeries:
        X = design(series)
        return series.with_values(self.predict(X[:, 0], X[:, 1]))

    def to_dict(self) -> dict:
        return {"kind": "gpr", "classes": [c.to_dict() for c in self.classes]}

    @classmethod
    def from_dict(cls, d) -> GprModel:
        return cls(tuple(GprClassModel.from_dict(c) for c in d["classes"]))


def log_marginal_likelihood(L: np.ndarray, y: np.ndarray, w: np.ndarray) -> float:
    return float(-0.5 * y @ w - np.log(np.diag(L)).sum()
                 - 0.5 * y.size * math.log(2 * math.pi))


def select_hyperparameters(X, y, rhos=RHO_GRID, sigma2s=SIGMA2_GRID,
                           noises=NOISE_GRID, nu: float = NU):
    """Grid point maximising the log marginal likelihood; ties keep the first."""
    D = pairwise_distance(X, X)
    eye = np.eye(len(y))
    best, best_lml = None, -np.inf
    for rho in rhos:
        base = matern(D, 1.0, rho, nu)
        for sigma2, noise in itertools.product(sigma2s, noises):
            L, _ = cholesky_jitter(sigma2 * base + noise * eye)
            w = cho_solve_lower(L, y)
            lml = log_marginal_likelihood(L, y, w)
            if lml > best_lml:
                best, best_lml = (Matern(sigma2, rho, nu), noise), lml
    return best


def fit_gpr_class(klass: IntensityClass, X_raw, y_raw, *, kernel=None,
                  noise=None, rng=None, cap: int = DEFAULT_CAP,
                  min_rows: int = MIN_CLASS_ROWS) -> GprClassModel:
    """Fit one intensity class from raw features and targets.

    Passing both ``kernel`` and ``noise`` skips the grid search.
    """
    X_raw = np.asarray(X_raw, dtype=float)
    y_raw = np.asarray(y_raw, dtype=float)
    if len(y_raw) < min_rows:
        return GprClassModel(klass)
    rng = rng if rng is not None else np.random.default_rng(0)
    keep = subsample(len(y_raw), cap, rng)
    X_raw, y_raw = X_raw[keep], y_raw[keep]
    xs, ys = MinMax.fit(X_raw), MinMax.fit(y_raw)
    X, y = xs.forward(X_raw), ys.forward(y_raw)
    if kernel is None or noise is None:
        kernel, noise = select_hyperparameters(X, y)
    return GprClassModel.build(klass, X, y, kernel, noise, xs, ys)


def gpr_fit(pair: PairedSeries, classes=DEFAULT_CLASSES, *, seed: int = 0,
            cap: int = DEFAULT_CAP, kernel=None, noise=None) -> GprModel:
    """Per-class GPR on the training days where the SRE is wet."""
    X, y = training_rows(pair)
    try:
        return gpr_fit_rows(X, y, classes, seed=seed, cap=cap, kernel=kernel, noise=noise)
    except GprFitError as exc:
        raise GprFitError(f"{pair.station_id}: {exc}") from None


def gpr_fit_rows(X, y, classes=DEFAULT_CLASSES, *, seed: int = 0,
                 cap: int = DEFAULT_CAP, kernel=None, noise=None) -> GprModel:
    """Per-class GPR from an ``(n, 2)`` feature matrix and gauge targets."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(y) < 2:
        raise GprFitError("need at least two training days")
    idx = class_index(classes, X[:, 0])
    models = []
    for k, klass in enumerate(classes):
        sel = idx == k
        models.append(fit_gpr_class(klass, X[sel], y[sel], kernel=kernel,
                                    noise=noise, rng=class_seed(seed, k), cap=cap))
    if all(m.passthrough for m in models):
        raise GprFitError("every intensity class is empty")
    return GprModel(tuple(models))


def gpr_predict(model: GprModel, x_t, x_tm1):
    """Corrected value; SRE-dry days and empty classes pass through unchanged."""
    x_t = np.asarray(x_t, dtype=float)
    scalar = x_t.ndim == 0
    x_t = np.atleast_1d(x_t)
    x_tm1 = np.broadcast_to(np.asarray(x_tm1, dtype=float), x_t.shape)
    out = x_t.copy()
    idx = class_index(model.partition, x_t)
    for k, cm in enumerate(model.classes):
        sel = idx == k
        if sel.any() and not cm.passthrough:
            out[sel] = cm.predict(x_t[sel], x_tm1[sel])
    return float(out[0]) if scalar else out


def gpr_posterior_variance(model: GprClassModel, inputs) -> np.ndarray:
    """Posterior variance (scaled target units) at raw two-feature inputs."""
    if model.passthrough:
        raise ValueError("pass-through class has no posterior")
    _, var = model.posterior(model.x_scale.forward(np.atleast_2d(inputs)))
    return var
