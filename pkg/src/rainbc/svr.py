"""Epsilon-SVR correction with an RBF kernel, one model per intensity class.

Feature construction, scaling and class routing follow :mod:`rainbc.gpr`.
``(C, epsilon, lambda)`` is chosen by grid search on a chronological 80/20
split of each class's training rows, then the model is refitted on all rows.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

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
from .numerics.kernels import Rbf, pairwise_distance, rbf
from .numerics.smo import SmoConvergenceError, smo_solve

C_GRID = (1.0, 10.0, 100.0)
EPS_GRID = (0.01, 0.05, 0.1)
LAMBDA_GRID = (0.1, 0.3, 1.0)
KERNEL_VARIANCE = 1.0
VALIDATION_FRACTION = 0.2
# Grid candidates are only ranked by validation MAE, so they are solved to a
# looser KKT tolerance; the refit that gets stored uses the full tolerance.
SELECTION_TOL = 1e-2
FIT_TOL = 1e-3


class SvrFitError(RuntimeError):
    pass


@dataclass(frozen=True)
class SvrClassModel:
    cls: IntensityClass
    support: np.ndarray | None = None    # scaled support vectors (m, 2)
    coef: np.ndarray | None = None       # alpha - alpha_star for each support vector
    b: float = 0.0
    kernel: Rbf | None = None
    C: float = 0.0
    epsilon: float = 0.0
    x_scale: MinMax | None = None
    y_scale: MinMax | None = None
    gap: float = 0.0

    @property
    def passthrough(self) -> bool:
        return self.kernel is None

    def decision(self, Xs) -> np.ndarray:
        Xs = np.atleast_2d(np.asarray(Xs, dtype=float))
        if self.support.shape[0] == 0:
            return np.full(Xs.shape[0], self.b)
        return self.kernel.gram(Xs, self.support) @ self.coef + self.b

    def predict(self, x_t, x_tm1):
        x_t = np.asarray(x_t, dtype=float)
        if self.passthrough:
            return x_t.copy()
        Xs = self.x_scale.forward(np.column_stack([x_t, x_tm1]))
        return np.maximum(self.y_scale.inverse(self.decision(Xs)), 0.0)

    def to_dict(self) -> dict:
        d = {"lower": self.cls.lower,
             "upper": None if math.isinf(self.cls.upper) else self.cls.upper}
        if self.passthrough:
            return d
        d.update(
            support=self.support.tolist(), coef=self.coef.tolist(), b=self.b,
            kernel={"v2": self.kernel.v2, "lam": self.kernel.lam},
            C=self.C, epsilon=self.epsilon, gap=self.gap,
            x_scale=self.x_scale.to_dict(), y_scale=self.y_scale.to_dict(),
        )
        return d

    @classmethod
    def from_dict(cls, d) -> SvrClassModel:
        klass = IntensityClass(d["lower"], math.inf if d["upper"] is None else d["upper"])
        if "support" not in d:
            return cls(klass)
        return cls(klass, np.array(d["support"], float).reshape(-1, 2),
                   np.array(d["coef"], float), float(d["b"]), Rbf(**d["kernel"]),
                   d["C"], d["epsilon"], MinMax.from_dict(d["x_scale"]),
                   MinMax.from_dict(d["y_scale"]), d["gap"])


@dataclass(frozen=True)
class SvrModel:
    classes: tuple[SvrClassModel, ...]

    @property
    def partition(self) -> tuple[IntensityClass, ...]:
        return tuple(c.cls for c in self.classes)

    def predict(self, x_t, x_tm1):
        return svr_predict(self, x_t, x_tm1)

    def correct(self, series: DailySeries) -> DailySeries:
        X = design(series)
        return series.with_values(self.predict(X[:, 0], X[:, 1]))

    def to_dict(self) -> dict:
        return {"kind": "svr", "classes": [c.to_dict() for c in self.classes]}

    @classmethod
    def from_dict(cls, d) -> SvrModel:
        return cls(tuple(SvrClassModel.from_dict(c) for c in d["classes"]))


def _solve(K, y, C, eps, label, tol=FIT_TOL):
    try:
        return smo_solve(K, y, C, eps, tol=tol)
    except SmoConvergenceError as exc:
        raise SvrFitError(f"class {label}: {exc}") from exc


def select_svr_hyperparameters(X, y, label: str = "",
                               Cs=C_GRID, epsilons=EPS_GRID, lambdas=LAMBDA_GRID):
    """Grid point with the lowest validation MAE on the last 20% of rows."""
    n = len(y)
    n_fit = max(math.floor(n * (1 - VALIDATION_FRACTION)), 1)
    if n_fit >= n:
        return Cs[0], epsilons[0], lambdas[0]
    D = pairwise_distance(X, X)
    best, best_mae = None, np.inf
    for lam in lambdas:
        K = rbf(D, KERNEL_VARIANCE, lam)
        K_fit, K_val = K[:n_fit, :n_fit], K[n_fit:, :n_fit]
        for C, eps in itertools.product(Cs, epsilons):
            res = _solve(K_fit, y[:n_fit], C, eps, label, SELECTION_TOL)
            mae = np.mean(np.abs(K_val @ res.coef + res.b - y[n_fit:]))
            if mae < best_mae:
                best, best_mae = (C, eps, lam), mae
    return best


def fit_svr_class(klass: IntensityClass, X_raw, y_raw, *, C=None, epsilon=None,
                  lam=None, rng=None, cap: int = DEFAULT_CAP,
                  min_rows: int = MIN_CLASS_ROWS):
    """Fit one class; returns ``(model, X_scaled, y_scaled)``.

    The scaled training data are returned so callers can audit the KKT
    conditions of the stored solution.
    """
    X_raw = np.asarray(X_raw, dtype=float)
    y_raw = np.asarray(y_raw, dtype=float)
    if len(y_raw) < min_rows:
        return SvrClassModel(klass), None, None
    rng = rng if rng is not None else np.random.default_rng(0)
    keep = subsample(len(y_raw), cap, rng)
    X_raw, y_raw = X_raw[keep], y_raw[keep]
    xs, ys = MinMax.fit(X_raw), MinMax.fit(y_raw)
    X, y = xs.forward(X_raw), ys.forward(y_raw)
    label = klass.label()
    if C is None or epsilon is None or lam is None:
        C, epsilon, lam = select_svr_hyperparameters(X, y, label)
    kernel = Rbf(KERNEL_VARIANCE, lam)
    res = _solve(kernel.gram(X), y, C, epsilon, label)
    sv = res.coef != 0
    model = SvrClassModel(klass, X[sv], res.coef[sv], res.b, kernel, float(C),
                          float(epsilon), xs, ys, res.gap)
    return model, X, y


def svr_fit(pair: PairedSeries, classes=DEFAULT_CLASSES, *, seed: int = 0,
            cap: int = DEFAULT_CAP, C=None, epsilon=None, lam=None) -> SvrModel:
    X, y = training_rows(pair)
    if len(y) < 2:
        raise SvrFitError(f"{pair.station_id}: need at least two training days")
    idx = class_index(classes, X[:, 0])
    models = []
    for k, klass in enumerate(classes):
        sel = idx == k
        m, _, _ = fit_svr_class(klass, X[sel], y[sel], C=C, epsilon=epsilon, lam=lam,
                                rng=class_seed(seed, k), cap=cap)
        models.append(m)
    if all(m.passthrough for m in models):
        raise SvrFitError(f"{pair.station_id}: every intensity class is empty")
    return SvrModel(tuple(models))


def svr_predict(model: SvrModel, x_t, x_tm1):
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
