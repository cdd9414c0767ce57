"""Stationary covariance functions on Euclidean inputs.

Matérn is implemented through its closed forms for half-integer smoothness
(nu = 0.5, 1.5, 2.5); fractional orders would need the modified Bessel
function and are not supported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

MATERN_ORDERS = (0.5, 1.5, 2.5)


def pairwise_distance(a, b) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    return cdist(a, b)


def matern(d, sigma2: float = 1.0, rho: float = 1.0, nu: float = 1.5):
    r = np.asarray(d, dtype=float) / rho
    if nu == 0.5:
        return sigma2 * np.exp(-r)
    if nu == 1.5:
        t = np.sqrt(3.0) * r
        return sigma2 * (1.0 + t) * np.exp(-t)
    if nu == 2.5:
        t = np.sqrt(5.0) * r
        return sigma2 * (1.0 + t + t * t / 3.0) * np.exp(-t)
    raise ValueError(f"Matern order must be one of {MATERN_ORDERS}, got {nu}")


def rbf(d, v2: float = 1.0, lam: float = 1.0):
    d = np.asarray(d, dtype=float)
    return v2 * np.exp(-(d * d) / (2.0 * lam * lam))


@dataclass(frozen=True)
class Matern:
    sigma2: float = 1.0
    rho: float = 1.0
    nu: float = 1.5

    def __post_init__(self):
        if self.sigma2 <= 0 or self.rho <= 0:
            raise ValueError("Matern hyperparameters must be positive")
        if self.nu not in MATERN_ORDERS:
            raise ValueError(f"Matern order must be one of {MATERN_ORDERS}")

    @property
    def variance(self) -> float:
        return self.sigma2

    def __call__(self, x, x2) -> float:
        d = np.linalg.norm(np.asarray(x, float) - np.asarray(x2, float))
        return float(matern(d, self.sigma2, self.rho, self.nu))

    def gram(self, a, b=None) -> np.ndarray:
        return matern(pairwise_distance(a, a if b is None else b),
                      self.sigma2, self.rho, self.nu)


@dataclass(frozen=True)
class Rbf:
    v2: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        if self.v2 <= 0 or self.lam <= 0:
            raise ValueError("RBF hyperparameters must be positive")

    @property
    def variance(self) -> float:
        return self.v2

    def __call__(self, x, x2) -> float:
        d = np.linalg.norm(np.asarray(x, float) - np.asarray(x2, float))
        return float(rbf(d, self.v2, self.lam))

    def gram(self, a, b=None) -> np.ndarray:
        return rbf(pairwise_distance(a, a if b is None else b), self.v2, self.lam)


KernelSpec = Matern | Rbf


def kernel_eval(spec: KernelSpec, x, x2) -> float:
    return spec(x, x2)


def kernel_to_dict(spec: KernelSpec) -> dict:
    if isinstance(spec, Matern):
        return {"type": "matern", "sigma2": spec.sigma2, "rho": spec.rho, "nu": spec.nu}
    return {"type": "rbf", "v2": spec.v2, "lam": spec.lam}


def kernel_from_dict(d: dict) -> KernelSpec:
    d = dict(d)
    kind = d.pop("type")
    if kind == "matern":
        return Matern(**d)
    if kind == "rbf":
        return Rbf(**d)
    raise ValueError(f"unknown kernel type {kind!r}")
