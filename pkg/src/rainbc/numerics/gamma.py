"""Two-parameter gamma distribution: maximum likelihood fit, CDF and quantile."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special


class GammaFitError(ValueError):
    pass


@dataclass(frozen=True)
class GammaDist:
    shape: float
    scale: float

    def __post_init__(self):
        if not (np.isfinite(self.shape) and np.isfinite(self.scale)):
            raise ValueError("gamma parameters must be finite")
        if self.shape <= 0 or self.scale <= 0:
            raise ValueError("gamma parameters must be positive")

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    @property
    def std(self) -> float:
        return math.sqrt(self.shape) * self.scale


@dataclass(frozen=True)
class GammaFit:
    dist: GammaDist
    iterations: int


def gamma_moments(sample) -> GammaDist:
    """Method-of-moments estimate ``shape = m^2/v``, ``scale = v/m``."""
    x = np.asarray(sample, dtype=float)
    m, v = x.mean(), x.var()
    if v <= 0:
        raise GammaFitError("zero-variance sample")
    return GammaDist(m * m / v, v / m)


def gamma_mle(sample, min_size: int = 10, rtol: float = 1e-10,
              max_iter: int = 100) -> GammaFit:
    """Maximum-likelihood gamma fit by Newton iteration on the shape equation.

    The profile likelihood reduces to ``log k - digamma(k) = log(mean) - mean(log x)``;
    Newton steps start from the method-of-moments shape and stop once
    successive iterates differ by less than ``rtol`` relative.
    """
    x = np.asarray(sample, dtype=float).ravel()
    if x.size < min_size:
        raise GammaFitError(f"need at least {min_size} values, got {x.size}")
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise GammaFitError("gamma fit needs strictly positive finite values")
    mean = x.mean()
    s = math.log(mean) - np.log(x).mean()
    if not s > 0:
        raise GammaFitError("zero-variance sample")
    k = gamma_moments(x).shape
    for it in range(1, max_iter + 1):
        f = math.log(k) - special.digamma(k) - s
        fp = 1.0 / k - special.polygamma(1, k)
        k_new = k - f / fp
        if k_new <= 0:
            k_new = k / 2.0
        if abs(k_new - k) < rtol * k:
            k = k_new
            break
        k = k_new
    else:
        raise GammaFitError(f"shape iteration did not converge in {max_iter} steps")
    return GammaFit(GammaDist(k, mean / k), it)


def gamma_cdf(d: GammaDist, x):
    x = np.asarray(x, dtype=float)
    out = special.gammainc(d.shape, np.maximum(x, 0.0) / d.scale)
    return float(out) if out.ndim == 0 else out


def _pdf(d: GammaDist, x):
    return np.exp((d.shape - 1) * np.log(x) - x / d.scale
                  - special.gammaln(d.shape) - d.shape * np.log(d.scale))


def gamma_quantile(d: GammaDist, p, rtol: float = 1e-12):
    """Inverse CDF by bracketing bisection followed by safeguarded Newton steps.

    Bisection runs on a log scale once the lower bracket is positive, so
    lower-tail quantiles far below the mean are reached in a few dozen steps.
    """
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise ValueError("probability must lie in the open interval (0, 1)")
    scalar = p.ndim == 0
    p = np.atleast_1d(p)

    hi = np.full_like(p, d.mean + 10 * d.std + d.scale)
    while True:
        short = gamma_cdf(d, hi) < p
        if not short.any():
            break
        hi = np.where(short, 2 * hi, hi)
    # lower bracket by geometric shrinking; deep lower tails of small shapes
    # sit many orders of magnitude below the mean
    lo = hi.copy()
    tiny = np.finfo(float).tiny
    while True:
        over = (gamma_cdf(d, lo) >= p) & (lo > 0)
        if not over.any():
            break
        lo = np.where(over, np.where(lo * 1e-3 < tiny, 0.0, lo * 1e-3), lo)
    for _ in range(200):
        geo = lo > 0
        mid = np.where(geo, np.sqrt(lo * np.where(geo, hi, 1.0)), 0.5 * hi)
        below = gamma_cdf(d, mid) < p
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= 1e-6 * hi):
            break

    x = 0.5 * (lo + hi)
    for _ in range(50):
        f = gamma_cdf(d, x) - p
        dens = _pdf(d, x)
        step = np.where(dens > 0, f / np.where(dens > 0, dens, 1.0), 0.0)
        x_new = x - step
        # stay inside the bracket; fall back to bisection otherwise
        outside = (x_new < lo) | (x_new > hi)
        x_new = np.where(outside, 0.5 * (lo + hi), x_new)
        below = gamma_cdf(d, x_new) < p
        lo = np.where(below, np.maximum(lo, x_new), lo)
        hi = np.where(below, hi, np.minimum(hi, x_new))
        done = np.abs(x_new - x) <= rtol * np.abs(x_new)
        x = x_new
        if done.all():
            break
    return float(x[0]) if scalar else x
