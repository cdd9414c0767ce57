"""Empirical CDF with Hazen plotting positions.

The curve joins the points ``(x_(i), (i - 0.5)/n)``. A run of tied values is a
vertical segment; evaluating exactly at the tied value returns the midpoint of
that segment, while values between two distinct order statistics interpolate
from the top of the lower run to the bottom of the upper one. Zero-inflated
rainfall samples need this: the interpolation just above 0 must start from the
last zero's position, otherwise the wet-day probability is badly underestimated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EmpiricalCdf:
    values: np.ndarray
    positions: np.ndarray

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def p_min(self) -> float:
        return 0.5 / self.n

    @property
    def p_max(self) -> float:
        return 1.0 - 0.5 / self.n


def ecdf_fit(sample) -> EmpiricalCdf:
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("empirical CDF needs a non-empty sample")
    if np.isnan(x).any():
        raise ValueError("sample contains NaN")
    n = x.size
    p = (np.arange(1, n + 1) - 0.5) / n
    x.setflags(write=False)
    p.setflags(write=False)
    return EmpiricalCdf(x, p)


def ecdf_eval(cdf: EmpiricalCdf, x):
    """Probability of ``x`` on the interpolated curve, clamped to the end positions."""
    xs, ps = cdf.values, cdf.positions
    uniq, first = np.unique(xs, return_index=True)
    last = np.r_[first[1:], xs.size] - 1
    lo, hi = ps[first], ps[last]

    q = np.asarray(x, dtype=float)
    j = np.clip(np.searchsorted(uniq, q, side="right") - 1, 0, uniq.size - 1)
    exact = uniq[j] == q
    out = np.empty(q.shape)
    if uniq.size > 1:
        k = np.minimum(j, uniq.size - 2)
        x0, x1 = uniq[k], uniq[k + 1]
        w = (q - x0) / (x1 - x0)
        out = hi[k] + w * (lo[k + 1] - hi[k])
    out = np.where(exact, 0.5 * (lo[j] + hi[j]), out)
    out = np.where(q < uniq[0], cdf.p_min, out)
    out = np.where(q > uniq[-1], cdf.p_max, out)
    out = np.clip(out, cdf.p_min, cdf.p_max)
    return float(out) if out.ndim == 0 else out


def ecdf_quantile(cdf: EmpiricalCdf, p):
    """Inverse of the interpolated curve; probabilities outside the positions clamp."""
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("probability must lie in [0, 1]")
    out = np.interp(p, cdf.positions, cdf.values)
    return float(out) if out.ndim == 0 else out
