"""Cholesky factorisation with a diagonal jitter ladder."""

from __future__ import annotations

import numpy as np
from scipy import linalg


class FactorizationError(np.linalg.LinAlgError):
    pass


def cholesky_jitter(a, start: float = 1e-10, stop: float = 1e-4):
    """Lower Cholesky factor of ``a``, adding diagonal jitter only if needed.

    Jitter steps are ``start * trace/n`` escalated by 10x up to ``stop * trace/n``.
    Returns ``(L, jitter)`` where ``jitter`` is the absolute amount added.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    n = a.shape[0]
    try:
        return linalg.cholesky(a, lower=True, check_finite=True), 0.0
    except linalg.LinAlgError:
        pass
    base = max(np.trace(a) / n, np.finfo(float).tiny)
    level = start
    while level <= stop * (1 + 1e-9):
        jitter = level * base
        try:
            return linalg.cholesky(a + jitter * np.eye(n), lower=True), jitter
        except linalg.LinAlgError:
            level *= 10.0
    raise FactorizationError(
        f"matrix not positive definite after jitter {stop:g} * trace/n"
    )


def cho_solve_lower(factor: np.ndarray, b) -> np.ndarray:
    return linalg.cho_solve((factor, True), np.asarray(b, dtype=float))


def cholesky_solve(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` for symmetric positive-definite ``a``."""
    factor, _ = cholesky_jitter(a)
    return cho_solve_lower(factor, b)
