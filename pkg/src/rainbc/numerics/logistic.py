"""Logistic regression by iteratively reweighted least squares."""

from __future__ import annotations

import numpy as np
from scipy.special import expit


class SeparationError(ValueError):
    pass


def _loglik(eta, y):
    # log(1 + exp(eta)) computed stably
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def irls_logistic(X, y, tol: float = 1e-8, max_iter: int = 100,
                  max_norm: float = 50.0) -> np.ndarray:
    """Coefficients maximising the Bernoulli log-likelihood of ``y`` given ``X``.

    Iterates Newton steps until the log-likelihood changes by less than
    ``tol``, then takes one polishing step so the score equations hold tightly.
    A coefficient vector whose norm exceeds ``max_norm`` is treated as
    divergence caused by (quasi-)complete separation.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise ValueError("design and response sizes differ")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("response must be binary")
    if y.min() == y.max():
        raise SeparationError(
            f"response is constant ({int(y[0])}); intercept diverges"
        )
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise np.linalg.LinAlgError("design matrix is rank deficient")

    beta = np.zeros(X.shape[1])
    ll = _loglik(X @ beta, y)
    converged = False
    for _ in range(max_iter):
        beta = beta + _newton_step(X, y, beta)
        if np.linalg.norm(beta) > max_norm:
            raise SeparationError(
                f"coefficient norm {np.linalg.norm(beta):.3g} exceeds {max_norm:g}; "
                "data look separable"
            )
        ll_new = _loglik(X @ beta, y)
        if abs(ll_new - ll) < tol:
            converged = True
            break
        ll = ll_new
    if not converged:
        raise SeparationError(f"IRLS did not converge in {max_iter} iterations")
    return beta + _newton_step(X, y, beta)


def _newton_step(X, y, beta):
    p = expit(X @ beta)
    w = p * (1.0 - p)
    grad = X.T @ (y - p)
    hess = (X * w[:, None]).T @ X
    return np.linalg.solve(hess, grad)


def logistic_score(X, y, beta) -> np.ndarray:
    """Gradient of the log-likelihood at ``beta``."""
    p = expit(np.asarray(X) @ beta)
    return np.asarray(X).T @ (np.asarray(y, dtype=float) - p)
