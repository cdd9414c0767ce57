"""Sequential minimal optimisation for the epsilon-SVR dual.

The dual is written over ``beta = [alpha, alpha_star]`` (length 2n) as

    min 0.5 * beta' Q beta + p' beta
    s.t. z' beta = 0,  0 <= beta <= C

with ``z = [+1]*n + [-1]*n``, ``Q[s, t] = z_s z_t K[s % n, t % n]`` and
``p = [eps - y, eps + y]``.  The regression function is
``f(x) = sum_i (alpha_i - alpha_star_i) K(x_i, x) + b``.

Each iteration picks the maximal KKT violator ``i`` and pairs it with the
partner giving the largest second-order decrease of the objective, then
solves the two-variable subproblem analytically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

TAU = 1e-12


class SmoConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class SmoResult:
    alpha: np.ndarray
    alpha_star: np.ndarray
    b: float
    iterations: int
    gap: float

    @property
    def coef(self) -> np.ndarray:
        return self.alpha - self.alpha_star


@njit(cache=True)
def _solve(K, y, C, eps, tol, max_iter):
    n = K.shape[0]
    m = 2 * n
    z = np.empty(m)
    G = np.empty(m)
    for t in range(n):
        z[t] = 1.0
        z[t + n] = -1.0
        G[t] = eps - y[t]
        G[t + n] = eps + y[t]
    beta = np.zeros(m)
    diag = np.empty(n)
    for t in range(n):
        diag[t] = K[t, t]
    it = 0
    gap = 0.0
    while True:
        # i: maximal violator in I_up
        gmax = -np.inf
        i = -1
        for t in range(m):
            if z[t] > 0:
                if beta[t] < C:
                    v = -G[t]
                    if v >= gmax:
                        gmax = v
                        i = t
            else:
                if beta[t] > 0:
                    v = G[t]
                    if v >= gmax:
                        gmax = v
                        i = t
        # j: second-order choice in I_low; gmin tracks the first-order gap
        gmin = np.inf
        j = -1
        best = np.inf
        ii = i % n if i >= 0 else 0
        Ki = K[ii]
        for t in range(m):
            in_low = (z[t] > 0 and beta[t] > 0) or (z[t] < 0 and beta[t] < C)
            if not in_low:
                continue
            v = -z[t] * G[t]
            gmin = min(gmin, v)
            diff = gmax - v
            if diff > 0 and i >= 0:
                tt = t % n
                a = Ki[ii] + diag[tt] - 2.0 * Ki[tt]
                if a <= 0:
                    a = TAU
                obj = -(diff * diff) / a
                if obj <= best:
                    best = obj
                    j = t
        gap = gmax - gmin
        if i < 0 or j < 0 or gap < tol:
            break
        if it >= max_iter:
            break
        it += 1

        ii = i % n
        jj = j % n
        Qij = z[i] * z[j] * K[ii, jj]
        Qii = K[ii, ii]
        Qjj = K[jj, jj]
        old_i = beta[i]
        old_j = beta[j]
        if z[i] != z[j]:
            quad = Qii + Qjj + 2.0 * Qij
            if quad <= 0:
                quad = TAU
            delta = (-G[i] - G[j]) / quad
            d = beta[i] - beta[j]
            beta[i] += delta
            beta[j] += delta
            if d > 0:
                if beta[j] < 0:
                    beta[j] = 0.0
                    beta[i] = d
            else:
                if beta[i] < 0:
                    beta[i] = 0.0
                    beta[j] = -d
            if d > 0:
                if beta[i] > C:
                    beta[i] = C
                    beta[j] = C - d
            else:
                if beta[j] > C:
                    beta[j] = C
                    beta[i] = C + d
        else:
            quad = Qii + Qjj - 2.0 * Qij
            if quad <= 0:
                quad = TAU
            delta = (G[i] - G[j]) / quad
            s = beta[i] + beta[j]
            beta[i] -= delta
            beta[j] += delta
            if s > C:
                if beta[i] > C:
                    beta[i] = C
                    beta[j] = s - C
            else:
                if beta[j] < 0:
                    beta[j] = 0.0
                    beta[i] = s
            if s > C:
                if beta[j] > C:
                    beta[j] = C
                    beta[i] = s - C
            else:
                if beta[i] < 0:
                    beta[i] = 0.0
                    beta[j] = s
        di = beta[i] - old_i
        dj = beta[j] - old_j
        ci = z[i] * di
        cj = z[j] * dj
        Ki = K[ii]
        Kj = K[jj]
        for tt in range(n):
            u = ci * Ki[tt] + cj * Kj[tt]
            G[tt] += u
            G[tt + n] -= u

    # bias from free variables, or the midpoint of the feasible interval
    ub = np.inf
    lb = -np.inf
    nfree = 0
    sfree = 0.0
    for t in range(m):
        yg = z[t] * G[t]
        if beta[t] >= C:
            if z[t] < 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        elif beta[t] <= 0:
            if z[t] > 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        else:
            nfree += 1
            sfree += yg
    if nfree > 0:
        rho = sfree / nfree
    else:
        rho = 0.5 * (ub + lb)
    return beta, -rho, it, gap


def smo_solve(K, y, C: float, epsilon: float, tol: float = 1e-3,
              max_passes: int = 10_000) -> SmoResult:
    """Solve the epsilon-SVR dual for Gram matrix ``K`` and targets ``y``.

    ``max_passes`` bounds the work at ``max_passes * n`` pair updates.
    Raises :class:`SmoConvergenceError` when the KKT gap is still above ``tol``
    at the cap.
    """
    K = np.ascontiguousarray(K, dtype=float)
    y = np.ascontiguousarray(y, dtype=float).ravel()
    n = y.size
    if K.shape != (n, n):
        raise ValueError(f"kernel matrix shape {K.shape} does not match {n} targets")
    if C <= 0 or epsilon < 0:
        raise ValueError("need C > 0 and epsilon >= 0")
    beta, b, it, gap = _solve(K, y, float(C), float(epsilon), float(tol),
                              int(max_passes) * max(n, 1))
    if gap >= tol:
        raise SmoConvergenceError(
            f"SMO stopped after {it} updates with KKT gap {gap:.3g} > {tol:g}"
        )
    return SmoResult(beta[:n].copy(), beta[n:].copy(), float(b), int(it), float(gap))


def dual_objective(K, y, epsilon: float, alpha, alpha_star) -> float:
    """Dual objective in minimisation form (lower is better)."""
    c = np.asarray(alpha) - np.asarray(alpha_star)
    return float(0.5 * c @ K @ c + epsilon * np.sum(np.asarray(alpha) + alpha_star)
                 - np.asarray(y) @ c)


def kkt_gap(K, y, C: float, epsilon: float, alpha, alpha_star) -> float:
    """Largest first-order KKT violation ``m(beta) - M(beta)`` of a dual point."""
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    c = np.asarray(alpha) - np.asarray(alpha_star)
    f = K @ c
    g_a = f + epsilon - y            # gradient wrt alpha
    g_s = -f + epsilon + y           # gradient wrt alpha_star
    up = np.r_[-g_a[alpha < C], g_s[alpha_star > 0]]
    low = np.r_[-g_a[alpha > 0], g_s[alpha_star < C]]
    if up.size == 0 or low.size == 0:
        return -np.inf
    return float(up.max() - low.min())
