import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize

from rainbc.numerics import Rbf, SmoConvergenceError, dual_objective, kkt_gap, smo_solve


def grid_oracle_3(K, y, C, eps):
    """Brute-force minimum over c = alpha - alpha_star with c3 = -c1 - c2.

    A coarse grid locates the basin, then two zoomed grids refine it.
    """
    def obj(c1, c2):
        c3 = -c1 - c2
        c = np.stack([c1, c2, c3])
        quad = 0.5 * np.einsum("i...,ij,j...->...", c, K, c)
        val = quad + eps * np.abs(c).sum(0) - np.tensordot(y, c, 1)
        return np.where(np.abs(c3) <= C, val, np.inf)

    lo1 = lo2 = -C
    width = 2 * C
    for _ in range(3):
        g1 = np.linspace(lo1, lo1 + width, 401)
        g2 = np.linspace(lo2, lo2 + width, 401)
        A, B = np.meshgrid(g1, g2, indexing="ij")
        v = obj(A, B)
        i, j = np.unravel_index(np.argmin(v), v.shape)
        best = v[i, j]
        width /= 20
        lo1 = np.clip(g1[i] - width / 2, -C, C - width)
        lo2 = np.clip(g2[j] - width / 2, -C, C - width)
    return float(best)


def qp_oracle(K, y, C, eps):
    """Dense QP over [alpha, alpha_star] with SLSQP (oracle only)."""
    n = len(y)
    Q = np.block([[K, -K], [-K, K]])
    p = np.r_[eps - y, eps + y]
    z = np.r_[np.ones(n), -np.ones(n)]
    best = np.inf
    for x0 in (np.zeros(2 * n), np.full(2 * n, C / 2)):
        res = minimize(lambda b: 0.5 * b @ Q @ b + p @ b, x0, jac=lambda b: Q @ b + p,
                       bounds=[(0, C)] * (2 * n),
                       constraints=[{"type": "eq", "fun": lambda b: z @ b, "jac": lambda b: z}],
                       method="SLSQP", options={"ftol": 1e-14, "maxiter": 1000})
        if z @ res.x == pytest.approx(0, abs=1e-8):
            best = min(best, res.fun)
    return best


def random_problem(rng, n):
    X = rng.random((n, 2))
    y = rng.random(n)
    lam = rng.choice([0.1, 0.3, 1.0])
    return Rbf(1.0, lam).gram(X), y, float(rng.choice([1.0, 10.0, 100.0])), \
        float(rng.choice([0.01, 0.05, 0.1]))


def test_three_point_problem_matches_grid_oracle():
    K = Rbf(1.0, 0.5).gram(np.array([[0.0, 0.1], [0.4, 0.9], [1.0, 0.3]]))
    y = np.array([0.2, 0.9, 0.4])
    for C, eps in [(1.0, 0.05), (0.3, 0.01), (10.0, 0.1)]:
        r = smo_solve(K, y, C, eps)
        got = dual_objective(K, y, eps, r.alpha, r.alpha_star)
        assert got == pytest.approx(grid_oracle_3(K, y, C, eps), abs=1e-3)


def test_twenty_random_problems_match_dense_qp():
    rng = np.random.default_rng(99)
    for _ in range(20):
        n = int(rng.integers(2, 9))
        K, y, C, eps = random_problem(rng, n)
        r = smo_solve(K, y, C, eps)
        got = dual_objective(K, y, eps, r.alpha, r.alpha_star)
        assert abs(got - qp_oracle(K, y, C, eps)) <= 1e-3


def test_constant_targets_give_empty_solution():
    K = Rbf(1.0, 0.3).gram(np.random.default_rng(0).random((12, 2)))
    r = smo_solve(K, np.full(12, 0.37), 10.0, 0.05)
    assert not r.alpha.any() and not r.alpha_star.any()
    assert r.b == pytest.approx(0.37, abs=1e-12)


def test_targets_inside_tube_give_zero_solution():
    K = Rbf(1.0, 0.3).gram(np.random.default_rng(1).random((10, 2)))
    y = np.random.default_rng(2).uniform(-0.04, 0.04, 10)
    r = smo_solve(K, y, 1.0, 0.05)
    assert not r.coef.any()
    assert abs(r.b) <= 0.05


@given(st.integers(0, 2**32 - 1), st.integers(2, 40))
def test_constraints_and_kkt(seed, n):
    K, y, C, eps = random_problem(np.random.default_rng(seed), n)
    r = smo_solve(K, y, C, eps)
    assert np.all((r.alpha >= 0) & (r.alpha <= C))
    assert np.all((r.alpha_star >= 0) & (r.alpha_star <= C))
    assert abs(r.coef.sum()) <= 1e-9
    assert kkt_gap(K, y, C, eps, r.alpha, r.alpha_star) <= 1e-3
    # bias is consistent with the margin conditions of the free multipliers
    f = K @ r.coef + r.b
    free = (r.alpha > 1e-9) & (r.alpha < C - 1e-9)
    assert np.all(np.abs(y[free] - f[free] - eps) <= 1e-3)


def test_iteration_cap_raises():
    K, y, _C, _eps = random_problem(np.random.default_rng(5), 60)
    with pytest.raises(SmoConvergenceError, match="KKT gap"):
        smo_solve(K, y, 100.0, 0.01, tol=1e-12, max_passes=0)


def test_input_validation():
    with pytest.raises(ValueError):
        smo_solve(np.eye(2), [1.0, 2.0, 3.0], 1.0, 0.1)
    with pytest.raises(ValueError):
        smo_solve(np.eye(2), [1.0, 2.0], 0.0, 0.1)
