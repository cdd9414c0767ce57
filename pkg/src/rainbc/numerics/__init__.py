"""Numerical building blocks: empirical CDFs, gamma fitting, kernels,
Cholesky solves, IRLS logistic regression and the SVR dual solver."""

from .ecdf import EmpiricalCdf, ecdf_eval, ecdf_fit, ecdf_quantile
from .gamma import (
                    GammaDist,
                    GammaFit,
                    GammaFitError,
                    gamma_cdf,
                    gamma_mle,
                    gamma_moments,
                    gamma_quantile,
)
from .kernels import KernelSpec, Matern, Rbf, kernel_eval, matern, rbf
from .linalg import FactorizationError, cholesky_jitter, cholesky_solve
from .logistic import SeparationError, irls_logistic, logistic_score
from .smo import SmoConvergenceError, SmoResult, dual_objective, kkt_gap, smo_solve

__all__ = [
                    "EmpiricalCdf",
                    "FactorizationError",
                    "GammaDist",
                    "GammaFit",
                    "GammaFitError",
                    "KernelSpec",
                    "Matern",
                    "Rbf",
                    "SeparationError",
                    "SmoConvergenceError",
                    "SmoResult",
                    "cholesky_jitter",
                    "cholesky_solve",
                    "dual_objective",
                    "ecdf_eval",
                    "ecdf_fit",
                    "ecdf_quantile",
                    "gamma_cdf",
                    "gamma_mle",
                    "gamma_moments",
                    "gamma_quantile",
                    "irls_logistic",
                    "kernel_eval",
                    "kkt_gap",
                    "logistic_score",
                    "matern",
                    "rbf",
                    "smo_solve",
]
