"""Exact Gaussian-process regression (Cholesky-based) for desk-scale data."""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy.linalg import LinAlgError, cholesky, solve_triangular
from sklearn.base import BaseEstimator, RegressorMixin

from .kernels import MaternKernel, MaternParams, gram_matrix

__all__ = ["GPRegressor", "NumericalError"]

logger = logging.getLogger(__name__)

_MAX_TRAIN_POINTS = 10_000


class NumericalError(RuntimeError):
    """Gram matrix not positive definite even after jitter escalation."""


class GPRegressor(BaseEstimator, RegressorMixin):
    """GP posterior mean/std under a fixed kernel and Gaussian noise.

    Parameters
    ----------
    kernel : callable (x, x') -> float, optional
        Covariance function; kernels from `maternact.kernels` are used
        vectorized. Defaults to Matern nu=5/2, ell=1.
    noise_var : float
        Observation noise variance added to the Gram diagonal. The default
        matches the 0.02-sd noise of the 1-d toy task.
    jitter : float
        Initial extra diagonal term for the Cholesky; escalated by decades
        up to `max_jitter` on failure (each escalation is logged).
    """

    def __init__(self, kernel=None, noise_var: float = 4e-4, jitter: float = 1e-10,
                 max_jitter: float = 1e-6):
        self.kernel = kernel
        self.noise_var = noise_var
        self.jitter = jitter
        self.max_jitter = max_jitter

    def _kernel(self):
        return self.kernel if self.kernel is not None else MaternKernel(MaternParams(2.5, 1.0))

    def fit(self, X, y):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float).ravel()
        if X.shape[0] != y.shape[0]:
            raise ValueError("X and y lengths differ")
        if X.shape[0] > _MAX_TRAIN_POINTS:
            raise ValueError(
                f"exact GP is limited to {_MAX_TRAIN_POINTS} points (O(n^3) solve), got {X.shape[0]}"
            )
        if self.noise_var < 0.0 or self.jitter < 0.0:
            raise ValueError("noise_var and jitter must be non-negative")
        kernel = self._kernel()
        gram = gram_matrix(kernel, X, 0.0) + self.noise_var * np.eye(X.shape[0])
        jitter = self.jitter
        while True:
            try:
                lower = cholesky(gram + jitter * np.eye(X.shape[0]), lower=True)
                break
            except LinAlgError:
                nxt = max(jitter, 1e-10) * 10.0 if jitter else 1e-10
                if nxt > self.max_jitter:
                    raise NumericalError(
                        f"Cholesky failed with jitter up to {self.max_jitter}"
                    ) from None
                logger.warning("Cholesky failed at jitter %.1e; escalating to %.1e", jitter, nxt)
                jitter = nxt
        self.X_ = X
        self.L_ = lower
        self.alpha_ = solve_triangular(
            lower.T, solve_triangular(lower, y, lower=True), lower=False
        )
        self.jitter_ = jitter
        return self

    def predict(self, X, return_std: bool = False):
        if not hasattr(self, "L_"):
            raise RuntimeError("predict called before fit")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.X_.shape[1]:
            raise ValueError(f"query dimension {X.shape[1]} != training dimension {self.X_.shape[1]}")
        kernel = self._kernel()
        if hasattr(kernel, "pairwise"):
            k_star = kernel.pairwise(self.X_, X)  # (n, m)
        else:
            k_star = np.array([[kernel(xi, xq) for xq in X] for xi in self.X_])
        mean = k_star.T @ self.alpha_
        if not return_std:
            return mean
        v = solve_triangular(self.L_, k_star, lower=True)
        if hasattr(kernel, "diag"):
            prior = kernel.diag(X)
        else:
            prior = np.array([kernel(xq, xq) for xq in X])
        var = np.maximum(prior - np.sum(v * v, axis=0), 0.0)
        return mean, np.sqrt(var)
