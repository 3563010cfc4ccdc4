"""Closed-form eigenbasis of the RBF covariance operator under a Gaussian
input density, orthonormality verification by Gauss-Hermite quadrature, and
the truncated Mercer-series kernel reconstruction.

For kernel exp(-alpha^2 (x - x')^2) and input density
w(x) = beta/sqrt(pi) exp(-beta^2 x^2), with s = sqrt(1 + (2 alpha / beta)^2):

    gamma_j = beta alpha^(2j) (beta^2 (1 + s)/2 + alpha^2)^-(j + 1/2)
    phi_j(x) = s^(1/4) / sqrt(2^j j!) exp(-(s - 1) beta^2 x^2 / 2) H_j(sqrt(s) beta x)

The inverse (Green's function) expansion sum gamma_j^-1 phi phi is
deliberately not provided: inverting the geometrically decaying eigenvalues
is numerically unstable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun

__all__ = [
    "EigenParams",
    "eigenvalue",
    "eigenvalues",
    "eigenfunction",
    "eigenfunction_matrix",
    "orthonormality_check",
    "mercer_reconstruct",
]

_MAX_EIGENVALUE_INDEX = 200
_MAX_EIGENFUNCTION_INDEX = 64


@dataclass(frozen=True)
class EigenParams:
    """Kernel shape alpha (alpha^2 = 1/(2 ell^2)) and density shape beta."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")
        if not (math.isfinite(self.beta) and self.beta > 0.0):
            raise ValueError(f"beta must be positive, got {self.beta!r}")

    @property
    def stretch(self) -> float:
        """s = sqrt(1 + (2 alpha / beta)^2)."""
        return math.sqrt(1.0 + (2.0 * self.alpha / self.beta) ** 2)

    @property
    def denom(self) -> float:
        """beta^2 (1 + s) / 2 + alpha^2, the eigenvalue base."""
        return self.beta**2 * (1.0 + self.stretch) / 2.0 + self.alpha**2


def eigenvalue(params: EigenParams, j: int) -> float:
    """j-th eigenvalue, strictly geometric in j; computed in log space."""
    if j != int(j) or j < 0 or j > _MAX_EIGENVALUE_INDEX:
        raise ValueError(f"eigenvalue index must be in [0, {_MAX_EIGENVALUE_INDEX}], got {j!r}")
    log_gamma_j = (
        math.log(params.beta)
        + 2.0 * j * math.log(params.alpha)
        - (j + 0.5) * math.log(params.denom)
    )
    return math.exp(log_gamma_j)


def eigenvalues(params: EigenParams, count: int) -> np.ndarray:
    """First `count` eigenvalues (count <= 201)."""
    if count < 1 or count > _MAX_EIGENVALUE_INDEX + 1:
        raise ValueError(f"count must be in [1, {_MAX_EIGENVALUE_INDEX + 1}], got {count!r}")
    ratio = params.alpha**2 / params.denom
    first = params.beta / math.sqrt(params.denom)
    return first * ratio ** np.arange(count)


def _normalized_hermites(params: EigenParams, count: int, x: np.ndarray) -> np.ndarray:
    """(count, len(x)) matrix of phi_j(x), j < count, by the normalized
    recurrence h_{j+1} = x sqrt(2/(j+1)) h_j - sqrt(j/(j+1)) h_{j-1}; the
    1/sqrt(2^j j!) prefactor is folded in so nothing overflows at j ~ 64."""
    s = params.stretch
    u = math.sqrt(s) * params.beta * x
    envelope = s**0.25 * np.exp(-(s - 1.0) * (params.beta * x) ** 2 / 2.0)
    out = np.empty((count, x.size))
    h_prev = np.ones_like(u)
    out[0] = envelope * h_prev
    if count == 1:
        return out
    h = math.sqrt(2.0) * u
    out[1] = envelope * h
    for j in range(1, count - 1):
        h_prev, h = h, u * math.sqrt(2.0 / (j + 1)) * h - math.sqrt(j / (j + 1)) * h_prev
        out[j + 1] = envelope * h
    return out


def eigenfunction(params: EigenParams, j: int, x) -> float | np.ndarray:
    """j-th eigenfunction phi_j(x); vectorized in x, validated for j <= 64."""
    if j != int(j) or j < 0 or j > _MAX_EIGENFUNCTION_INDEX:
        raise ValueError(
            f"eigenfunction index must be in [0, {_MAX_EIGENFUNCTION_INDEX}], got {j!r}"
        )
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    vals = _normalized_hermites(params, int(j) + 1, x_arr)[-1]
    return vals if np.ndim(x) else float(vals[0])


def eigenfunction_matrix(params: EigenParams, count: int, x) -> np.ndarray:
    """phi_j(x) for all j < count as a (count, n) matrix."""
    if count < 1 or count > _MAX_EIGENFUNCTION_INDEX + 1:
        raise ValueError(f"count must be in [1, {_MAX_EIGENFUNCTION_INDEX + 1}], got {count!r}")
    return _normalized_hermites(params, count, np.atleast_1d(np.asarray(x, dtype=float)))


def orthonormality_check(params: EigenParams, i: int, j: int, quad_order: int) -> float:
    """Gauss-Hermite value of int phi_i(x) phi_j(x) w(x) dx (expected delta_ij).

    The substitution u = sqrt(s) beta x turns the integrand into a
    polynomial times e^{-u^2}, so the rule of sufficient order is exact up
    to rounding. quad_order must be >= 2 max(i, j) + 8.
    """
    if quad_order < 2 * max(i, j) + 8:
        raise ValueError(
            f"quad_order {quad_order} insufficient for (i, j) = ({i}, {j}); "
            f"need >= {2 * max(i, j) + 8}"
        )
    rule = specfun.gauss_hermite(quad_order)
    scale = math.sqrt(params.stretch) * params.beta
    x = rule.nodes / scale
    phis = _normalized_hermites(params, max(i, j) + 1, x)
    density = params.beta / math.sqrt(math.pi) * np.exp(-((params.beta * x) ** 2))
    integrand = phis[i] * phis[j] * density * np.exp(rule.nodes**2) / scale
    return float(rule.weights @ integrand)


def mercer_reconstruct(params: EigenParams, terms: int, x, x2) -> float:
    """Truncated Mercer series sum_{j < terms} gamma_j phi_j(x) phi_j(x')."""
    if terms < 1 or terms > _MAX_EIGENFUNCTION_INDEX + 1:
        raise ValueError(f"terms must be in [1, {_MAX_EIGENFUNCTION_INDEX + 1}], got {terms!r}")
    gammas = eigenvalues(params, terms)
    phi_x = _normalized_hermites(params, terms, np.atleast_1d(float(x)))[:, 0]
    phi_x2 = _normalized_hermites(params, terms, np.atleast_1d(float(x2)))[:, 0]
    # grouping (phi phi) first keeps the sum bit-exactly symmetric in (x, x2)
    return float(np.sum(gammas * (phi_x * phi_x2)))
