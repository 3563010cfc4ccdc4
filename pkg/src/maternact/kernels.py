"""Covariance functions: the Matern family, its spectral density and transfer
function, the RBF kernel, and the Gaussian-envelope composite (locally
stationary) network kernel, plus Gram-matrix construction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import specfun

__all__ = [
    "MaternParams",
    "EnvelopeParams",
    "MaternKernel",
    "RBFKernel",
    "MatNNKernel",
    "matern_kernel",
    "rbf_kernel",
    "matnn_kernel",
    "matern_spectral_density",
    "transfer_modulus_sq",
    "gram_matrix",
    "kernel_to_spectral_numeric",
    "save_gram_csv",
]

# above this smoothness the direct Bessel evaluation over/underflows in
# float64, so the kernel switches to a log-space large-order expansion
_LARGE_NU = 15.0


@dataclass(frozen=True)
class MaternParams:
    """Smoothness nu and length-scale ell of a Matern covariance."""

    nu: float
    ell: float

    def __post_init__(self):
        if not (math.isfinite(self.nu) and self.nu > 0.0):
            raise ValueError(f"nu must be positive, got {self.nu!r}")
        if not (math.isfinite(self.ell) and self.ell > 0.0):
            raise ValueError(f"ell must be positive, got {self.ell!r}")

    @property
    def lam(self) -> float:
        """Decay rate sqrt(2 nu) / ell of the spectral factorization."""
        return math.sqrt(2.0 * self.nu) / self.ell

    @property
    def log_q2(self) -> float:
        """log of the white-noise power q^2 = 2 sqrt(pi) lam^(2 nu) G(nu+1/2)/G(nu)."""
        return (
            math.log(2.0)
            + 0.5 * math.log(math.pi)
            + 2.0 * self.nu * math.log(self.lam)
            + specfun.log_gamma(self.nu + 0.5)
            - specfun.log_gamma(self.nu)
        )

    @property
    def q(self) -> float:
        return math.exp(0.5 * self.log_q2)


@dataclass(frozen=True)
class EnvelopeParams:
    """Gaussian decay envelope of the composite network kernel.

    The envelope variance is determined by the bias-prior variance and the
    Matern length-scale: sigma_m^2 = 2 sigma_b^2 + ell^2.
    """

    sigma_b_sq: float
    ell: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma_b_sq) and self.sigma_b_sq > 0.0):
            raise ValueError(f"sigma_b_sq must be positive, got {self.sigma_b_sq!r}")
        if not (math.isfinite(self.ell) and self.ell > 0.0):
            raise ValueError(f"ell must be positive, got {self.ell!r}")

    @property
    def sigma_m_sq(self) -> float:
        return 2.0 * self.sigma_b_sq + self.ell**2


def _as_vector(x, name: str) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise ValueError(f"{name} must be a scalar or 1-d vector, got shape {v.shape}")
    return v


def _pair_distance(x, x2) -> float:
    a = _as_vector(x, "x")
    b = _as_vector(x2, "x2")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def matern_correlation(params: MaternParams, r) -> np.ndarray:
    """Isotropic Matern correlation kappa(r) for r >= 0 (vectorized).

    kappa(r) = 2^(1-nu)/Gamma(nu) (lam r)^nu K_nu(lam r) with kappa(0) = 1
    handled explicitly; large nu goes through a log-space Bessel expansion.
    """
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr < 0.0):
        raise ValueError("radius must be non-negative")
    nu = params.nu
    z = params.lam * r_arr
    out = np.ones_like(z)
    pos = z > 0.0
    zp = z[pos]
    if zp.size:
        log_front = (1.0 - nu) * math.log(2.0) - specfun.log_gamma(nu)
        if nu <= _LARGE_NU:
            k = np.atleast_1d(specfun.bessel_k(nu, zp))
            vals = np.zeros_like(zp)
            nz = k > 0.0  # K underflows to 0 only at extreme distance
            vals[nz] = np.exp(log_front + nu * np.log(zp[nz]) + np.log(k[nz]))
            out[pos] = vals
        else:
            log_k = np.array([specfun._log_bessel_k_uniform(nu, v) for v in zp])
            out[pos] = np.exp(log_front + nu * np.log(zp) + log_k)
    return out if np.ndim(r) else float(out[0])


class MaternKernel:
    """Stationary Matern covariance as a callable kernel."""

    def __init__(self, params: MaternParams):
        self.params = params

    def __call__(self, x, x2) -> float:
        return float(matern_correlation(self.params, _pair_distance(x, x2)))

    def pairwise(self, X, X2=None) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        X2 = X if X2 is None else np.atleast_2d(np.asarray(X2, dtype=float))
        if X.shape[1] != X2.shape[1]:
            raise ValueError(f"dimension mismatch: {X.shape[1]} vs {X2.shape[1]}")
        return matern_correlation(self.params, _cross_distances(X, X2))

    def diag(self, X) -> np.ndarray:
        return np.ones(np.atleast_2d(X).shape[0])


class RBFKernel:
    """Squared-exponential covariance exp(-r^2 / (2 ell^2))."""

    def __init__(self, ell: float):
        if not (math.isfinite(ell) and ell > 0.0):
            raise ValueError(f"ell must be positive, got {ell!r}")
        self.ell = float(ell)

    def __call__(self, x, x2) -> float:
        r = _pair_distance(x, x2)
        return math.exp(-0.5 * (r / self.ell) ** 2)

    def pairwise(self, X, X2=None) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        X2 = X if X2 is None else np.atleast_2d(np.asarray(X2, dtype=float))
        if X.shape[1] != X2.shape[1]:
            raise ValueError(f"dimension mismatch: {X.shape[1]} vs {X2.shape[1]}")
        r = _cross_distances(X, X2)
        return np.exp(-0.5 * (r / self.ell) ** 2)

    def diag(self, X) -> np.ndarray:
        return np.ones(np.atleast_2d(X).shape[0])


class MatNNKernel:
    """Locally stationary composite kernel:

    scale * exp(-|x|^2 / 2 sigma_m^2) kappa_Matern(x, x') exp(-|x'|^2 / 2 sigma_m^2)
    """

    def __init__(self, params: MaternParams, envelope: EnvelopeParams, scale: float = 1.0):
        if not (math.isfinite(scale) and scale > 0.0):
            raise ValueError(f"scale must be positive, got {scale!r}")
        self.params = params
        self.envelope = envelope
        self.scale = float(scale)

    def _env(self, X: np.ndarray) -> np.ndarray:
        sq = np.sum(X * X, axis=-1)
        return np.exp(-sq / (2.0 * self.envelope.sigma_m_sq))

    def __call__(self, x, x2) -> float:
        a = _as_vector(x, "x")
        b = _as_vector(x2, "x2")
        if a.shape != b.shape:
            raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
        env = self._env(a[None, :])[0] * self._env(b[None, :])[0]
        return self.scale * env * float(matern_correlation(self.params, float(np.linalg.norm(a - b))))

    def pairwise(self, X, X2=None) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        X2 = X if X2 is None else np.atleast_2d(np.asarray(X2, dtype=float))
        if X.shape[1] != X2.shape[1]:
            raise ValueError(f"dimension mismatch: {X.shape[1]} vs {X2.shape[1]}")
        core = matern_correlation(self.params, _cross_distances(X, X2))
        return self.scale * np.outer(self._env(X), self._env(X2)) * core

    def diag(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return self.scale * self._env(X) ** 2


def _cross_distances(X: np.ndarray, X2: np.ndarray) -> np.ndarray:
    sq = (
        np.sum(X * X, axis=1)[:, None]
        + np.sum(X2 * X2, axis=1)[None, :]
        - 2.0 * X @ X2.T
    )
    return np.sqrt(np.maximum(sq, 0.0))


def matern_kernel(params: MaternParams, x, x2) -> float:
    """Matern covariance between two points; exactly 1 at zero distance."""
    return MaternKernel(params)(x, x2)


def rbf_kernel(ell: float, x, x2) -> float:
    return RBFKernel(ell)(x, x2)


def matnn_kernel(params: MaternParams, envelope: EnvelopeParams, scale: float, x, x2) -> float:
    return MatNNKernel(params, envelope, scale)(x, x2)


def matern_spectral_density(params: MaternParams, omega) -> np.ndarray:
    """1-d spectral density q^2 (lam^2 + w^2)^-(nu + 1/2) of the Matern kernel."""
    w = np.asarray(omega, dtype=float)
    out = np.exp(params.log_q2 - (params.nu + 0.5) * np.log(params.lam**2 + w * w))
    return out if np.ndim(omega) else float(out)


def transfer_modulus_sq(params: MaternParams, omega) -> np.ndarray:
    """|G(i w)|^2 for the stable transfer factor G(i w) = (lam + i w)^-(nu+1/2)."""
    w = np.asarray(omega, dtype=float)
    out = (params.lam**2 + w * w) ** -(params.nu + 0.5)
    return out if np.ndim(omega) else float(out)


def gram_matrix(kernel, X, jitter: float = 0.0) -> np.ndarray:
    """Symmetric Gram matrix of `kernel` over the rows of X, plus jitter * I.

    `kernel` is any callable (x, x') -> float; kernels from this module also
    provide a vectorized `pairwise` used when available. The result equals
    the sequential double loop (no order-dependent reductions).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] < 1:
        raise ValueError("X must contain at least one row")
    if jitter < 0.0:
        raise ValueError("jitter must be non-negative")
    if hasattr(kernel, "pairwise"):
        gram = kernel.pairwise(X)
    else:
        n = X.shape[0]
        gram = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                gram[i, j] = gram[j, i] = kernel(X[i], X[j])
    gram = 0.5 * (gram + gram.T)
    if jitter:
        gram = gram + jitter * np.eye(X.shape[0])
    return gram


def kernel_to_spectral_numeric(
    params: MaternParams, omega_grid, r_max: float, n_steps: int
) -> np.ndarray:
    """Spectral density by direct Fourier quadrature of the Matern kernel.

    Symmetric trapezoid rule for S(w) = int kappa(|r|) cos(w r) dr over
    [-r_max, r_max]; a testing utility for the kernel <-> spectrum duality.
    Warns when the kernel has not decayed below 1e-10 at r_max.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be positive, got {n_steps!r}")
    if r_max <= 0.0:
        raise ValueError(f"r_max must be positive, got {r_max!r}")
    tail = float(matern_correlation(params, r_max))
    if tail >= 1e-10:
        warnings.warn(
            f"kernel tail {tail:.3e} at r_max={r_max} exceeds 1e-10; "
            "spectral quadrature may be truncated",
            RuntimeWarning,
        )
    r = np.linspace(-r_max, r_max, n_steps + 1)
    kappa = matern_correlation(params, np.abs(r))
    omega_arr = np.atleast_1d(np.asarray(omega_grid, dtype=float))
    out = np.array([np.trapezoid(kappa * np.cos(w * r), r) for w in omega_arr])
    return out if np.ndim(omega_grid) else float(out[0])


def save_gram_csv(gram: np.ndarray, path) -> None:
    """Row-major CSV export at full precision (%.17g)."""
    gram = np.atleast_2d(np.asarray(gram, dtype=float))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in gram:
            fh.write(",".join("%.17g" % v for v in row) + "\n")
