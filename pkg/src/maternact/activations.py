"""Neural-network activation functions.

The Matern activation is the inverse Laplace transform of the stable
spectral factor of the Matern kernel,

    sigma(x) = q / Gamma(nu + 1/2) * step(x) * x^(nu - 1/2) * exp(-lam x),

with lam = sqrt(2 nu)/ell and q the white-noise normalization. Plain RBF,
ReLU, step, erf, and identity activations are provided for comparison runs.
All activations are vectorized and expose a closed-form derivative for
backprop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .kernels import MaternParams

__all__ = [
    "MaternActivation",
    "RBFActivation",
    "ReLUActivation",
    "StepActivation",
    "ErfActivation",
    "IdentityActivation",
    "matern_q",
    "activate",
    "activate_grad",
    "rbf_limit_of_matern",
    "activation_from_name",
    "ACTIVATION_NAMES",
]

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


def matern_q(params: MaternParams) -> float:
    """Normalization q = sqrt(2 sqrt(pi) lam^(2 nu) Gamma(nu+1/2) / Gamma(nu)),
    evaluated in log space."""
    return params.q


@dataclass(frozen=True)
class MaternActivation:
    """sigma(x) = q/Gamma(nu+1/2) step(x) x^(nu-1/2) e^(-lam x), step(0) := 1.

    nu is restricted to >= 1/2: below that the prefactor x^(nu-1/2) is
    unbounded at the origin. nu = 1/2 gives the discontinuous exponential
    activation (sigma(0) = q); its derivative at 0 is taken as 0.
    """

    nu: float
    ell: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.nu) and self.nu >= 0.5):
            raise ValueError(f"Matern activation requires nu >= 1/2, got {self.nu!r}")
        if not (math.isfinite(self.ell) and self.ell > 0.0):
            raise ValueError(f"ell must be positive, got {self.ell!r}")
        params = MaternParams(self.nu, self.ell)
        object.__setattr__(self, "lam", params.lam)
        # log of q / Gamma(nu + 1/2); folded into one exp per evaluation
        object.__setattr__(
            self, "_log_norm", 0.5 * params.log_q2 - specfun.log_gamma(self.nu + 0.5)
        )

    def __call__(self, x):
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(x_arr)
        pos = x_arr > 0.0
        xp = x_arr[pos]
        if xp.size:
            out[pos] = np.exp(self._log_norm + (self.nu - 0.5) * np.log(xp) - self.lam * xp)
        if self.nu == 0.5:
            out[x_arr == 0.0] = math.exp(self._log_norm)
        return out if np.ndim(x) else float(out[0])

    def grad(self, x):
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(x_arr)
        pos = x_arr > 0.0
        xp = x_arr[pos]
        if xp.size:
            sig = np.exp(self._log_norm + (self.nu - 0.5) * np.log(xp) - self.lam * xp)
            out[pos] = sig * ((self.nu - 0.5) / xp - self.lam)
        if self.nu == 1.5:
            # the one order with a finite nonzero right-limit at 0
            out[x_arr == 0.0] = math.exp(self._log_norm)
        return out if np.ndim(x) else float(out[0])


@dataclass(frozen=True)
class RBFActivation:
    """Gaussian bump exp(-(x - center)^2 / width^2)."""

    center: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.width) and self.width > 0.0):
            raise ValueError(f"width must be positive, got {self.width!r}")

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        return np.exp(-((x_arr - self.center) / self.width) ** 2)

    def grad(self, x):
        x_arr = np.asarray(x, dtype=float)
        u = x_arr - self.center
        return -2.0 * u / self.width**2 * np.exp(-((u / self.width) ** 2))


@dataclass(frozen=True)
class ReLUActivation:
    def __call__(self, x):
        return np.maximum(np.asarray(x, dtype=float), 0.0)

    def grad(self, x):
        return (np.asarray(x, dtype=float) > 0.0).astype(float)


@dataclass(frozen=True)
class StepActivation:
    """Heaviside step with step(0) := 1; derivative identically 0."""

    def __call__(self, x):
        return (np.asarray(x, dtype=float) >= 0.0).astype(float)

    def grad(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class ErfActivation:
    def __call__(self, x):
        return specfun.erf(x)

    def grad(self, x):
        x_arr = np.asarray(x, dtype=float)
        return _TWO_OVER_SQRT_PI * np.exp(-x_arr * x_arr)


@dataclass(frozen=True)
class IdentityActivation:
    def __call__(self, x):
        return np.asarray(x, dtype=float) + 0.0

    def grad(self, x):
        return np.ones_like(np.asarray(x, dtype=float))


def activate(kind, x):
    """Evaluate an activation object at x (scalar or array)."""
    return kind(x)


def activate_grad(kind, x):
    """Closed-form derivative of an activation at x."""
    return kind.grad(x)


def rbf_limit_of_matern(params: MaternParams) -> tuple[float, float]:
    """Center and peak amplitude of the near-Gaussian large-nu activation.

    For nu >= 10 and ell = 1 the activation approaches
    amplitude * exp(-(x - center)^2) with center (nu + 1/2)/sqrt(2 nu);
    the amplitude is the activation value at its argmax (nu - 1/2)/lam.
    """
    if params.nu < 10.0:
        raise ValueError(f"limit regime requires nu >= 10, got {params.nu!r}")
    if abs(params.ell - 1.0) > 1e-12:
        raise ValueError(f"limit regime is stated for ell = 1, got {params.ell!r}")
    center = (params.nu + 0.5) / math.sqrt(2.0 * params.nu)
    x_peak = (params.nu - 0.5) / params.lam
    amplitude = MaternActivation(params.nu, params.ell)(x_peak)
    return center, amplitude


def _matern_named(nu: float):
    def make(ell: float = 1.0):
        return MaternActivation(nu, ell)

    return make


_FACTORIES = {
    "matern12": _matern_named(0.5),
    "matern32": _matern_named(1.5),
    "matern52": _matern_named(2.5),
    "rbf": lambda ell=1.0: RBFActivation(0.0, 1.0),
    "relu": lambda ell=1.0: ReLUActivation(),
    "step": lambda ell=1.0: StepActivation(),
    "erf": lambda ell=1.0: ErfActivation(),
    "identity": lambda ell=1.0: IdentityActivation(),
}

ACTIVATION_NAMES = tuple(sorted(_FACTORIES))


def activation_from_name(name: str, ell: float = 1.0):
    """Build an activation from its CLI name; ell only affects Matern kinds."""
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ValueError(
            f"unknown activation {name!r}; choose from {', '.join(ACTIVATION_NAMES)}"
        ) from None
    return factory(ell)
