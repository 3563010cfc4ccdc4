"""Matern-family neural activations, their locally stationary network
kernels, and MC-dropout uncertainty experiments."""

from .activations import (
    ErfActivation,
    IdentityActivation,
    MaternActivation,
    RBFActivation,
    ReLUActivation,
    StepActivation,
    activation_from_name,
)
from .data import Dataset, gen_banana_like, gen_regression_1d, kfold, load_csv
from .estimators import MLPClassifier, MLPRegressor
from .gp import GPRegressor
from .kernels import (
    EnvelopeParams,
    MaternKernel,
    MaternParams,
    MatNNKernel,
    RBFKernel,
    gram_matrix,
)
from .mc_kernel import (
    BiasPrior,
    BinaryWhite,
    GaussianWeights,
    RandomFeatureConfig,
    kernel_curve,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "MaternActivation",
    "RBFActivation",
    "ReLUActivation",
    "StepActivation",
    "ErfActivation",
    "IdentityActivation",
    "activation_from_name",
    "MaternParams",
    "EnvelopeParams",
    "MaternKernel",
    "RBFKernel",
    "MatNNKernel",
    "gram_matrix",
    "BinaryWhite",
    "GaussianWeights",
    "BiasPrior",
    "RandomFeatureConfig",
    "kernel_curve",
    "GPRegressor",
    "MLPClassifier",
    "MLPRegressor",
    "Dataset",
    "gen_regression_1d",
    "gen_banana_like",
    "load_csv",
    "kfold",
]
