"""Scikit-learn style front ends for the hand-written MLP.

`MLPClassifier` / `MLPRegressor` expose fit/predict/get_params over the
`nn` module, so the experiment pipelines compose with sklearn tooling
(clone, Pipeline, model_selection). The paper-protocol convention is kept:
the configurable activation and the dropout sit on the LAST hidden layer;
any earlier hidden layers use `early_activation` (ReLU by default) and no
dropout.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import nn
from .activations import IdentityActivation, activation_from_name

__all__ = ["MLPClassifier", "MLPRegressor"]


def _resolve(activation, ell):
    if isinstance(activation, str):
        return activation_from_name(activation, ell)
    return activation


class _MLPBase(BaseEstimator):
    def __init__(
        self,
        hidden_layer_sizes=(50,),
        activation="matern52",
        early_activation="relu",
        ell=1.0,
        dropout=0.2,
        epochs=2000,
        batch_size=400,
        learning_rate=0.02,
        lr_decay_epochs=(250, 500, 1000),
        lr_decay_factor=0.1,
        seed=0,
    ):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.activation = activation
        self.early_activation = early_activation
        self.ell = ell
        self.dropout = dropout
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.lr_decay_epochs = lr_decay_epochs
        self.lr_decay_factor = lr_decay_factor
        self.seed = seed

    def _architecture(self, in_dim: int, out_dim: int) -> list[nn.LayerSpec]:
        sizes = list(self.hidden_layer_sizes)
        if not sizes:
            raise ValueError("hidden_layer_sizes must name at least one hidden layer")
        last_act = _resolve(self.activation, self.ell)
        early_act = _resolve(self.early_activation, self.ell)
        arch = []
        prev = in_dim
        for i, width in enumerate(sizes):
            is_last_hidden = i == len(sizes) - 1
            arch.append(
                nn.LayerSpec(
                    prev,
                    width,
                    last_act if is_last_hidden else early_act,
                    self.dropout if is_last_hidden else 0.0,
                )
            )
            prev = width
        arch.append(nn.LayerSpec(prev, out_dim, IdentityActivation(), 0.0))
        return arch

    def _train(self, X, targets, out_dim, loss):
        arch = self._architecture(X.shape[1], out_dim)
        net = nn.init_network(arch, seed=self.seed)
        cfg = nn.TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            lr_decay_epochs=tuple(self.lr_decay_epochs),
            lr_decay_factor=self.lr_decay_factor,
            seed=self.seed,
            loss=loss,
        )
        self.network_, self.loss_trace_ = nn.train(net, (X, targets), cfg)
        return self

    def mc_outputs(self, X, n_samples: int = 100, seed: int = 0, retain_samples: bool = True):
        """Raw MC-dropout outputs as an `nn.McPredictive` (mean/std/samples)."""
        check_is_fitted(self, "network_")
        X = check_array(X)
        return nn.mc_predict(self.network_, X, n_samples, seed, retain_samples)


class MLPClassifier(_MLPBase, ClassifierMixin):
    """Softmax classifier trained with Adam on cross-entropy."""

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_, y_idx = np.unique(y, return_inverse=True)
        if self.classes_.size < 2:
            raise ValueError("need at least two classes")
        return self._train(X, y_idx, self.classes_.size, nn.SOFTMAX_CROSS_ENTROPY)

    def decision_function(self, X):
        check_is_fitted(self, "network_")
        return nn.forward(self.network_, check_array(X), nn.Eval())

    def predict_proba(self, X):
        return nn.softmax(self.decision_function(X))

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    def mc_predict_proba(self, X, n_samples: int = 100, seed: int = 0,
                         reduction: str = nn.MEAN_OF_SOFTMAX):
        """Class probabilities from MC-dropout samples (per-row)."""
        mc = self.mc_outputs(X, n_samples, seed, retain_samples=True)
        return nn.softmax_probs(mc, reduction)


class MLPRegressor(_MLPBase, RegressorMixin):
    """Least-squares regressor trained with Adam."""

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        y = np.asarray(y, dtype=float)
        return self._train(X, y[:, None], 1, nn.SQUARED_ERROR)

    def predict(self, X):
        check_is_fitted(self, "network_")
        return nn.forward(self.network_, check_array(X), nn.Eval())[:, 0]

    def mc_predict(self, X, n_samples: int = 100, seed: int = 0):
        """(mean, std) of MC-dropout predictions, one value per row."""
        mc = self.mc_outputs(X, n_samples, seed, retain_samples=False)
        return mc.mean[:, 0], mc.std[:, 0]
