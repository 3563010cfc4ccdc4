import numpy as np
import pytest
from sklearn.base import clone

from maternact import nn
from maternact.activations import MaternActivation, ReLUActivation
from maternact.estimators import MLPClassifier, MLPRegressor


def blobs(seed=0, n=60):
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, size=n)
    X = rng.normal(size=(n, 2)) + 2.0 * y[:, None]
    return X, y


FAST = dict(epochs=60, batch_size=30, learning_rate=0.02, lr_decay_epochs=(), seed=0)


class TestArchitecture:
    def test_last_hidden_gets_activation_and_dropout(self):
        clf = MLPClassifier(hidden_layer_sizes=(16, 8), activation="matern32",
                            early_activation="relu", ell=0.5, dropout=0.3, **FAST)
        arch = clf._architecture(4, 3)
        assert [spec.out_dim for spec in arch] == [16, 8, 3]
        assert isinstance(arch[0].activation, ReLUActivation)
        assert arch[0].dropout_rate == 0.0
        assert isinstance(arch[1].activation, MaternActivation)
        assert arch[1].activation.ell == 0.5
        assert arch[1].dropout_rate == 0.3
        assert arch[2].dropout_rate == 0.0

    def test_activation_objects_accepted(self):
        clf = MLPClassifier(hidden_layer_sizes=(8,), activation=MaternActivation(2.5, 2.0),
                            **FAST)
        arch = clf._architecture(2, 2)
        assert arch[0].activation.ell == 2.0


class TestClassifier:
    def test_learns_blobs(self):
        X, y = blobs()
        clf = MLPClassifier(hidden_layer_sizes=(16,), activation="matern52", dropout=0.1,
                            **FAST).fit(X, y)
        assert (clf.predict(X) == y).mean() >= 0.9

    def test_predict_proba_normalized(self):
        X, y = blobs()
        clf = MLPClassifier(hidden_layer_sizes=(8,), dropout=0.0, **FAST).fit(X, y)
        probs = clf.predict_proba(X)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-12)

    def test_label_mapping(self):
        X, y01 = blobs()
        labels = np.array(["cat", "dog"])[y01]
        clf = MLPClassifier(hidden_layer_sizes=(8,), dropout=0.0, **FAST).fit(X, labels)
        assert set(clf.predict(X)) <= {"cat", "dog"}
        assert list(clf.classes_) == ["cat", "dog"]

    def test_mc_predict_proba(self):
        X, y = blobs()
        clf = MLPClassifier(hidden_layer_sizes=(8,), dropout=0.2, **FAST).fit(X, y)
        probs = clf.mc_predict_proba(X[:5], n_samples=20, seed=1)
        assert probs.shape == (5, 2)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-12)
        again = clf.mc_predict_proba(X[:5], n_samples=20, seed=1)
        assert np.array_equal(probs, again)

    def test_single_class_rejected(self):
        X, _ = blobs()
        with pytest.raises(ValueError):
            MLPClassifier(**FAST).fit(X, np.zeros(len(X)))

    def test_deterministic_refit(self):
        X, y = blobs()
        a = MLPClassifier(hidden_layer_sizes=(8,), dropout=0.2, **FAST).fit(X, y)
        b = MLPClassifier(hidden_layer_sizes=(8,), dropout=0.2, **FAST).fit(X, y)
        for wa, wb in zip(a.network_.weights, b.network_.weights):
            assert np.array_equal(wa, wb)


class TestRegressor:
    def test_fits_line(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(-1, 1, size=(80, 1))
        y = 0.7 * X[:, 0] - 0.2
        reg = MLPRegressor(hidden_layer_sizes=(16,), activation="matern52", dropout=0.0,
                           epochs=200, batch_size=40, learning_rate=0.02,
                           lr_decay_epochs=(), seed=0).fit(X, y)
        pred = reg.predict(X)
        assert np.mean((pred - y) ** 2) < 0.01

    def test_mc_predict_shapes(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(-1, 1, size=(30, 1))
        y = X[:, 0]
        reg = MLPRegressor(hidden_layer_sizes=(8,), dropout=0.3, epochs=30, batch_size=30,
                           learning_rate=0.02, lr_decay_epochs=(), seed=0).fit(X, y)
        mean, std = reg.mc_predict(X[:7], n_samples=25, seed=2)
        assert mean.shape == (7,) and std.shape == (7,)
        assert np.all(std >= 0.0)

    def test_zero_dropout_zero_std(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(-1, 1, size=(20, 1))
        reg = MLPRegressor(hidden_layer_sizes=(8,), dropout=0.0, epochs=10, batch_size=20,
                           learning_rate=0.01, lr_decay_epochs=(), seed=0).fit(X, X[:, 0])
        _, std = reg.mc_predict(X, n_samples=10, seed=0)
        assert np.all(std == 0.0)


class TestSklearnInterop:
    def test_get_params_and_clone(self):
        clf = MLPClassifier(hidden_layer_sizes=(32,), activation="matern32", ell=0.7,
                            dropout=0.15, epochs=12, batch_size=8, learning_rate=0.01,
                            lr_decay_epochs=(4, 8), seed=3)
        params = clf.get_params()
        assert params["ell"] == 0.7 and params["lr_decay_epochs"] == (4, 8)
        cloned = clone(clf)
        assert cloned.get_params() == params

    def test_loss_trace_recorded(self):
        X, y = blobs()
        clf = MLPClassifier(hidden_layer_sizes=(8,), dropout=0.0, **FAST).fit(X, y)
        assert len(clf.loss_trace_) == FAST["epochs"]
        assert clf.loss_trace_[-1] < clf.loss_trace_[0]

    def test_mc_outputs_mode(self):
        X, y = blobs()
        clf = MLPClassifier(hidden_layer_sizes=(8,), dropout=0.2, **FAST).fit(X, y)
        mc = clf.mc_outputs(X[:4], n_samples=6, seed=0)
        assert isinstance(mc, nn.McPredictive)
        assert mc.samples.shape == (6, 4, 2)
