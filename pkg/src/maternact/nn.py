"""Dense feedforward networks with hand-written reverse-mode gradients.

Supports the activation objects from `activations`, inverted dropout in
training and MC-sampling modes, Adam with a step-decay learning-rate
schedule, softmax cross-entropy and squared-error losses, MC-dropout
prediction, and an exact-round-trip JSON checkpoint format.

Randomness is consumed through named PCG64 streams derived from integer
seed tuples, so identical (architecture, data, config, seed) reproduce
bit-identical parameters and predictions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import activations as act_mod

__all__ = [
    "LayerSpec",
    "Network",
    "TrainConfig",
    "McPredictive",
    "Eval",
    "Train",
    "McSample",
    "TrainingDivergedError",
    "init_network",
    "forward",
    "backward",
    "loss_and_grad",
    "train",
    "mc_predict",
    "softmax",
    "softmax_probs",
    "save_network",
    "load_network",
]

SOFTMAX_CROSS_ENTROPY = "softmax_cross_entropy"
SQUARED_ERROR = "squared_error"
_LOSSES = (SOFTMAX_CROSS_ENTROPY, SQUARED_ERROR)

MEAN_OF_SOFTMAX = "mean-of-softmax"
SOFTMAX_OF_MEAN = "softmax-of-mean"

# stream tags keeping the per-purpose RNGs disjoint under one master seed
_STREAM_SHUFFLE = 101
_STREAM_DROPOUT = 102


def _seed_tuple(seed) -> tuple:
    return tuple(seed) if isinstance(seed, (tuple, list)) else (seed,)


class TrainingDivergedError(RuntimeError):
    """Raised when the training loss becomes non-finite (reports the epoch)."""

    def __init__(self, epoch: int, message: str):
        super().__init__(message)
        self.epoch = epoch


@dataclass(frozen=True)
class LayerSpec:
    in_dim: int
    out_dim: int
    activation: object = act_mod.IdentityActivation()
    dropout_rate: float = 0.0

    def __post_init__(self):
        if self.in_dim < 1 or self.out_dim < 1:
            raise ValueError(f"layer dims must be >= 1, got {self.in_dim}x{self.out_dim}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout_rate must be in [0, 1), got {self.dropout_rate!r}")


@dataclass
class Network:
    layers: list[LayerSpec]
    weights: list[np.ndarray]  # (in_dim, out_dim) per layer
    biases: list[np.ndarray]  # (out_dim,) per layer

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim

    def parameters(self):
        for w, b in zip(self.weights, self.biases):
            yield w
            yield b


@dataclass(frozen=True)
class Eval:
    """Deterministic forward pass: no dropout, no rescaling."""


@dataclass(frozen=True)
class Train:
    """Training pass: per-element inverted-dropout masks drawn from
    (seed, step, layer) streams."""

    seed: object  # int or tuple of ints
    step: int = 0


@dataclass(frozen=True)
class McSample:
    """One MC-dropout network realization: per-unit masks shared across the
    batch, drawn from (seed, layer) streams."""

    seed: object  # int or tuple of ints


@dataclass(frozen=True)
class McPredictive:
    """Per-output predictive mean and population std across MC samples."""

    mean: np.ndarray
    std: np.ndarray
    samples: np.ndarray | None = None


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    batch_size: int
    learning_rate: float
    lr_decay_epochs: tuple[int, ...] = ()
    lr_decay_factor: float = 0.1
    seed: int = 0
    loss: str = SOFTMAX_CROSS_ENTROPY

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be positive")
        if self.learning_rate < 0.0:
            raise ValueError("learning_rate must be non-negative")
        if self.lr_decay_factor <= 0.0:
            raise ValueError("lr_decay_factor must be positive")
        decays = tuple(self.lr_decay_epochs)
        if any(e2 <= e1 for e1, e2 in zip(decays, decays[1:])) or any(
            e < 1 or e > self.epochs for e in decays
        ):
            raise ValueError("lr_decay_epochs must be strictly increasing and <= epochs")
        object.__setattr__(self, "lr_decay_epochs", decays)
        if self.loss not in _LOSSES:
            raise ValueError(f"loss must be one of {_LOSSES}, got {self.loss!r}")


def init_network(arch: list[LayerSpec], seed: int = 0) -> Network:
    """Glorot-variance normal init N(0, 2/(in+out)) for weights, zero biases."""
    if not arch:
        raise ValueError("architecture must contain at least one layer")
    for prev, nxt in zip(arch, arch[1:]):
        if prev.out_dim != nxt.in_dim:
            raise ValueError(
                f"layer dims do not chain: {prev.out_dim} -> {nxt.in_dim}"
            )
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for spec in arch:
        std = math.sqrt(2.0 / (spec.in_dim + spec.out_dim))
        weights.append(rng.normal(0.0, std, size=(spec.in_dim, spec.out_dim)))
        biases.append(np.zeros(spec.out_dim))
    return Network(list(arch), weights, biases)


def _dropout_mask(mode, layer_idx: int, rate: float, batch: int, units: int):
    """Inverted-dropout multiplier (kept units scaled by 1/(1-rate)), or None."""
    if rate == 0.0 or isinstance(mode, Eval):
        return None
    if isinstance(mode, Train):
        rng = np.random.default_rng((*_seed_tuple(mode.seed), mode.step, layer_idx))
        keep = rng.random((batch, units)) >= rate
    elif isinstance(mode, McSample):
        rng = np.random.default_rng((*_seed_tuple(mode.seed), layer_idx))
        keep = rng.random(units) >= rate
    else:
        raise TypeError(f"unsupported forward mode {mode!r}")
    return keep.astype(float) / (1.0 - rate)


def _forward_cached(net: Network, X: np.ndarray, mode):
    """Forward pass keeping pre-activations, outputs, and masks for backprop."""
    pre, post, masks = [], [], []
    a = X
    for idx, (spec, w, b) in enumerate(zip(net.layers, net.weights, net.biases)):
        z = a @ w + b
        a = spec.activation(z)
        mask = _dropout_mask(mode, idx, spec.dropout_rate, X.shape[0], spec.out_dim)
        if mask is not None:
            a = a * mask
        pre.append(z)
        post.append(a)
        masks.append(mask)
    return pre, post, masks


def _as_batch(net: Network, x) -> tuple[np.ndarray, bool]:
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != net.in_dim:
        raise ValueError(f"input dimension {X.shape[1]} != network input {net.in_dim}")
    return X, single


def forward(net: Network, x, mode=Eval()) -> np.ndarray:
    """Network output for a vector or batch of inputs under the given mode."""
    X, single = _as_batch(net, x)
    _, post, _ = _forward_cached(net, X, mode)
    out = post[-1]
    return out[0] if single else out


def softmax(logits: np.ndarray) -> np.ndarray:
    z = np.asarray(logits, dtype=float)
    z = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=-1, keepdims=True)


def _row_losses_and_grad(loss: str, out: np.ndarray, target: np.ndarray):
    """Per-sample losses (rounded row-locally, so values do not depend on
    how samples are batched) and the gradient of their batch mean."""
    n = out.shape[0]
    if loss == SQUARED_ERROR:
        t = target.reshape(out.shape)
        diff = out - t
        return 0.5 * np.sum(diff * diff, axis=1), diff / n
    if loss == SOFTMAX_CROSS_ENTROPY:
        labels = np.asarray(target)
        if labels.ndim == 2:  # one-hot rows
            labels = np.argmax(labels, axis=1)
        labels = labels.astype(int)
        probs = softmax(out)
        picked = np.clip(probs[np.arange(n), labels], 1e-300, None)
        grad = probs
        grad[np.arange(n), labels] -= 1.0
        return -np.log(picked), grad / n
    raise ValueError(f"loss must be one of {_LOSSES}, got {loss!r}")


def loss_and_grad(loss: str, out: np.ndarray, target: np.ndarray):
    """Batch-mean loss value and its gradient w.r.t. the network output."""
    rows, grad = _row_losses_and_grad(loss, out, target)
    return float(np.mean(rows)), grad


def backward(net: Network, x, target, loss: str = SOFTMAX_CROSS_ENTROPY, mode=Eval()):
    """Exact gradients of the batch-mean loss for every weight and bias.

    The forward pass is recomputed under `mode`, so Train modes see the same
    dropout masks in both directions. Returns (loss, weight grads, bias grads).
    """
    X, _ = _as_batch(net, x)
    return _backward_rows(net, X, target, loss, mode, [])


def _backward_rows(net, X, target, loss, mode, row_sink):
    """Backprop core; per-sample losses are appended to row_sink so the
    caller can accumulate an order-independent (fsum) epoch loss."""
    pre, post, masks = _forward_cached(net, X, mode)
    rows, delta = _row_losses_and_grad(loss, post[-1], np.asarray(target))
    row_sink.extend(rows.tolist())
    value = float(np.mean(rows))
    grad_w = [None] * len(net.layers)
    grad_b = [None] * len(net.layers)
    for idx in range(len(net.layers) - 1, -1, -1):
        if masks[idx] is not None:
            delta = delta * masks[idx]
        delta = delta * net.layers[idx].activation.grad(pre[idx])
        a_prev = X if idx == 0 else post[idx - 1]
        grad_w[idx] = a_prev.T @ delta
        grad_b[idx] = delta.sum(axis=0)
        if idx:
            delta = delta @ net.weights[idx].T
    return value, grad_w, grad_b


def train(net: Network, data, cfg: TrainConfig):
    """Adam (beta1 0.9, beta2 0.999, eps 1e-8) with step-decay schedule.

    Mutates `net` in place; returns (net, per-epoch mean loss trace).
    Shuffling and dropout masks are deterministic per cfg.seed. Raises
    TrainingDivergedError the first time a batch loss is non-finite.
    """
    X = np.atleast_2d(np.asarray(data[0], dtype=float))
    Y = np.asarray(data[1])
    if X.shape[0] == 0 or X.shape[0] != Y.shape[0]:
        raise ValueError("training data must be nonempty with matching lengths")
    n = X.shape[0]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    m_w = [np.zeros_like(w) for w in net.weights]
    v_w = [np.zeros_like(w) for w in net.weights]
    m_b = [np.zeros_like(b) for b in net.biases]
    v_b = [np.zeros_like(b) for b in net.biases]
    shuffle_rng = np.random.default_rng((*_seed_tuple(cfg.seed), _STREAM_SHUFFLE))
    lr = cfg.learning_rate
    trace = []
    step = 0
    adam_t = 0
    for epoch in range(1, cfg.epochs + 1):
        if epoch in cfg.lr_decay_epochs:
            lr *= cfg.lr_decay_factor
        order = shuffle_rng.permutation(n)
        epoch_rows = []
        for start in range(0, n, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            mode = Train(seed=(*_seed_tuple(cfg.seed), _STREAM_DROPOUT), step=step)
            value, grad_w, grad_b = _backward_rows(
                net, X[batch], Y[batch], cfg.loss, mode, epoch_rows
            )
            if not math.isfinite(value):
                raise TrainingDivergedError(
                    epoch, f"non-finite loss {value!r} at epoch {epoch}"
                )
            step += 1
            if lr == 0.0:
                continue
            adam_t += 1
            corr1 = 1.0 - beta1**adam_t
            corr2 = 1.0 - beta2**adam_t
            for i in range(len(net.layers)):
                for theta, g, m, v in (
                    (net.weights[i], grad_w[i], m_w[i], v_w[i]),
                    (net.biases[i], grad_b[i], m_b[i], v_b[i]),
                ):
                    m *= beta1
                    m += (1.0 - beta1) * g
                    v *= beta2
                    v += (1.0 - beta2) * g * g
                    theta -= lr * (m / corr1) / (np.sqrt(v / corr2) + eps)
        # fsum is exactly rounded, so the epoch trace does not depend on
        # the shuffle order (a zero-learning-rate run has a constant trace)
        trace.append(math.fsum(epoch_rows) / n)
    return net, trace


def mc_predict(net: Network, x, n_samples: int, seed: int = 0, retain_samples: bool = True) -> McPredictive:
    """Mean and population std of `n_samples` MC-dropout forward passes.

    Per-sample seeds are split as (seed, s), so growing n_samples with the
    same master seed keeps the earlier samples identical.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples!r}")
    X, single = _as_batch(net, x)
    samples = np.empty((n_samples, X.shape[0], net.out_dim))
    for s in range(n_samples):
        samples[s] = forward(net, X, McSample(seed=(*_seed_tuple(seed), s)))
    mean = samples.mean(axis=0)
    std = samples.std(axis=0)
    # identical samples (no dropout anywhere) must give exactly zero spread,
    # not the rounding residue of the two-pass formula
    std[np.all(samples == samples[0], axis=0)] = 0.0
    if single:
        mean, std, samples = mean[0], std[0], samples[:, 0, :]
    return McPredictive(mean, std, samples if retain_samples else None)


def softmax_probs(mc: McPredictive, reduction: str = MEAN_OF_SOFTMAX) -> np.ndarray:
    """Class probabilities from retained MC samples, by either reduction
    order: average the per-sample softmaxes, or softmax the averaged logits."""
    if mc.samples is None:
        raise ValueError("softmax_probs needs retained samples (retain_samples=True)")
    if reduction == MEAN_OF_SOFTMAX:
        return softmax(mc.samples).mean(axis=0)
    if reduction == SOFTMAX_OF_MEAN:
        return softmax(mc.samples.mean(axis=0))
    raise ValueError(
        f"reduction must be {MEAN_OF_SOFTMAX!r} or {SOFTMAX_OF_MEAN!r}, got {reduction!r}"
    )


_ACTIVATION_TAGS = {
    act_mod.MaternActivation: "matern",
    act_mod.RBFActivation: "rbf",
    act_mod.ReLUActivation: "relu",
    act_mod.StepActivation: "step",
    act_mod.ErfActivation: "erf",
    act_mod.IdentityActivation: "identity",
}


def _activation_to_dict(a) -> dict:
    tag = _ACTIVATION_TAGS.get(type(a))
    if tag is None:
        raise TypeError(f"cannot serialize activation {a!r}")
    out = {"kind": tag}
    if tag == "matern":
        out.update(nu=a.nu, ell=a.ell)
    elif tag == "rbf":
        out.update(center=a.center, width=a.width)
    return out


def _activation_from_dict(d: dict):
    kind = d["kind"]
    if kind == "matern":
        return act_mod.MaternActivation(d["nu"], d["ell"])
    if kind == "rbf":
        return act_mod.RBFActivation(d["center"], d["width"])
    cls = {v: k for k, v in _ACTIVATION_TAGS.items()}[kind]
    return cls()


CHECKPOINT_VERSION = 1


def save_network(net: Network, path) -> None:
    """Versioned JSON checkpoint; floats round-trip exactly (repr encoding)."""
    payload = {
        "format_version": CHECKPOINT_VERSION,
        "layers": [
            {
                "in_dim": s.in_dim,
                "out_dim": s.out_dim,
                "activation": _activation_to_dict(s.activation),
                "dropout_rate": s.dropout_rate,
            }
            for s in net.layers
        ],
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def load_network(path) -> Network:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    version = payload.get("format_version")
    if version != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {version!r}")
    layers = [
        LayerSpec(
            d["in_dim"], d["out_dim"], _activation_from_dict(d["activation"]), d["dropout_rate"]
        )
        for d in payload["layers"]
    ]
    weights = [np.asarray(w, dtype=float) for w in payload["weights"]]
    biases = [np.asarray(b, dtype=float) for b in payload["biases"]]
    net = Network(layers, weights, biases)
    for spec, w, b in zip(layers, weights, biases):
        if w.shape != (spec.in_dim, spec.out_dim) or b.shape != (spec.out_dim,):
            raise ValueError("checkpoint parameter shapes do not match the layer specs")
    return net
