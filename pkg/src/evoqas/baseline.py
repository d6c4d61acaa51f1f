"""Classical feed-forward baselines with a two-way softmax output.

Parameters are flattened layer by layer; for each layer the weight matrix
(``out x in``, row-major) comes first, then the bias vector. The ReLU
subgradient at 0 is taken to be 0.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np


class Activation(str, enum.Enum):
    RELU = "ReLU"
    IDENTITY = "Identity"


def param_count(layer_sizes: Sequence[int]) -> int:
    return sum(a * b + b for a, b in zip(layer_sizes[:-1], layer_sizes[1:]))


def _check_sizes(layer_sizes):
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 2 or sizes[-1] != 2 or min(sizes) < 1:
        raise ValueError(f"layer sizes must run input -> ... -> 2, got {sizes}")
    return sizes


@dataclass(frozen=True, eq=False)
class MlpSpec:
    layer_sizes: Tuple[int, ...]
    activation: Activation
    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]

    def __post_init__(self):
        sizes = _check_sizes(self.layer_sizes)
        object.__setattr__(self, "layer_sizes", sizes)
        object.__setattr__(self, "activation", Activation(self.activation))
        for (a, b), W, bias in zip(zip(sizes[:-1], sizes[1:]), self.weights, self.biases):
            if np.shape(W) != (b, a) or np.shape(bias) != (b,):
                raise ValueError(f"layer {a}->{b} has weight {np.shape(W)} and bias {np.shape(bias)}")
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise ValueError("one weight matrix and bias per layer")

    @property
    def num_params(self) -> int:
        return param_count(self.layer_sizes)

    @classmethod
    def from_flat(cls, layer_sizes, activation, theta) -> "MlpSpec":
        sizes = _check_sizes(layer_sizes)
        theta = np.asarray(theta, dtype=np.float64).reshape(-1)
        if theta.size != param_count(sizes):
            raise ValueError(f"expected {param_count(sizes)} parameters, got {theta.size}")
        weights, biases, pos = [], [], 0
        for a, b in zip(sizes[:-1], sizes[1:]):
            weights.append(theta[pos:pos + a * b].reshape(b, a))
            pos += a * b
            biases.append(theta[pos:pos + b])
            pos += b
        return cls(sizes, activation, tuple(weights), tuple(biases))

    @classmethod
    def zeros(cls, layer_sizes, activation) -> "MlpSpec":
        return cls.from_flat(layer_sizes, activation, np.zeros(param_count(_check_sizes(layer_sizes))))

    def flat(self) -> np.ndarray:
        return np.concatenate([np.concatenate([W.ravel(), b]) for W, b in zip(self.weights, self.biases)])


def _act(z, activation):
    return np.maximum(z, 0.0) if activation is Activation.RELU else z


def _act_grad(z, activation):
    return (z > 0.0).astype(np.float64) if activation is Activation.RELU else np.ones_like(z)


def _softmax_rows(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _forward(m: MlpSpec, X):
    """Pre-activations and activations per layer for a batch ``X`` (rows)."""
    acts, pres = [X], []
    h = X
    last = len(m.weights) - 1
    for i, (W, b) in enumerate(zip(m.weights, m.biases)):
        z = h @ W.T + b
        pres.append(z)
        h = z if i == last else _act(z, m.activation)
        acts.append(h)
    return pres, acts


def mlp_probabilities(m: MlpSpec, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != m.layer_sizes[0]:
        raise ValueError(f"expected {m.layer_sizes[0]} inputs, got {X.shape[1]}")
    _, acts = _forward(m, X)
    return _softmax_rows(acts[-1])


def mlp_forward(m: MlpSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    return mlp_probabilities(m, x[None, :])[0]


def mlp_scores(m: MlpSpec, X, y) -> np.ndarray:
    """Backpropagated ``d log p(y|x) / d params`` for each row, flattened."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.intp).reshape(-1)
    if X.shape[1] != m.layer_sizes[0]:
        raise ValueError(f"expected {m.layer_sizes[0]} inputs, got {X.shape[1]}")
    pres, acts = _forward(m, X)
    probs = _softmax_rows(acts[-1])
    delta = -probs
    delta[np.arange(len(y)), y] += 1.0

    grads: List[np.ndarray] = []
    for i in range(len(m.weights) - 1, -1, -1):
        gW = delta[:, :, None] * acts[i][:, None, :]
        grads.append(np.concatenate([gW.reshape(len(y), -1), delta], axis=1))
        if i:
            delta = (delta @ m.weights[i]) * _act_grad(pres[i - 1], m.activation)
    return np.concatenate(grads[::-1], axis=1)


def mlp_log_prob_gradient(m: MlpSpec, x, y: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    return mlp_scores(m, x[None, :], [y])[0]


def mlp_match_param_count(target_d: int, n_inputs: int) -> Tuple[Tuple[int, int, int], int]:
    """Single-hidden-layer sizes whose parameter count is closest to ``target_d``.

    Returns ``((n_inputs, h, 2), achieved_count)``; ties go to the smaller width.
    """
    if n_inputs < 1:
        raise ValueError("n_inputs must be positive")
    if target_d < n_inputs + 2:
        raise ValueError(f"target_d={target_d} is too small for {n_inputs} inputs")
    per_unit = n_inputs + 1 + 2
    best_h = max(1, round((target_d - 2) / per_unit))
    candidates = [h for h in (best_h - 1, best_h, best_h + 1) if h >= 1]
    h = min(candidates, key=lambda w: (abs(per_unit * w + 2 - target_d), w))
    return (n_inputs, h, 2), per_unit * h + 2


@dataclass(frozen=True)
class MlpModel:
    """Architecture-only wrapper that plugs into the Fisher / ED estimators."""

    layer_sizes: Tuple[int, ...]
    activation: Activation = Activation.RELU
    bound: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "layer_sizes", _check_sizes(self.layer_sizes))
        object.__setattr__(self, "activation", Activation(self.activation))

    @property
    def num_params(self) -> int:
        return param_count(self.layer_sizes)

    @property
    def num_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def param_bounds(self):
        return -self.bound, self.bound

    def spec(self, theta) -> MlpSpec:
        return MlpSpec.from_flat(self.layer_sizes, self.activation, theta)

    def probabilities(self, X, theta) -> np.ndarray:
        return mlp_probabilities(self.spec(theta), X)

    def scores(self, X, y, theta) -> np.ndarray:
        return mlp_scores(self.spec(theta), X, y)
