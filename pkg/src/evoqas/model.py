"""Two-class quantum classifier built from a decoded circuit.

Two read-outs of the final state are available:

* ``"parity"`` (default): ``p(y)`` is the probability that the measured
  bitstring has parity ``y`` (the eigenprojectors of ``Z x Z x ... x Z``);
* ``"qubit0_marginal"``: ``p(y)`` is the probability of reading ``y`` on
  qubit 0 alone.

With the qubit-0 read-out, trainable rotations of the last layer on qubits
other than 0 never influence the output, so their Fisher rows vanish.

Score vectors ``d/dtheta log p(y | x; theta)`` come from the parameter-shift
rule, which is exact here because every trainable angle feeds exactly one
half-angle Pauli rotation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simulator import (CircuitSpec, parity_marginal, qubit0_marginal, run_circuit_batch,
                        run_circuit_shifted)

PROB_FLOOR = 1e-12
SHIFT = np.pi / 2

OUTPUT_MAPS = {
    "parity": parity_marginal,
    "qubit0_marginal": qubit0_marginal,
}


class VanishingProbabilityError(ValueError):
    """p(y | x; theta) is too small for a usable score vector."""


@dataclass(frozen=True)
class QuantumModel:
    circuit: CircuitSpec
    output_map: str = "parity"

    num_classes = 2

    def __post_init__(self):
        if self.output_map not in OUTPUT_MAPS:
            raise ValueError(f"unsupported output map {self.output_map!r}")

    def _readout(self, amps: np.ndarray) -> np.ndarray:
        return OUTPUT_MAPS[self.output_map](amps)

    @property
    def num_params(self) -> int:
        return self.circuit.num_params

    @property
    def num_inputs(self) -> int:
        return self.circuit.num_inputs

    @property
    def param_bounds(self):
        """Parameter domain used for Monte Carlo integration over theta."""
        return 0.0, 2 * np.pi

    def probabilities(self, X, theta) -> np.ndarray:
        """Class probabilities for each row of ``X``; shape ``(len(X), 2)``."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        theta = np.asarray(theta, dtype=np.float64)
        if theta.ndim == 1:
            theta = theta[None, :]
        return self._readout(run_circuit_batch(self.circuit, X, theta))

    def scores(self, X, y, theta) -> np.ndarray:
        """Parameter-shift score vectors, one row per ``(X[i], y[i])``."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        y = np.asarray(y, dtype=np.intp).reshape(-1)
        theta = np.asarray(theta, dtype=np.float64).reshape(-1)
        d, k = self.num_params, X.shape[0]
        if theta.size != d:
            raise ValueError(f"expected {d} parameters, got {theta.size}")
        if y.size != k:
            raise ValueError("one label per input row is required")
        if np.any((y < 0) | (y > 1)):
            raise ValueError("labels must be 0 or 1")

        amps = run_circuit_shifted(self.circuit, X, theta, SHIFT)
        probs = self._readout(amps.reshape(-1, amps.shape[-1])).reshape(2 * d + 1, k, 2)
        p_y = probs[:, np.arange(k), y].T

        base = p_y[:, 0]
        if np.any(base <= PROB_FLOOR):
            raise VanishingProbabilityError(
                f"p(y|x;theta) = {base.min():.3e} is below {PROB_FLOOR:g}"
            )
        grad = 0.5 * (p_y[:, 1:d + 1] - p_y[:, d + 1:])
        return grad / base[:, None]


def forward(m: QuantumModel, x, theta) -> np.ndarray:
    """``(p(y=0|x;theta), p(y=1|x;theta))`` for a single input vector."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    if x.size != m.num_inputs:
        raise ValueError(f"expected {m.num_inputs} inputs, got {x.size}")
    if theta.size != m.num_params:
        raise ValueError(f"expected {m.num_params} parameters, got {theta.size}")
    return m.probabilities(x[None, :], theta)[0]


def log_prob_gradient(m: QuantumModel, x, y: int, theta) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != m.num_inputs:
        raise ValueError(f"expected {m.num_inputs} inputs, got {x.size}")
    return m.scores(x[None, :], [y], theta)[0]
