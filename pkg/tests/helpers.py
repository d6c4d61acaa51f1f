"""Shared builders for the test-suite."""
import numpy as np

from evoqas.architecture import (ENT_CHOICES, H_CHOICES, ROT_CHOICES, ArchitectureSpec, decode)
from evoqas.simulator import CircuitSpec, GateKind, GateOp, InputSlot, ParamSlot


def random_arch(rng, num_layers=2):
    pick = lambda seq: seq[int(rng.integers(len(seq)))]
    layers = tuple((pick(ENT_CHOICES), pick(ROT_CHOICES)) for _ in range(num_layers))
    return ArchitectureSpec(pick(H_CHOICES), pick(ROT_CHOICES), layers)


def random_decoded(rng, n_qubits=4, num_layers=2):
    return decode(random_arch(rng, num_layers), n_qubits)


def random_gate_soup(rng, n_qubits, num_gates, num_inputs=0):
    """Arbitrary gate sequence; every rotation gets its own parameter unless it reads an input."""
    gates, d = [], 0
    for _ in range(num_gates):
        kind = GateKind(["H", "RX", "RY", "RZ", "CNOT"][int(rng.integers(5))])
        q = int(rng.integers(n_qubits))
        if kind is GateKind.CNOT:
            if n_qubits < 2:
                continue
            c = int((q + 1 + rng.integers(n_qubits - 1)) % n_qubits)
            gates.append(GateOp(kind, q, control=c))
        elif kind is GateKind.H:
            gates.append(GateOp(kind, q))
        elif num_inputs and rng.random() < 0.3:
            gates.append(GateOp(kind, q, angle_source=InputSlot(int(rng.integers(num_inputs)))))
        else:
            gates.append(GateOp(kind, q, angle_source=ParamSlot(d)))
            d += 1
    return CircuitSpec(n_qubits, tuple(gates), num_inputs=num_inputs, num_params=d)


def random_state(rng, n):
    v = rng.standard_normal(2 ** n) + 1j * rng.standard_normal(2 ** n)
    return v / np.linalg.norm(v)
