"""Dense statevector simulation for the gate alphabet {H, RX, RY, RZ, CNOT}.

Conventions:

* qubit 0 is the most significant bit of the basis-state index, so for two
  qubits the amplitude order is |00>, |01>, |10>, |11> with the left bit
  belonging to qubit 0;
* rotations use the half-angle form ``R_P(phi) = exp(-i phi P / 2)``.

All kernels work on a batch of states stored as a ``(batch, 2**n)`` complex
array. The single-state API (:func:`apply_gate`, :func:`run_circuit`) goes
through the same kernels with a batch of one.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

MAX_QUBITS = 12


class GateKind(str, enum.Enum):
    H = "H"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    CNOT = "CNOT"

    @property
    def is_rotation(self) -> bool:
        return self in (GateKind.RX, GateKind.RY, GateKind.RZ)


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class InputSlot:
    index: int


@dataclass(frozen=True)
class ParamSlot:
    index: int


AngleSource = Union[Constant, InputSlot, ParamSlot]


@dataclass(frozen=True)
class GateOp:
    """One gate of a circuit.

    ``angle_source`` is required for rotations and forbidden otherwise;
    ``control`` is required for CNOT and forbidden otherwise.
    """

    kind: GateKind
    target: int
    control: Optional[int] = None
    angle_source: Optional[AngleSource] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        if self.target < 0:
            raise ValueError(f"negative target qubit {self.target}")
        if self.kind is GateKind.CNOT:
            if self.control is None:
                raise ValueError("CNOT requires a control qubit")
            if self.control < 0 or self.control == self.target:
                raise ValueError(f"invalid CNOT control {self.control} for target {self.target}")
        elif self.control is not None:
            raise ValueError(f"{self.kind.value} takes no control qubit")
        if self.kind.is_rotation:
            if self.angle_source is None:
                raise ValueError(f"{self.kind.value} requires an angle source")
        elif self.angle_source is not None:
            raise ValueError(f"{self.kind.value} takes no angle source")

    def max_qubit(self) -> int:
        return max(self.target, -1 if self.control is None else self.control)

    def to_text(self) -> str:
        parts = [self.kind.value, str(self.target)]
        if self.control is not None:
            parts.append(str(self.control))
        src = self.angle_source
        if isinstance(src, InputSlot):
            parts.append(f"input:{src.index}")
        elif isinstance(src, ParamSlot):
            parts.append(f"param:{src.index}")
        elif isinstance(src, Constant):
            parts.append(f"const:{src.value!r}")
        return " ".join(parts)

    @classmethod
    def from_text(cls, line: str) -> "GateOp":
        tokens = line.split()
        kind = GateKind(tokens[0])
        target = int(tokens[1])
        if kind is GateKind.CNOT:
            return cls(kind, target, control=int(tokens[2]))
        if kind is GateKind.H:
            return cls(kind, target)
        tag, value = tokens[2].split(":", 1)
        source = {"input": lambda v: InputSlot(int(v)),
                  "param": lambda v: ParamSlot(int(v)),
                  "const": lambda v: Constant(float(v))}[tag](value)
        return cls(kind, target, angle_source=source)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state of ``n_qubits`` qubits. The amplitude array is read-only."""

    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2 ** self.n_qubits,):
            raise ValueError(
                f"expected {2 ** self.n_qubits} amplitudes for {self.n_qubits} qubits, got {amps.shape}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        _check_qubit_count(n_qubits)
        amps = np.zeros(2 ** n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class CircuitSpec:
    """Gate list plus the sizes of its input and parameter slot vectors."""

    n_qubits: int
    gates: tuple
    num_inputs: int
    num_params: int

    def __post_init__(self):
        _check_qubit_count(self.n_qubits)
        object.__setattr__(self, "gates", tuple(self.gates))
        seen = []
        for gate in self.gates:
            if gate.max_qubit() >= self.n_qubits:
                raise ValueError(f"gate {gate.to_text()!r} exceeds {self.n_qubits} qubits")
            src = gate.angle_source
            if isinstance(src, InputSlot) and not 0 <= src.index < self.num_inputs:
                raise ValueError(f"input slot {src.index} out of range")
            if isinstance(src, ParamSlot):
                if not 0 <= src.index < self.num_params:
                    raise ValueError(f"param slot {src.index} out of range")
                seen.append(src.index)
        if sorted(seen) != list(range(self.num_params)):
            raise ValueError("every parameter slot must be used exactly once")

    def to_text(self) -> str:
        header = f"# n_qubits={self.n_qubits} num_inputs={self.num_inputs} num_params={self.num_params}"
        return "\n".join([header] + [g.to_text() for g in self.gates]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CircuitSpec":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        meta = dict(tok.split("=") for tok in lines[0].lstrip("#").split())
        gates = [GateOp.from_text(ln) for ln in lines[1:] if not ln.startswith("#")]
        return cls(int(meta["n_qubits"]), tuple(gates),
                   int(meta["num_inputs"]), int(meta["num_params"]))


def _check_qubit_count(n_qubits: int) -> None:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")


# ---------------------------------------------------------------------------
# batched kernels
#
# Batches of states are stored column-wise, shape (2**n, batch), so every
# kernel streams over long contiguous runs of ``low * batch`` amplitudes.


_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def _split(psi: np.ndarray, n: int, q: int):
    """View ``psi`` as (high, 2, low, batch) around qubit ``q``."""
    return psi.reshape(2 ** q, 2, 2 ** (n - q - 1), psi.shape[1])


def _apply_hadamard(psi, n, q):
    v = _split(psi, n, q)
    a0, a1 = v[:, 0], v[:, 1]
    out = np.empty_like(v)
    np.add(a0, a1, out=out[:, 0])
    np.subtract(a0, a1, out=out[:, 1])
    out *= _INV_SQRT2
    return out.reshape(psi.shape)


def _apply_rotation(psi, n, q, kind, angles):
    half = 0.5 * np.asarray(angles, dtype=np.float64).reshape(-1)
    c, s = np.cos(half), np.sin(half)
    v = _split(psi, n, q)
    a0, a1 = v[:, 0], v[:, 1]
    out = np.empty_like(v)
    if kind is GateKind.RX:
        ms = -1j * s
        out[:, 0] = c * a0 + ms * a1
        out[:, 1] = ms * a0 + c * a1
    elif kind is GateKind.RY:
        out[:, 0] = c * a0 - s * a1
        out[:, 1] = s * a0 + c * a1
    else:
        out[:, 0] = (c - 1j * s) * a0
        out[:, 1] = (c + 1j * s) * a1
    return out.reshape(psi.shape)


def _apply_cnot(psi, n, control, target):
    v = psi.reshape((2,) * n + (psi.shape[1],))
    out = v.copy()
    on = [slice(None)] * n
    on[control] = 1
    # the target axis moves down by one once the control axis is indexed away
    t_axis = target - 1 if control < target else target
    out[tuple(on)] = np.flip(v[tuple(on)], axis=t_axis)
    return out.reshape(psi.shape)


def apply_gate_batch(psi: np.ndarray, n_qubits: int, gate: GateOp, angles=None) -> np.ndarray:
    """Apply ``gate`` to every column of ``psi`` (shape ``(2**n, batch)``).

    ``angles`` holds one angle per column, or a single angle shared by all.
    """
    if gate.max_qubit() >= n_qubits:
        raise IndexError(f"gate {gate.to_text()!r} addresses a qubit outside 0..{n_qubits - 1}")
    if gate.kind.is_rotation:
        if angles is None:
            raise ValueError(f"{gate.kind.value} needs an angle")
        return _apply_rotation(psi, n_qubits, gate.target, gate.kind, angles)
    if angles is not None:
        raise ValueError(f"{gate.kind.value} takes no angle")
    if gate.kind is GateKind.H:
        return _apply_hadamard(psi, n_qubits, gate.target)
    return _apply_cnot(psi, n_qubits, gate.control, gate.target)


def _resolve_angles(source: AngleSource, inputs: np.ndarray, params: np.ndarray):
    if isinstance(source, Constant):
        return np.array([float(source.value)])
    if isinstance(source, InputSlot):
        return inputs[:, source.index]
    return params[:, source.index]


def _check_sizes(circuit, inputs, params):
    if inputs.shape[1] != circuit.num_inputs:
        raise ValueError(f"expected {circuit.num_inputs} inputs, got {inputs.shape[1]}")
    if params.shape[1] != circuit.num_params:
        raise ValueError(f"expected {circuit.num_params} params, got {params.shape[1]}")
    batch = max(inputs.shape[0], params.shape[0])
    if inputs.shape[0] not in (1, batch) or params.shape[0] not in (1, batch):
        raise ValueError("inputs and params batch sizes do not broadcast")
    return batch


def _zero_columns(n, batch):
    psi = np.zeros((2 ** n, batch), dtype=np.complex128)
    psi[0] = 1.0
    return psi


def run_circuit_batch(circuit, inputs, params) -> np.ndarray:
    """Simulate ``circuit`` for a batch of (inputs, params) rows.

    ``inputs`` has shape ``(batch, num_inputs)`` and ``params`` shape
    ``(batch, num_params)``; either may have a single row, which is shared.
    Returns amplitudes of shape ``(batch, 2**n)``.
    """
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    params = np.atleast_2d(np.asarray(params, dtype=np.float64))
    batch = _check_sizes(circuit, inputs, params)
    n = circuit.n_qubits
    psi = _zero_columns(n, batch)
    for gate in circuit.gates:
        angles = None
        if gate.kind.is_rotation:
            angles = _resolve_angles(gate.angle_source, inputs, params)
        psi = apply_gate_batch(psi, n, gate, angles)
    return psi.T


def _transpose_angle(gate: GateOp, angle):
    # RX, RZ, H and CNOT are symmetric matrices; RY(phi)^T = RY(-phi)
    return -angle if gate.kind is GateKind.RY else angle


def _inputs_precede_params(circuit) -> bool:
    seen_param = False
    for gate in circuit.gates:
        if isinstance(gate.angle_source, ParamSlot):
            seen_param = True
        elif isinstance(gate.angle_source, InputSlot) and seen_param:
            return False
    return True


def run_circuit_shifted(circuit, inputs, params, shift: float) -> np.ndarray:
    """Amplitudes for every input row under ``params`` and its +-``shift`` copies.

    Returns an array of shape ``(2 * d + 1, batch, 2**n)``: index 0 holds the
    unshifted run, ``1 + j`` the run with ``params[j] + shift`` and
    ``1 + d + j`` the run with ``params[j] - shift``.

    When every input-fed gate precedes every trainable gate, one forward
    sweep records the state right before each trainable gate and one
    backward sweep builds the input-independent unitary of the gates after
    it, so each shifted branch costs one rotation plus one matrix product.
    Other circuits are simulated branch by branch.
    """
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    params = np.asarray(params, dtype=np.float64).reshape(1, -1)
    batch = _check_sizes(circuit, inputs, params)
    n, d = circuit.n_qubits, circuit.num_params
    dim = 2 ** n

    if not _inputs_precede_params(circuit):
        shifts = np.concatenate([np.zeros((1, d)), shift * np.eye(d), -shift * np.eye(d)])
        rows = params + shifts
        amps = run_circuit_batch(circuit, np.repeat(inputs, len(rows), axis=0),
                                 np.tile(rows, (batch, 1)))
        return amps.reshape(batch, len(rows), dim).transpose(1, 0, 2)

    out = np.empty((2 * d + 1, batch, dim), dtype=np.complex128)
    before = {}
    psi = _zero_columns(n, batch)
    for pos, gate in enumerate(circuit.gates):
        angles = None
        if gate.kind.is_rotation:
            if isinstance(gate.angle_source, ParamSlot):
                before[pos] = psi
            angles = _resolve_angles(gate.angle_source, inputs, params)
        psi = apply_gate_batch(psi, n, gate, angles)
    out[0] = psi.T
    if not before:
        return out

    # `tail` holds the transpose of (G_last ... G_{pos+1}); prepending a gate
    # to the product is G^T acting on the columns of `tail`
    first = min(before)
    tail = np.eye(dim, dtype=np.complex128)
    for pos in range(len(circuit.gates) - 1, first - 1, -1):
        gate = circuit.gates[pos]
        angles = None
        if gate.kind.is_rotation:
            angles = _resolve_angles(gate.angle_source, inputs, params)
        if pos in before:
            j = gate.angle_source.index
            for slot, sign in ((1 + j, 1.0), (1 + d + j, -1.0)):
                rotated = apply_gate_batch(before[pos], n, gate, angles + sign * shift)
                out[slot] = (tail.T @ rotated).T
        if pos > first:
            tail = apply_gate_batch(tail, n, gate,
                                    None if angles is None else _transpose_angle(gate, angles))
    return out


# ---------------------------------------------------------------------------
# single-state API


def apply_gate(state: StateVector, gate: GateOp, angle: Optional[float] = None) -> StateVector:
    """Return the state after ``gate``; ``state`` itself is left untouched."""
    angles = None if angle is None else np.array([angle], dtype=np.float64)
    psi = apply_gate_batch(state.amplitudes[:, None], state.n_qubits, gate, angles)
    return StateVector(state.n_qubits, psi[:, 0])


def gate_angle(gate: GateOp, inputs: Sequence[float], params: Sequence[float]) -> Optional[float]:
    src = gate.angle_source
    if src is None:
        return None
    if isinstance(src, Constant):
        return float(src.value)
    if isinstance(src, InputSlot):
        return float(inputs[src.index])
    return float(params[src.index])


def run_circuit(circuit, inputs=(), params=()) -> StateVector:
    """Apply the gates of ``circuit`` in order to |0...0>."""
    inputs = np.asarray(inputs, dtype=np.float64).reshape(-1)
    params = np.asarray(params, dtype=np.float64).reshape(-1)
    if inputs.size != circuit.num_inputs:
        raise ValueError(f"expected {circuit.num_inputs} inputs, got {inputs.size}")
    if params.size != circuit.num_params:
        raise ValueError(f"expected {circuit.num_params} params, got {params.size}")
    state = StateVector.zero(circuit.n_qubits)
    for gate in circuit.gates:
        state = apply_gate(state, gate, gate_angle(gate, inputs, params))
    return state


def measurement_probabilities(state: StateVector) -> np.ndarray:
    amps = state.amplitudes
    return amps.real ** 2 + amps.imag ** 2


def qubit0_marginal(psi: np.ndarray) -> np.ndarray:
    """(batch, 2**n) amplitudes -> (batch, 2) probabilities of qubit 0 reading 0/1."""
    half = psi.shape[1] // 2
    probs = psi.real ** 2 + psi.imag ** 2
    return np.stack([probs[:, :half].sum(axis=1), probs[:, half:].sum(axis=1)], axis=1)


def parity_marginal(psi: np.ndarray) -> np.ndarray:
    """(batch, 2**n) amplitudes -> (batch, 2) probabilities of even/odd bit parity."""
    n = int(psi.shape[1]).bit_length() - 1
    odd = _parity_mask(n)
    probs = psi.real ** 2 + psi.imag ** 2
    return np.stack([probs[:, ~odd].sum(axis=1), probs[:, odd].sum(axis=1)], axis=1)


def _parity_mask(n: int) -> np.ndarray:
    idx = np.arange(2 ** n)
    bits = (idx[:, None] >> np.arange(n)) & 1
    return bits.sum(axis=1) % 2 == 1
