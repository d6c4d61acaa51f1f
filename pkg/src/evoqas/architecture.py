"""Circuit genotype, softmax sampling, decoding and mutation.

A genotype holds real-valued logits for every architectural choice:

* ``encoding_layer``: Hadamard on/off (2 logits) and the encoding rotation
  axis (3 logits);
* ``variational_layer``: per layer, the entangler topology (2 logits) and the
  trainable rotation axis (3 logits).

Category order follows the one-hot table: ``[1, 0]`` means "with H",
``[1, 0, 0]`` means RX, ``[1, 0]`` for an entangler means the chain
(``entangling_layer``) and ``[0, 1]`` the ring (``cycle_entangling_layer``).
"""
from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .simulator import CircuitSpec, GateKind, GateOp, InputSlot, ParamSlot

NUM_H_LAYERS = 2
NUM_ROTATIONS = 3
NUM_ENTANGLING = 2


class HLayer(str, enum.Enum):
    WITH_H = "WithH"
    WITHOUT_H = "WithoutH"


class Rotation(str, enum.Enum):
    RX = "RX"
    RY = "RY"
    RZ = "RZ"


class Entangler(str, enum.Enum):
    CHAIN = "Chain"
    RING = "Ring"


H_CHOICES = (HLayer.WITH_H, HLayer.WITHOUT_H)
ROT_CHOICES = (Rotation.RX, Rotation.RY, Rotation.RZ)
ENT_CHOICES = (Entangler.CHAIN, Entangler.RING)


def _logits(values, size: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64).reshape(-1)
    if arr.shape != (size,):
        raise ValueError(f"{name} must have length {size}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite logits")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class VarLayerGenes:
    entangle_logits: np.ndarray
    rot_logits: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entangle_logits",
                           _logits(self.entangle_logits, NUM_ENTANGLING, "entangle_logits"))
        object.__setattr__(self, "rot_logits", _logits(self.rot_logits, NUM_ROTATIONS, "rot_logits"))


@dataclass(frozen=True, eq=False)
class Genotype:
    encoding_h_logits: np.ndarray
    encoding_rot_logits: np.ndarray
    var_layers: Tuple[VarLayerGenes, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "encoding_h_logits",
                           _logits(self.encoding_h_logits, NUM_H_LAYERS, "encoding_h_logits"))
        object.__setattr__(self, "encoding_rot_logits",
                           _logits(self.encoding_rot_logits, NUM_ROTATIONS, "encoding_rot_logits"))
        object.__setattr__(self, "var_layers", tuple(self.var_layers))

    @property
    def num_var_layers(self) -> int:
        return len(self.var_layers)

    def flat(self) -> np.ndarray:
        """All logits concatenated in serialization order."""
        parts = [self.encoding_h_logits, self.encoding_rot_logits]
        for layer in self.var_layers:
            parts += [layer.entangle_logits, layer.rot_logits]
        return np.concatenate(parts)

    def with_flat(self, values: np.ndarray) -> "Genotype":
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (genotype_size(self.num_var_layers),):
            raise ValueError("flat logit vector has the wrong length")
        layers = []
        pos = NUM_H_LAYERS + NUM_ROTATIONS
        for _ in range(self.num_var_layers):
            ent = values[pos:pos + NUM_ENTANGLING]
            rot = values[pos + NUM_ENTANGLING:pos + NUM_ENTANGLING + NUM_ROTATIONS]
            layers.append(VarLayerGenes(ent, rot))
            pos += NUM_ENTANGLING + NUM_ROTATIONS
        return Genotype(values[:NUM_H_LAYERS], values[NUM_H_LAYERS:NUM_H_LAYERS + NUM_ROTATIONS],
                        tuple(layers))

    def __eq__(self, other):
        if not isinstance(other, Genotype):
            return NotImplemented
        return (self.num_var_layers == other.num_var_layers
                and np.array_equal(self.flat(), other.flat()))

    def to_dict(self) -> dict:
        return {
            "encoding_layer": [self.encoding_h_logits.tolist(), self.encoding_rot_logits.tolist()],
            "variational_layer": [[l.entangle_logits.tolist(), l.rot_logits.tolist()]
                                  for l in self.var_layers],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Genotype":
        h, rot = data["encoding_layer"]
        layers = tuple(VarLayerGenes(ent, r) for ent, r in data["variational_layer"])
        return cls(h, rot, layers)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Genotype":
        return cls.from_dict(json.loads(text))


def genotype_size(num_var_layers: int) -> int:
    return NUM_H_LAYERS + NUM_ROTATIONS + num_var_layers * (NUM_ENTANGLING + NUM_ROTATIONS)


@dataclass(frozen=True)
class ArchitectureSpec:
    """Discrete architecture: one category per logit block."""

    h_layer: HLayer
    encoding_rot: Rotation
    layers: Tuple[Tuple[Entangler, Rotation], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "h_layer", HLayer(self.h_layer))
        object.__setattr__(self, "encoding_rot", Rotation(self.encoding_rot))
        object.__setattr__(self, "layers",
                           tuple((Entangler(e), Rotation(r)) for e, r in self.layers))

    def to_dict(self) -> dict:
        """One-hot form, laid out like :meth:`Genotype.to_dict`."""
        def one_hot(choice, choices):
            return [1 if c is choice else 0 for c in choices]

        return {
            "encoding_layer": [one_hot(self.h_layer, H_CHOICES),
                               one_hot(self.encoding_rot, ROT_CHOICES)],
            "variational_layer": [[one_hot(e, ENT_CHOICES), one_hot(r, ROT_CHOICES)]
                                  for e, r in self.layers],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ArchitectureSpec":
        def pick(vec, choices):
            vec = list(vec)
            if sorted(vec) != [0] * (len(choices) - 1) + [1]:
                raise ValueError(f"not a one-hot vector: {vec}")
            return choices[vec.index(1)]

        h, rot = data["encoding_layer"]
        layers = tuple((pick(e, ENT_CHOICES), pick(r, ROT_CHOICES))
                       for e, r in data["variational_layer"])
        return cls(pick(h, H_CHOICES), pick(rot, ROT_CHOICES), layers)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ArchitectureSpec":
        return cls.from_dict(json.loads(text))

    def describe(self) -> str:
        layers = ", ".join(f"{e.value}+{r.value}" for e, r in self.layers)
        return f"{self.h_layer.value}/{self.encoding_rot.value} [{layers}]"


def init_genotype(num_var_layers: int, rng: np.random.Generator) -> Genotype:
    if num_var_layers < 0:
        raise ValueError("num_var_layers must be non-negative")
    flat = rng.standard_normal(genotype_size(num_var_layers))
    template = Genotype(np.zeros(NUM_H_LAYERS), np.zeros(NUM_ROTATIONS),
                        tuple(VarLayerGenes(np.zeros(NUM_ENTANGLING), np.zeros(NUM_ROTATIONS))
                              for _ in range(num_var_layers)))
    return template.with_flat(flat)


def mutate(g: Genotype, sigma: float, rng: np.random.Generator) -> Genotype:
    """Add ``sigma * N(0, 1)`` noise to every logit independently."""
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    flat = g.flat()
    return g.with_flat(flat + sigma * rng.standard_normal(flat.size))


def softmax(logits: np.ndarray) -> np.ndarray:
    z = np.asarray(logits, dtype=np.float64)
    z = np.exp(z - z.max())
    return z / z.sum()


def _choose(logits, choices, rng, argmax_mode):
    if argmax_mode:
        return choices[int(np.argmax(logits))]
    cdf = np.cumsum(softmax(logits))
    idx = int(np.searchsorted(cdf, rng.random(), side="right"))
    return choices[min(idx, len(choices) - 1)]


def sample_architecture(g: Genotype, rng: np.random.Generator | None = None,
                        argmax_mode: bool = False) -> ArchitectureSpec:
    """Draw each choice from ``categorical(softmax(logits))``.

    With ``argmax_mode`` the highest logit wins (first one on ties) and
    ``rng`` is not used.
    """
    if rng is None and not argmax_mode:
        raise ValueError("an rng is required unless argmax_mode is set")
    h = _choose(g.encoding_h_logits, H_CHOICES, rng, argmax_mode)
    rot = _choose(g.encoding_rot_logits, ROT_CHOICES, rng, argmax_mode)
    layers = tuple(
        (_choose(l.entangle_logits, ENT_CHOICES, rng, argmax_mode),
         _choose(l.rot_logits, ROT_CHOICES, rng, argmax_mode))
        for l in g.var_layers
    )
    return ArchitectureSpec(h, rot, layers)


def entangler_gates(kind: Entangler, n_qubits: int) -> List[GateOp]:
    gates = [GateOp(GateKind.CNOT, target=i + 1, control=i) for i in range(n_qubits - 1)]
    if kind is Entangler.RING:
        gates.append(GateOp(GateKind.CNOT, target=0, control=n_qubits - 1))
    return gates


def decode(a: ArchitectureSpec, n_qubits: int) -> CircuitSpec:
    """Build the gate list for ``a`` on ``n_qubits`` qubits.

    Layout: optional H wall, encoding rotations fed by ``InputSlot(i)``, then
    per variational layer the entangler followed by one trainable rotation per
    qubit (``ParamSlot(layer * n_qubits + i)``).
    """
    if n_qubits < 1:
        raise ValueError(f"n_qubits must be positive, got {n_qubits}")
    if a.layers and n_qubits < 2:
        raise ValueError("entangling layers need at least 2 qubits")
    gates: List[GateOp] = []
    if a.h_layer is HLayer.WITH_H:
        gates += [GateOp(GateKind.H, q) for q in range(n_qubits)]
    enc = GateKind(a.encoding_rot.value)
    gates += [GateOp(enc, q, angle_source=InputSlot(q)) for q in range(n_qubits)]
    for j, (ent, rot) in enumerate(a.layers):
        gates += entangler_gates(ent, n_qubits)
        kind = GateKind(rot.value)
        gates += [GateOp(kind, q, angle_source=ParamSlot(j * n_qubits + q)) for q in range(n_qubits)]
    return CircuitSpec(n_qubits, tuple(gates), num_inputs=n_qubits,
                       num_params=n_qubits * len(a.layers))


def all_architectures(num_var_layers: int):
    """Every distinct :class:`ArchitectureSpec` with ``num_var_layers`` layers."""
    layer_choices = list(itertools.product(ENT_CHOICES, ROT_CHOICES))
    for h, rot in itertools.product(H_CHOICES, ROT_CHOICES):
        for layers in itertools.product(layer_choices, repeat=num_var_layers):
            yield ArchitectureSpec(h, rot, layers)


def enumerate_search_space(num_var_layers: int) -> int:
    if num_var_layers < 0:
        raise ValueError("num_var_layers must be non-negative")
    encoding = NUM_H_LAYERS * NUM_ROTATIONS
    per_layer = NUM_ENTANGLING * NUM_ROTATIONS
    return encoding * per_layer ** num_var_layers
