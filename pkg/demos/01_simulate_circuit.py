"""
Simulating a small circuit
==========================

Build a two-qubit circuit by hand, run it, and read out probabilities.
"""

import numpy as np

from evoqas.simulator import CircuitSpec, GateKind, GateOp, InputSlot, ParamSlot, measurement_probabilities, run_circuit

# a Bell pair: H on qubit 0, then CNOT with qubit 0 as control
bell = CircuitSpec(2, (GateOp(GateKind.H, 0), GateOp(GateKind.CNOT, target=1, control=0)), 0, 0)
print(bell.to_text())
print("Bell probabilities:", measurement_probabilities(run_circuit(bell)))

# rotations read their angle from an input vector or a parameter vector
gates = (
    GateOp(GateKind.RY, 0, angle_source=InputSlot(0)),
    GateOp(GateKind.RY, 1, angle_source=InputSlot(1)),
    GateOp(GateKind.CNOT, target=1, control=0),
    GateOp(GateKind.RX, 0, angle_source=ParamSlot(0)),
    GateOp(GateKind.RX, 1, angle_source=ParamSlot(1)),
)
circuit = CircuitSpec(2, gates, num_inputs=2, num_params=2)
state = run_circuit(circuit, inputs=[0.3, -1.1], params=[np.pi / 4, 2.0])

# basis index 0b10 means qubit 0 reads 1 and qubit 1 reads 0
for index, p in enumerate(measurement_probabilities(state)):
    print(f"|{index:02b}>  {p:.4f}")
