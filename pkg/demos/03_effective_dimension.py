"""
Effective dimension of a circuit and of a classical baseline
============================================================

Estimate the effective dimension of one four-qubit circuit, compare it with
a linear network of about the same size, and watch it change with n.
"""

from evoqas.architecture import ArchitectureSpec, Entangler, HLayer, Rotation, decode
from evoqas.baseline import Activation, MlpModel, mlp_match_param_count
from evoqas.information import effective_dimension
from evoqas.model import QuantumModel
from evoqas.runs import ed_sweep

arch = ArchitectureSpec(HLayer.WITHOUT_H, Rotation.RY, ((Entangler.CHAIN, Rotation.RY), (Entangler.RING, Rotation.RY)))
qnn = QuantumModel(decode(arch, 4))
sizes, count = mlp_match_param_count(qnn.num_params, 4)
mlp = MlpModel(sizes, Activation.IDENTITY)
print(f"circuit d={qnn.num_params}, baseline {sizes} d={count}")

# smaller Monte Carlo budgets than the defaults keep this quick
for name, model in (("qnn", qnn), ("mlp_identity", mlp)):
    r = effective_dimension(model, gamma=1.0, n=1000, num_theta_samples=40, k=60, seed=0)
    print(f"{name:13s} ED={r.value:.3f}  normalised={r.normalized:.3f}")

# one shared set of Fisher samples serves the whole sweep
for r in ed_sweep(qnn, [500, 1000, 2000, 5000, 10_000], 1.0, 40, 60, seed=0):
    print(f"n={r.n:6d}  ED={r.value:.3f}")
