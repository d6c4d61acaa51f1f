"""
Fisher eigenvalue spectra
=========================

Compare how the normalised Fisher eigenvalues of a circuit and a classical
network spread out, and how many sit near zero.
"""

import numpy as np

from evoqas.architecture import ArchitectureSpec, Entangler, HLayer, Rotation, decode
from evoqas.baseline import Activation, MlpModel, mlp_match_param_count
from evoqas.information import frac_below
from evoqas.model import QuantumModel
from evoqas.runs import fisher_spectrum

arch = ArchitectureSpec(HLayer.WITHOUT_H, Rotation.RY, ((Entangler.CHAIN, Rotation.RY), (Entangler.RING, Rotation.RY)))

for q in (4, 5):
    qnn = QuantumModel(decode(arch, q))
    sizes, _ = mlp_match_param_count(qnn.num_params, q)
    models = {"qnn": qnn,
              "mlp_relu": MlpModel(sizes, Activation.RELU),
              "mlp_identity": MlpModel(sizes, Activation.IDENTITY)}
    for name, model in models.items():
        eig = fisher_spectrum(model, 30, 60, seed=q)
        hist, _ = np.histogram(eig, bins=[0, 0.01, 0.1, 1, 10, np.inf])
        print(f"{q} qubits {name:13s} frac_below={frac_below(eig):.3f}  histogram {hist}")
