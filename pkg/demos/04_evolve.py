"""
A short evolutionary search
===========================

Evolve genotypes whose sampled circuits have large effective dimension.
"""

import numpy as np

from evoqas.architecture import decode
from evoqas.evolution import EDParams, EvolutionConfig, evolve

cfg = EvolutionConfig(population_size=10, num_parents=3, sigma=0.1, num_generations=5,
                      n_qubits=3, num_var_layers=2, ed_params=EDParams(1.0, 1000, 20, 40), master_seed=1)


def report(stats):
    print(f"gen {stats.generation:2d}  best {stats.best_fitness:.3f}  mean {stats.mean_fitness:.3f}  "
          f"iqr [{stats.p25:.3f}, {stats.p75:.3f}]")


record = evolve(cfg, progress=report)

best = record.best
print("best architecture:", best.sampled_arch.describe())
print(decode(best.sampled_arch, cfg.n_qubits).to_text())

# the elite genotype has drifted towards the choices it keeps winning with
print(np.round(best.genotype.flat(), 2))
