"""
Genotypes, sampled architectures and decoded circuits
=====================================================

A genotype holds softmax logits for every architectural choice. Sampling
turns it into a discrete architecture, and decoding turns that into gates.
"""

import numpy as np

from evoqas.architecture import decode, enumerate_search_space, init_genotype, mutate, sample_architecture

rng = np.random.default_rng(7)
genotype = init_genotype(2, rng)
print(genotype.to_json())

# every sample is one draw per logit block
for _ in range(3):
    print(sample_architecture(genotype, rng).describe())

# argmax decoding is deterministic
arch = sample_architecture(genotype, argmax_mode=True)
print("argmax:", arch.describe())
print(decode(arch, 3).to_text())

# a mutation nudges every logit by sigma * N(0, 1)
child = mutate(genotype, 0.02, rng)
print("largest logit change:", np.abs(child.flat() - genotype.flat()).max())

for layers in range(4):
    print(f"{layers} variational layers: {enumerate_search_space(layers)} architectures")
