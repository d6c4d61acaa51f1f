"""Evolutionary search for variational quantum circuits with high effective dimension."""

from .architecture import (ArchitectureSpec, Genotype, decode, enumerate_search_space, init_genotype,
                           mutate, sample_architecture)
from .baseline import MlpModel, MlpSpec, mlp_forward, mlp_log_prob_gradient, mlp_match_param_count
from .evolution import EDParams, EvolutionConfig, EvolutionRecord, evaluate, evolve, select_parents
from .information import (EffectiveDimensionResult, FisherSample, effective_dimension, eigenspectrum,
                          empirical_fisher, normalize_fisher)
from .model import QuantumModel, forward, log_prob_gradient
from .simulator import (CircuitSpec, GateKind, GateOp, StateVector, apply_gate, measurement_probabilities,
                        run_circuit)

__version__ = "0.1.0"
