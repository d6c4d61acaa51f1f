"""Evolutionary search over circuit genotypes with effective-dimension fitness.

Each generation the population is evaluated, the ``num_parents`` fittest
individuals are kept as parents, and the next population is formed from
(optionally) the parents themselves plus Gaussian-mutated offspring assigned
round-robin over the parents.

Every random draw comes from a stream keyed by ``(master_seed, generation,
slot, purpose)``, so a run is reproducible whatever the evaluation order.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import List, Optional

import numpy as np

from .architecture import ArchitectureSpec, Genotype, decode, init_genotype, mutate, sample_architecture
from .information import effective_dimension
from .model import QuantumModel

log = logging.getLogger(__name__)

# stream purposes
_INIT, _MUTATE, _EVAL = 0, 1, 2


@dataclass(frozen=True)
class EDParams:
    gamma: float = 1.0
    n: int = 1000
    num_theta_samples: int = 100
    k: int = 100


@dataclass(frozen=True)
class EvolutionConfig:
    population_size: int = 50
    num_parents: int = 10
    sigma: float = 0.02
    num_generations: int = 1000
    n_qubits: int = 4
    num_var_layers: int = 2
    ed_params: EDParams = field(default_factory=EDParams)
    master_seed: int = 0
    elitism: bool = True
    output_map: str = "parity"

    def __post_init__(self):
        if isinstance(self.ed_params, dict):
            object.__setattr__(self, "ed_params", EDParams(**self.ed_params))
        for name in ("population_size", "num_parents", "n_qubits"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.num_generations < 0 or self.num_var_layers < 0:
            raise ValueError("num_generations and num_var_layers must be non-negative")
        if self.num_parents > self.population_size:
            raise ValueError("num_parents cannot exceed population_size")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "EvolutionConfig":
        return cls(**data)


@dataclass(frozen=True)
class Individual:
    genotype: Genotype
    eval_seed: int
    sampled_arch: Optional[ArchitectureSpec] = None
    fitness: Optional[float] = None


@dataclass
class GenerationStats:
    generation: int
    best_fitness: float
    mean_fitness: float
    p25: float
    p75: float
    best_genotype: Genotype
    best_arch: ArchitectureSpec


@dataclass
class EvolutionRecord:
    config: EvolutionConfig
    generations: List[GenerationStats] = field(default_factory=list)
    population: List[Individual] = field(default_factory=list)

    @property
    def best(self) -> Individual:
        return select_parents(self.population, 1)[0]

    def history_rows(self):
        for g in self.generations:
            yield g.generation, g.best_fitness, g.mean_fitness, g.p25, g.p75


def derive_seed(master_seed: int, *keys: int) -> int:
    """A 63-bit seed derived from ``master_seed`` and integer keys."""
    state = np.random.SeedSequence([master_seed, *keys]).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 31 ^ int(state[1])


def evaluate(ind: Individual, cfg: EvolutionConfig) -> Individual:
    """Sample an architecture, decode it and score it by effective dimension.

    Already evaluated individuals are returned untouched. Failures during
    the estimate give fitness 0.
    """
    if ind.fitness is not None:
        return ind
    rng = np.random.default_rng([ind.eval_seed, _EVAL])
    arch = sample_architecture(ind.genotype, rng)
    ed = cfg.ed_params
    try:
        model = QuantumModel(decode(arch, cfg.n_qubits), cfg.output_map)
        fitness = effective_dimension(model, ed.gamma, ed.n, ed.num_theta_samples, ed.k,
                                      seed=ind.eval_seed).value
    except ValueError as exc:
        log.warning("evaluation failed for %s: %s", arch.describe(), exc)
        fitness = 0.0
    return replace(ind, sampled_arch=arch, fitness=float(fitness))


def select_parents(population: List[Individual], num_parents: int) -> List[Individual]:
    """The ``num_parents`` fittest individuals; ties keep population order."""
    if num_parents > len(population):
        raise ValueError("num_parents exceeds population size")
    if any(ind.fitness is None for ind in population):
        raise ValueError("every individual must be evaluated before selection")
    order = sorted(range(len(population)), key=lambda i: -population[i].fitness)
    return [population[i] for i in order[:num_parents]]


def _stats(generation: int, population: List[Individual]) -> GenerationStats:
    fit = np.array([ind.fitness for ind in population])
    best = select_parents(population, 1)[0]
    return GenerationStats(generation, float(fit.max()), float(fit.mean()),
                           float(np.percentile(fit, 25)), float(np.percentile(fit, 75)),
                           best.genotype, best.sampled_arch)


def _evaluate_all(population, cfg, pool):
    if pool is None:
        return [evaluate(ind, cfg) for ind in population]
    return list(pool.map(lambda ind: evaluate(ind, cfg), population))


def next_generation(parents: List[Individual], cfg: EvolutionConfig, generation: int) -> List[Individual]:
    """Parents (with elitism) plus round-robin mutated offspring, ``population_size`` in total."""
    population = list(parents) if cfg.elitism else []
    slot = 0
    while len(population) < cfg.population_size:
        parent = parents[slot % len(parents)]
        rng = np.random.default_rng([cfg.master_seed, generation, slot, _MUTATE])
        child = mutate(parent.genotype, cfg.sigma, rng)
        population.append(Individual(child, derive_seed(cfg.master_seed, generation, slot)))
        slot += 1
    return population


def evolve(cfg: EvolutionConfig, threads: int = 1, progress=None) -> EvolutionRecord:
    record = EvolutionRecord(cfg)
    population = [
        Individual(init_genotype(cfg.num_var_layers, np.random.default_rng([cfg.master_seed, 0, i, _INIT])),
                   derive_seed(cfg.master_seed, 0, i))
        for i in range(cfg.population_size)
    ]
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        population = _evaluate_all(population, cfg, pool)
        record.generations.append(_stats(0, population))
        if progress is not None:
            progress(record.generations[-1])
        for gen in range(1, cfg.num_generations + 1):
            parents = select_parents(population, cfg.num_parents)
            population = _evaluate_all(next_generation(parents, cfg, gen), cfg, pool)
            record.generations.append(_stats(gen, population))
            if progress is not None:
                progress(record.generations[-1])
    finally:
        if pool is not None:
            pool.shutdown()
    record.population = population
    return record
