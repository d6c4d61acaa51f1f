"""Run configuration, orchestration and the on-disk run-directory layout.

A run directory always contains ``config.json``, the fully resolved
configuration (including the model being analysed), so that
``evoqas <command> --config <dir>/config.json --out <other>`` rebuilds every
other file byte for byte.
"""
from __future__ import annotations

import json
import logging
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .architecture import ArchitectureSpec, Genotype, decode, sample_architecture
from .baseline import Activation, MlpModel, mlp_match_param_count
from .evolution import EvolutionConfig, EvolutionRecord, evolve
from .information import (DegenerateFisherError, EffectiveDimensionResult, empirical_fisher,
                          effective_dimension_from_fishers, eigenspectrum, frac_below, kappa,
                          normalize_fisher, sample_fishers, write_csv, write_ed_sweep_csv,
                          write_spectrum_csv)
from .model import QuantumModel

log = logging.getLogger(__name__)

DEFAULT_OUT_ROOT = "runs"
HISTORY_HEADER = ("generation", "best_ed", "mean_ed", "p25", "p75")
SUMMARY_HEADER = ("model_id", "n_qubits", "d", "frac_below")


class ConfigError(ValueError):
    """The run configuration is missing, malformed or inconsistent."""


@dataclass
class RunConfig:
    evolution: EvolutionConfig = field(default_factory=EvolutionConfig)
    out_dir: Optional[str] = None
    # model analysed by ed-sweep / spectrum: {"architecture": one-hot dict}
    # or {"genotype": logits dict, "argmax": bool}
    model: Optional[dict] = None
    n_list: List[int] = field(default_factory=lambda: [500, 1000, 2000, 5000, 10000])
    qubit_list: List[int] = field(default_factory=lambda: [4, 5, 6, 7])
    include_baselines: bool = True
    spectrum_c: float = 1e-2
    command: Optional[str] = None

    @property
    def seed(self) -> int:
        return self.evolution.master_seed

    def to_dict(self) -> dict:
        data = asdict(self)
        data["evolution"] = self.evolution.to_dict()
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        data = dict(data)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            evo = data.pop("evolution", {})
            cfg = cls(evolution=EvolutionConfig.from_dict(evo), **data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        if cfg.model is not None:
            resolve_architecture(cfg)
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
            data = json.loads(text)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)


def resolve_architecture(cfg: RunConfig) -> ArchitectureSpec:
    """The architecture named by ``cfg.model``."""
    spec = cfg.model or {}
    try:
        if "architecture" in spec:
            return ArchitectureSpec.from_dict(spec["architecture"])
        if "genotype" in spec:
            genotype = Genotype.from_dict(spec["genotype"])
            if spec.get("argmax", True):
                return sample_architecture(genotype, argmax_mode=True)
            return sample_architecture(genotype, np.random.default_rng(cfg.seed))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid model description: {exc}") from exc
    raise ConfigError("config has no model: give 'architecture' or 'genotype'")


def output_dir(cfg: RunConfig, command: str, override: Optional[str] = None) -> Path:
    if override:
        return Path(override)
    if cfg.out_dir:
        return Path(cfg.out_dir)
    root = os.environ.get("EVOQAS_OUT", DEFAULT_OUT_ROOT)
    return Path(root) / f"{command}-seed{cfg.seed}"


def _write_config(cfg: RunConfig, out: Path, command: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    data = cfg.to_dict()
    data["command"] = command
    # the directory itself is chosen at invocation time
    data["out_dir"] = None
    (out / "config.json").write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# evolve


def best_of_run(record: EvolutionRecord):
    """(genotype, architecture, fitness) of the best individual seen in the run."""
    best = max(record.generations, key=lambda g: g.best_fitness)
    return best.best_genotype, best.best_arch, best.best_fitness


def write_evolution(record: EvolutionRecord, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "history.csv", HISTORY_HEADER, record.history_rows())
    genotype, arch, _ = best_of_run(record)
    (out / "best_genotype.json").write_text(genotype.to_json(), encoding="utf-8")
    (out / "best_architecture.json").write_text(arch.to_json(), encoding="utf-8")
    circuit = decode(arch, record.config.n_qubits)
    (out / "best_circuit.txt").write_text(circuit.to_text(), encoding="utf-8")


def run_evolve(cfg: RunConfig, out: Path, threads: int = 1, progress=None) -> EvolutionRecord:
    _write_config(cfg, out, "evolve")
    record = evolve(cfg.evolution, threads=threads, progress=progress)
    write_evolution(record, out)
    return record


# ---------------------------------------------------------------------------
# analyses on a fixed architecture


def baseline_models(d: int, n_inputs: int) -> Dict[str, MlpModel]:
    sizes, _ = mlp_match_param_count(max(d, n_inputs + 2), n_inputs)
    return {
        "mlp_relu": MlpModel(sizes, Activation.RELU),
        "mlp_identity": MlpModel(sizes, Activation.IDENTITY),
    }


def analysis_models(cfg: RunConfig, n_qubits: int) -> Dict[str, object]:
    arch = resolve_architecture(cfg)
    qnn = QuantumModel(decode(arch, n_qubits), cfg.evolution.output_map)
    models = {"qnn": qnn}
    if cfg.include_baselines:
        models.update(baseline_models(qnn.num_params, n_qubits))
    return models


def ed_sweep(model, n_list: Sequence[int], gamma: float, num_theta_samples: int, k: int,
             seed: int, fisher_fn: Callable = empirical_fisher,
             threads: int = 1) -> List[EffectiveDimensionResult]:
    """Effective dimension of ``model`` at every ``n`` from one shared set of Fisher samples.

    Values of ``n`` with ``kappa <= 1`` are skipped with a warning.
    """
    results = []
    valid = []
    for n in n_list:
        try:
            kap = kappa(gamma, n)
        except ValueError as exc:
            log.warning("skipping n=%s: %s", n, exc)
            continue
        if kap <= 1.0:
            log.warning("skipping n=%s: kappa=%.4g <= 1", n, kap)
            continue
        valid.append((n, kap))
    if not valid:
        return results
    samples = sample_fishers(model, num_theta_samples, k, seed, fisher_fn, threads)
    try:
        normalized = normalize_fisher(samples, model.num_params)
    except DegenerateFisherError:
        normalized = None
    for n, kap in valid:
        value = 0.0 if normalized is None else effective_dimension_from_fishers(normalized, gamma, n)
        results.append(EffectiveDimensionResult(gamma, n, kap, value, num_theta_samples, k, seed,
                                                model.num_params))
    return results


def run_ed_sweep(cfg: RunConfig, out: Path, threads: int = 1) -> Dict[str, List[EffectiveDimensionResult]]:
    _write_config(cfg, out, "ed-sweep")
    ed = cfg.evolution.ed_params
    results = {}
    for model_id, model in analysis_models(cfg, cfg.evolution.n_qubits).items():
        res = ed_sweep(model, cfg.n_list, ed.gamma, ed.num_theta_samples, ed.k, cfg.seed, threads=threads)
        name = "ed_sweep.csv" if model_id == "qnn" else f"ed_sweep_{model_id}.csv"
        write_ed_sweep_csv(out / name, res)
        results[model_id] = res
    return results


def fisher_spectrum(model, num_theta_samples: int, k: int, seed: int,
                    fisher_fn: Callable = empirical_fisher, threads: int = 1) -> np.ndarray:
    """Eigenvalues of every normalised Fisher sample, concatenated sample by sample."""
    samples = sample_fishers(model, num_theta_samples, k, seed, fisher_fn, threads)
    try:
        matrices = normalize_fisher(samples, model.num_params)
    except DegenerateFisherError:
        matrices = [s.matrix for s in samples]
    if not matrices or matrices[0].size == 0:
        return np.zeros(0)
    return np.concatenate([eigenspectrum(m) for m in matrices])


def run_spectrum(cfg: RunConfig, out: Path, threads: int = 1) -> Dict[tuple, float]:
    """Write ``spectrum.csv`` and ``spectrum_summary.csv``; return ``{(model_id, size): frac_below}``."""
    _write_config(cfg, out, "spectrum")
    ed = cfg.evolution.ed_params
    rows, summary, fracs = [], [], {}
    for size in cfg.qubit_list:
        for model_id, model in analysis_models(cfg, size).items():
            eig = fisher_spectrum(model, ed.num_theta_samples, ed.k, cfg.seed, threads=threads)
            rows.extend((model_id, size, model.num_params, float(v)) for v in eig)
            frac = frac_below(eig, cfg.spectrum_c) if eig.size else 1.0
            summary.append((model_id, size, model.num_params, frac))
            fracs[(model_id, size)] = frac
    write_spectrum_csv(out / "spectrum.csv", rows)
    write_csv(out / "spectrum_summary.csv", SUMMARY_HEADER, summary)
    return fracs
