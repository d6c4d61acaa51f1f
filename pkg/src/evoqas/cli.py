"""Command-line entry point: ``evoqas <command> [options]``.

Exit codes: 0 on success, 2 for configuration errors, 1 for runtime failures.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .architecture import Genotype, decode, enumerate_search_space, sample_architecture
from .runs import ConfigError, RunConfig, output_dir, run_ed_sweep, run_evolve, run_spectrum

log = logging.getLogger("evoqas")


def _load_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    evo = cfg.evolution.to_dict()
    if args.seed is not None:
        evo["master_seed"] = args.seed
    if getattr(args, "n_qubits", None) is not None:
        evo["n_qubits"] = args.n_qubits
    data = cfg.to_dict()
    data["evolution"] = evo
    if getattr(args, "n", None) is not None:
        data["n_list"] = args.n
    if getattr(args, "qubits", None) is not None:
        data["qubit_list"] = args.qubits
    if getattr(args, "no_baselines", False):
        data["include_baselines"] = False
    model = _model_from_args(args)
    if model is not None:
        data["model"] = model
    return RunConfig.from_dict(data)


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _model_from_args(args):
    if getattr(args, "arch", None):
        return {"architecture": _read_json(args.arch)}
    if getattr(args, "genotype", None):
        return {"genotype": _read_json(args.genotype), "argmax": True}
    if getattr(args, "run", None):
        return {"architecture": _read_json(Path(args.run) / "best_architecture.json")}
    return None


def _threads(args) -> int:
    return args.threads if args.threads else (os.cpu_count() or 1)


def cmd_evolve(args) -> int:
    cfg = _load_config(args)
    out = output_dir(cfg, "evolve", args.out)

    def progress(stats):
        log.info("generation %d: best %.4f mean %.4f", stats.generation,
                 stats.best_fitness, stats.mean_fitness)

    record = run_evolve(cfg, out, threads=_threads(args), progress=progress)
    best = max(g.best_fitness for g in record.generations)
    print(f"{out}\tbest_ed={best!r}")
    return 0


def cmd_ed_sweep(args) -> int:
    cfg = _load_config(args)
    out = output_dir(cfg, "ed-sweep", args.out)
    run_ed_sweep(cfg, out, threads=_threads(args))
    print(out)
    return 0


def cmd_spectrum(args) -> int:
    cfg = _load_config(args)
    out = output_dir(cfg, "spectrum", args.out)
    fracs = run_spectrum(cfg, out, threads=_threads(args))
    for (model_id, size), frac in fracs.items():
        print(f"{model_id}\t{size}\tfrac_below={frac:.4f}")
    print(out)
    return 0


def cmd_enumerate(args) -> int:
    if args.layers < 0:
        raise ConfigError("--layers must be non-negative")
    print(enumerate_search_space(args.layers))
    return 0


def cmd_sample_circuit(args) -> int:
    try:
        genotype = Genotype.from_dict(_read_json(args.genotype))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid genotype: {exc}") from exc
    if args.argmax:
        arch = sample_architecture(genotype, argmax_mode=True)
    else:
        arch = sample_architecture(genotype, np.random.default_rng(args.seed or 0))
    sys.stdout.write(decode(arch, args.n_qubits).to_text())
    return 0


def _common(p, config=True):
    if config:
        p.add_argument("--config", metavar="PATH", help="run configuration (JSON)")
    p.add_argument("--seed", type=int, help="override the master seed")
    p.add_argument("--out", metavar="DIR", help="output directory")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: available CPUs)")


def _model_args(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--arch", metavar="PATH", help="one-hot architecture JSON")
    src.add_argument("--genotype", metavar="PATH", help="genotype JSON, decoded by argmax")
    src.add_argument("--run", metavar="DIR", help="evolve run directory (uses its best architecture)")
    p.add_argument("--no-baselines", action="store_true", help="skip the classical baselines")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evoqas", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="run the evolutionary search")
    _common(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("ed-sweep", help="effective dimension against dataset size n")
    _common(p)
    _model_args(p)
    p.add_argument("--n", type=int, nargs="*", help="dataset sizes")
    p.add_argument("--n-qubits", type=int)
    p.set_defaults(func=cmd_ed_sweep)

    p = sub.add_parser("spectrum", help="Fisher eigenvalue spectra across sizes")
    _common(p)
    _model_args(p)
    p.add_argument("--qubits", type=int, nargs="*", help="qubit counts (input sizes for baselines)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("enumerate", help="size of the architecture search space")
    p.add_argument("--layers", type=int, default=1, help="number of variational layers")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("sample-circuit", help="decode a genotype into a circuit listing")
    p.add_argument("--genotype", metavar="PATH", required=True)
    p.add_argument("--n-qubits", type=int, default=4)
    p.add_argument("--argmax", action="store_true", help="take the highest logit per choice")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_sample_circuit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
